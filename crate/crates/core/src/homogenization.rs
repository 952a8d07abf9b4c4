//! Two-stage effective stiffness of a laminate containing a graded wrinkle.
//!
//! The wavelength is cut into vertical strips. Inside a strip every ply is
//! rotated by its in-plane angle and by the local misalignment `φ(x, z)`,
//! and the stack is mixed through the thickness with the out-of-plane
//! stresses `(σzz, σyz, σzx)` and in-plane strains `(εxx, εyy, γxy)` held
//! uniform. The strips are then mixed along `x` with `(σxx, σzx, σxy)` and
//! `(εyy, εzz, γyz)` held uniform.
//!
//! Both stages are the same operation on different index groups: split the
//! stiffness into blocks over the uniform-stress group `a` and the
//! uniform-strain group `b`, partially invert, average the partially inverted
//! blocks, and invert back. With `P = ⟨Caa⁻¹⟩`, `Q = ⟨Caa⁻¹Cab⟩` and
//! `R = ⟨Cbb − Cabᵀ Caa⁻¹ Cab⟩` the mixed stiffness is
//!
//! ```text
//! C*aa = P⁻¹,   C*ab = P⁻¹ Q,   C*bb = Qᵀ P⁻¹ Q + R
//! ```

use std::f64::consts::FRAC_PI_2;

use gauss_quad::GaussLegendre;
use nalgebra::{Matrix3, Matrix6};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::WrinkleDescriptor;
use crate::material::{stiffness_from_engineering, Layup, StiffnessMatrix, XX, XY, YY, YZ, ZX, ZZ};
use crate::rotation::rotate_raw;

/// Uniform-stress group of the through-thickness stage.
pub const VERTICAL_A: [usize; 3] = [ZZ, YZ, ZX];
/// Uniform-strain group of the through-thickness stage.
pub const VERTICAL_B: [usize; 3] = [XX, YY, XY];
/// Uniform-stress group of the along-wavelength stage.
pub const HORIZONTAL_E: [usize; 3] = [XX, ZX, XY];
/// Uniform-strain group of the along-wavelength stage.
pub const HORIZONTAL_F: [usize; 3] = [YY, ZZ, YZ];

/// Smallest number of strips accepted per wavelength.
pub const MIN_STRIPS: usize = 16;

/// Strip count used by [`oracle_fine_average`].
pub const ORACLE_STRIPS: usize = 4096;
/// Sub-intervals per ply used by [`oracle_fine_average`].
pub const ORACLE_Z_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Blocks {
    aa: Matrix3<f64>,
    ab: Matrix3<f64>,
    bb: Matrix3<f64>,
}

fn split(c: &Matrix6<f64>, a: &[usize; 3], b: &[usize; 3]) -> Blocks {
    Blocks {
        aa: Matrix3::from_fn(|i, j| c[(a[i], a[j])]),
        ab: Matrix3::from_fn(|i, j| c[(a[i], b[j])]),
        bb: Matrix3::from_fn(|i, j| c[(b[i], b[j])]),
    }
}

fn assemble(blocks: &Blocks, a: &[usize; 3], b: &[usize; 3]) -> Matrix6<f64> {
    let mut c = Matrix6::zeros();
    for i in 0..3 {
        for j in 0..3 {
            c[(a[i], a[j])] = blocks.aa[(i, j)];
            c[(b[i], b[j])] = blocks.bb[(i, j)];
            c[(a[i], b[j])] = blocks.ab[(i, j)];
            c[(b[j], a[i])] = blocks.ab[(i, j)];
        }
    }
    c
}

/// Blocks of a stiffness over the through-thickness groups
/// `A = (zz, yz, zx)` and `B = (xx, yy, xy)`; `c_ab` has rows in `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionAB {
    pub c_aa: Matrix3<f64>,
    pub c_ab: Matrix3<f64>,
    pub c_bb: Matrix3<f64>,
}

impl PartitionAB {
    pub fn assemble(&self) -> Matrix6<f64> {
        assemble(
            &Blocks {
                aa: self.c_aa,
                ab: self.c_ab,
                bb: self.c_bb,
            },
            &VERTICAL_A,
            &VERTICAL_B,
        )
    }
}

/// Blocks of a stiffness over the along-wavelength groups
/// `E = (xx, zx, xy)` and `F = (yy, zz, yz)`; `c_ef` has rows in `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionEF {
    pub c_ee: Matrix3<f64>,
    pub c_ef: Matrix3<f64>,
    pub c_ff: Matrix3<f64>,
}

impl PartitionEF {
    pub fn assemble(&self) -> Matrix6<f64> {
        assemble(
            &Blocks {
                aa: self.c_ee,
                ab: self.c_ef,
                bb: self.c_ff,
            },
            &HORIZONTAL_E,
            &HORIZONTAL_F,
        )
    }
}

pub fn partition_vertical(c: &Matrix6<f64>) -> PartitionAB {
    let b = split(c, &VERTICAL_A, &VERTICAL_B);
    PartitionAB {
        c_aa: b.aa,
        c_ab: b.ab,
        c_bb: b.bb,
    }
}

pub fn partition_horizontal(c: &Matrix6<f64>) -> PartitionEF {
    let b = split(c, &HORIZONTAL_E, &HORIZONTAL_F);
    PartitionEF {
        c_ee: b.aa,
        c_ef: b.ab,
        c_ff: b.bb,
    }
}

/// Running weighted averages of the partially inverted blocks.
#[derive(Debug, Clone, Copy)]
struct MixedAverage {
    a: [usize; 3],
    b: [usize; 3],
    p: Matrix3<f64>,
    q: Matrix3<f64>,
    r: Matrix3<f64>,
    weight: f64,
}

impl MixedAverage {
    fn new(a: [usize; 3], b: [usize; 3]) -> Self {
        MixedAverage {
            a,
            b,
            p: Matrix3::zeros(),
            q: Matrix3::zeros(),
            r: Matrix3::zeros(),
            weight: 0.0,
        }
    }

    /// Returns `None` when the uniform-stress block is not positive definite.
    #[must_use]
    fn add(&mut self, c: &Matrix6<f64>, weight: f64) -> Option<()> {
        let blk = split(c, &self.a, &self.b);
        let aa_inv = blk.aa.cholesky()?.inverse();
        let aa_inv_ab = aa_inv * blk.ab;
        self.p += aa_inv * weight;
        self.q += aa_inv_ab * weight;
        self.r += (blk.bb - blk.ab.transpose() * aa_inv_ab) * weight;
        self.weight += weight;
        Some(())
    }

    fn finish(&self) -> Option<Matrix6<f64>> {
        let p = self.p / self.weight;
        let q = self.q / self.weight;
        let r = self.r / self.weight;
        let p_inv = p.cholesky()?.inverse();
        let p_inv_q = p_inv * q;
        let bb = q.transpose() * p_inv_q + r;
        let c = assemble(
            &Blocks {
                aa: p_inv,
                ab: p_inv_q,
                bb: (bb + bb.transpose()) * 0.5,
            },
            &self.a,
            &self.b,
        );
        Some(c)
    }
}

/// Strip and through-thickness sampling density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    /// Strips across one wavelength (composite midpoint rule in `x`).
    pub n_strips: usize,
    /// Gauss–Legendre points per ply in `z`.
    pub n_z_points: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization {
            n_strips: 256,
            n_z_points: 4,
        }
    }
}

impl Discretization {
    pub fn new(n_strips: usize, n_z_points: usize) -> Result<Self> {
        let d = Discretization {
            n_strips,
            n_z_points,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_strips < MIN_STRIPS {
            return Err(Error::Config(format!(
                "n_strips = {} does not resolve the wavelength (need at least {MIN_STRIPS})",
                self.n_strips
            )));
        }
        if self.n_z_points == 0 {
            return Err(Error::Config("n_z_points must be at least 1".into()));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Discretization {
            n_strips: 2 * self.n_strips,
            n_z_points: 2 * self.n_z_points,
        }
    }
}

/// Through-thickness rule applied inside each ply.
#[derive(Debug, Clone)]
pub enum ZRule {
    /// Gauss–Legendre with the given node count.
    Gauss(usize),
    /// Composite midpoint with the given number of sub-intervals.
    Midpoint(usize),
}

impl ZRule {
    /// Nodes and weights on `[-1, 1]`.
    fn reference(&self) -> Vec<(f64, f64)> {
        match *self {
            ZRule::Gauss(0) | ZRule::Midpoint(0) => Vec::new(),
            ZRule::Gauss(1) => vec![(0.0, 2.0)],
            ZRule::Gauss(n) => GaussLegendre::new(n)
                .expect("degree >= 2")
                .as_node_weight_pairs()
                .to_vec(),
            ZRule::Midpoint(n) => {
                let w = 2.0 / n as f64;
                (0..n).map(|i| (-1.0 + (i as f64 + 0.5) * w, w)).collect()
            }
        }
    }
}

/// Quadrature samples `(z, dz-weight)` covering `[lo, hi]`, split at the
/// midsurface where `|z|` has a kink.
fn ply_samples(lo: f64, hi: f64, reference: &[(f64, f64)], out: &mut Vec<(f64, f64)>) {
    out.clear();
    let mut push = |a: f64, b: f64| {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        out.extend(reference.iter().map(|&(t, w)| (mid + half * t, half * w)));
    };
    if lo < 0.0 && hi > 0.0 {
        push(lo, 0.0);
        push(0.0, hi);
    } else {
        push(lo, hi);
    }
}

fn vertical_mix<F>(
    layup: &Layup,
    x: f64,
    rule: &[(f64, f64)],
    stiffness_at: F,
) -> Result<Matrix6<f64>>
where
    F: Fn(usize, f64) -> Matrix6<f64>,
{
    let z = layup.interfaces();
    let mut acc = MixedAverage::new(VERTICAL_A, VERTICAL_B);
    let mut samples = Vec::with_capacity(2 * rule.len());
    for k in 0..layup.len() {
        ply_samples(z[k], z[k + 1], rule, &mut samples);
        for &(zq, w) in &samples {
            acc.add(&stiffness_at(k, zq), w)
                .ok_or(Error::HomogenizationSingularity { x, ply: k })?;
        }
    }
    acc.finish().ok_or(Error::HomogenizationSingularity {
        x,
        ply: layup.len(),
    })
}

/// Through-thickness homogenization of one strip whose plies have the given
/// (already rotated) stiffnesses, constant inside each ply.
pub fn homogenize_strip(
    layup: &Layup,
    ply_stiffness: &[StiffnessMatrix],
    disc: &Discretization,
) -> Result<StiffnessMatrix> {
    if ply_stiffness.len() != layup.len() {
        return Err(Error::Config(format!(
            "{} ply stiffnesses given for a {}-ply layup",
            ply_stiffness.len(),
            layup.len()
        )));
    }
    let rule = ZRule::Gauss(disc.n_z_points.max(1)).reference();
    let c = vertical_mix(layup, 0.0, &rule, |k, _| *ply_stiffness[k].matrix())?;
    StiffnessMatrix::new(c)
}

/// Through-thickness homogenization of the strip at `x` with a ply
/// stiffness that may vary with `z` inside each ply.
pub fn homogenize_strip_with<F>(
    layup: &Layup,
    x: f64,
    disc: &Discretization,
    stiffness_at: F,
) -> Result<StiffnessMatrix>
where
    F: Fn(usize, f64) -> Matrix6<f64>,
{
    let rule = ZRule::Gauss(disc.n_z_points.max(1)).reference();
    StiffnessMatrix::new(vertical_mix(layup, x, &rule, stiffness_at)?)
}

/// Strip centres of the composite midpoint rule over `[-λ/2, λ/2]`.
pub fn strip_centres(wavelength: f64, n_strips: usize) -> Vec<f64> {
    let dx = wavelength / n_strips as f64;
    (0..n_strips)
        .map(|i| -0.5 * wavelength + (i as f64 + 0.5) * dx)
        .collect()
}

/// Effective stiffness of each strip, in strip order.
pub fn strip_stiffnesses(
    layup: &Layup,
    wrinkle: &WrinkleDescriptor,
    n_strips: usize,
    z_rule: &ZRule,
) -> Result<Vec<(f64, Matrix6<f64>)>> {
    let cbar = layup
        .plies()
        .iter()
        .map(|p| stiffness_from_engineering(&p.material).map(StiffnessMatrix::into_inner))
        .collect::<Result<Vec<_>>>()?;
    let thetas: Vec<f64> = layup.plies().iter().map(|p| p.theta()).collect();
    let rule = z_rule.reference();
    if rule.is_empty() {
        return Err(Error::Config("through-thickness rule has no points".into()));
    }

    strip_centres(wrinkle.wavelength, n_strips)
        .into_par_iter()
        .map(|x| {
            let c = vertical_mix(layup, x, &rule, |k, z| {
                let phi = wrinkle.slope_unchecked(x, z).atan();
                debug_assert!(phi.abs() < FRAC_PI_2);
                rotate_raw(&cbar[k], thetas[k], phi)
            })?;
            Ok((x, c))
        })
        .collect()
}

/// Along-wavelength mixing of equal-width strips, summed in the given order.
pub fn mix_strips(strips: &[(f64, Matrix6<f64>)]) -> Result<StiffnessMatrix> {
    if strips.is_empty() {
        return Err(Error::Config("no strips to mix".into()));
    }
    let mut acc = MixedAverage::new(HORIZONTAL_E, HORIZONTAL_F);
    for (x, c) in strips {
        acc.add(c, 1.0).ok_or(Error::StripSingularity { x: *x })?;
    }
    let c = acc
        .finish()
        .ok_or(Error::StripSingularity { x: f64::NAN })?;
    StiffnessMatrix::new(c)
}

fn homogenize_with_rule(
    layup: &Layup,
    wrinkle: &WrinkleDescriptor,
    n_strips: usize,
    z_rule: &ZRule,
) -> Result<StiffnessMatrix> {
    let strips = strip_stiffnesses(layup, wrinkle, n_strips, z_rule)?;
    mix_strips(&strips)
}

/// Effective stiffness `C**` of one wavelength of the wrinkled laminate.
///
/// Strips are processed in parallel and reduced in strip order, so the
/// result does not depend on the thread count.
pub fn homogenize_wrinkle(
    layup: &Layup,
    wrinkle: &WrinkleDescriptor,
    disc: &Discretization,
) -> Result<StiffnessMatrix> {
    disc.validate()?;
    check_height(layup, wrinkle)?;
    homogenize_with_rule(
        layup,
        wrinkle,
        disc.n_strips,
        &ZRule::Gauss(disc.n_z_points),
    )
}

fn check_height(layup: &Layup, wrinkle: &WrinkleDescriptor) -> Result<()> {
    let h = layup.height();
    if (h - wrinkle.height).abs() > 1e-9 * h {
        return Err(Error::Config(format!(
            "wrinkle height {} mm differs from layup height {h} mm",
            wrinkle.height
        )));
    }
    Ok(())
}

/// Brute-force reference: 4096 strips and a 16-interval composite midpoint
/// rule per ply. Slow; intended for tests and fixture generation.
pub fn oracle_fine_average(layup: &Layup, wrinkle: &WrinkleDescriptor) -> Result<StiffnessMatrix> {
    check_height(layup, wrinkle)?;
    homogenize_with_rule(
        layup,
        wrinkle,
        ORACLE_STRIPS,
        &ZRule::Midpoint(ORACLE_Z_POINTS),
    )
}

/// Largest entry-wise relative difference. Entries smaller than
/// `1e-9 · max|reference|` are compared against that floor instead.
pub fn max_entry_change(candidate: &StiffnessMatrix, reference: &StiffnessMatrix) -> f64 {
    let r = reference.matrix();
    let floor = 1e-9 * r.amax();
    candidate
        .matrix()
        .iter()
        .zip(r.iter())
        .map(|(a, b)| (a - b).abs() / b.abs().max(floor))
        .fold(0.0, f64::max)
}

/// Result of re-running at doubled discretization.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceCheck {
    pub stiffness: StiffnessMatrix,
    pub refined: StiffnessMatrix,
    pub refined_discretization: Discretization,
    pub max_entry_change: f64,
    pub frobenius_change: f64,
    pub tolerance: f64,
    pub converged: bool,
}

/// Homogenizes at `disc` and at twice the strips and z-points, flagging
/// non-convergence when any entry moves by more than `tolerance` (relative).
pub fn homogenize_checked(
    layup: &Layup,
    wrinkle: &WrinkleDescriptor,
    disc: &Discretization,
    tolerance: f64,
) -> Result<ConvergenceCheck> {
    let stiffness = homogenize_wrinkle(layup, wrinkle, disc)?;
    let refined_discretization = disc.doubled();
    let refined = homogenize_wrinkle(layup, wrinkle, &refined_discretization)?;
    let change = max_entry_change(&stiffness, &refined);
    Ok(ConvergenceCheck {
        stiffness,
        refined,
        refined_discretization,
        max_entry_change: change,
        frobenius_change: stiffness.relative_distance(&refined),
        tolerance,
        converged: change <= tolerance,
    })
}

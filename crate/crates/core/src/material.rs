//! Orthotropic material data: engineering constants, Voigt stiffness and
//! compliance, plies and layups.
//!
//! Voigt order throughout the crate is `(xx, yy, zz, yz, zx, xy)` and the
//! strain vector carries engineering shear strains (`γ = 2ε`). Moduli are in
//! GPa, lengths in mm.

use nalgebra::{Matrix6, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const XX: usize = 0;
pub const YY: usize = 1;
pub const ZZ: usize = 2;
pub const YZ: usize = 3;
pub const ZX: usize = 4;
pub const XY: usize = 5;

/// Name under which the carbon/epoxy prepreg ships as a built-in material.
pub const CARBON_EPOXY: &str = "carbon-epoxy-table4";

/// Nine independent constants of an orthotropic solid.
///
/// Poisson ratios follow the "strain in the first index, load in the second"
/// reading: `nu21` is the lateral contraction along axis 2 under uniaxial
/// stress along axis 1, so the compliance entries are
/// `S21 = -nu21/E11`, `S31 = -nu31/E11`, `S32 = -nu32/E22`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineeringConstants {
    pub e11: f64,
    pub e22: f64,
    pub e33: f64,
    pub g23: f64,
    pub g31: f64,
    pub g12: f64,
    pub nu21: f64,
    pub nu32: f64,
    pub nu31: f64,
}

impl EngineeringConstants {
    /// Unidirectional carbon/epoxy prepreg used for all built-in presets.
    pub const fn carbon_epoxy() -> Self {
        EngineeringConstants {
            e11: 133.3,
            e22: 9.09,
            e33: 9.09,
            g23: 3.16,
            g31: 7.24,
            g12: 7.23,
            nu21: 0.261,
            nu32: 0.436,
            nu31: 0.261,
        }
    }

    /// Isotropic solid with Young's modulus `e` and Poisson ratio `nu`.
    pub fn isotropic(e: f64, nu: f64) -> Self {
        let g = e / (2.0 * (1.0 + nu));
        EngineeringConstants {
            e11: e,
            e22: e,
            e33: e,
            g23: g,
            g31: g,
            g12: g,
            nu21: nu,
            nu32: nu,
            nu31: nu,
        }
    }

    /// Looks up a built-in material by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            CARBON_EPOXY => Some(Self::carbon_epoxy()),
            _ => None,
        }
    }

    fn check_moduli(&self) -> Result<()> {
        let moduli = [
            ("E11", self.e11),
            ("E22", self.e22),
            ("E33", self.e33),
            ("G23", self.g23),
            ("G31", self.g31),
            ("G12", self.g12),
        ];
        for (name, value) in moduli {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidMaterial(format!(
                    "{name} must be a positive finite modulus, got {value}"
                )));
            }
        }
        for (name, value) in [
            ("nu21", self.nu21),
            ("nu32", self.nu32),
            ("nu31", self.nu31),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidMaterial(format!("{name} is not finite")));
            }
        }
        Ok(())
    }

    /// Orthotropic compliance assembled from the constants (not validated).
    pub fn compliance_matrix(&self) -> Matrix6<f64> {
        let mut s = Matrix6::zeros();
        s[(XX, XX)] = 1.0 / self.e11;
        s[(YY, YY)] = 1.0 / self.e22;
        s[(ZZ, ZZ)] = 1.0 / self.e33;
        s[(YZ, YZ)] = 1.0 / self.g23;
        s[(ZX, ZX)] = 1.0 / self.g31;
        s[(XY, XY)] = 1.0 / self.g12;
        let s21 = -self.nu21 / self.e11;
        let s31 = -self.nu31 / self.e11;
        let s32 = -self.nu32 / self.e22;
        s[(XX, YY)] = s21;
        s[(YY, XX)] = s21;
        s[(XX, ZZ)] = s31;
        s[(ZZ, XX)] = s31;
        s[(YY, ZZ)] = s32;
        s[(ZZ, YY)] = s32;
        s
    }
}

/// Symmetric positive definite 6×6 stiffness in Voigt notation (GPa).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessMatrix(Matrix6<f64>);

/// Inverse of a [`StiffnessMatrix`] (GPa⁻¹). Same invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplianceMatrix(Matrix6<f64>);

const SYMMETRY_TOL: f64 = 1e-12;

fn validated_spd(m: Matrix6<f64>, what: &str) -> Result<Matrix6<f64>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularMatrix(format!(
            "{what} has non-finite entries"
        )));
    }
    let scale = m.amax();
    if scale == 0.0 {
        return Err(Error::SingularMatrix(format!("{what} is zero")));
    }
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::SingularMatrix(format!(
            "{what} is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let sym = (m + m.transpose()) * 0.5;
    if sym.cholesky().is_none() {
        return Err(Error::SingularMatrix(format!(
            "{what} is not positive definite"
        )));
    }
    Ok(sym)
}

fn spd_inverse(m: &Matrix6<f64>, what: &str) -> Result<Matrix6<f64>> {
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::SingularMatrix(format!("{what} is not positive definite")))?;
    let inv = chol.inverse();
    Ok((inv + inv.transpose()) * 0.5)
}

impl StiffnessMatrix {
    /// Validates symmetry (1e-12 relative) and positive definiteness, then
    /// stores the exactly symmetrized matrix.
    pub fn new(m: Matrix6<f64>) -> Result<Self> {
        validated_spd(m, "stiffness").map(StiffnessMatrix)
    }

    pub fn identity() -> Self {
        StiffnessMatrix(Matrix6::identity())
    }

    pub fn from_diagonal(d: [f64; 6]) -> Result<Self> {
        Self::new(Matrix6::from_diagonal(&d.into()))
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Matrix6<f64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn eigenvalues(&self) -> [f64; 6] {
        let e = SymmetricEigen::new(self.0).eigenvalues;
        let mut out = [0.0; 6];
        out.copy_from_slice(e.as_slice());
        out.sort_by(|a, b| a.total_cmp(b));
        out
    }

    /// Row-major nested array, convenient for serialization.
    pub fn to_rows(&self) -> [[f64; 6]; 6] {
        let mut rows = [[0.0; 6]; 6];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[(i, j)];
            }
        }
        rows
    }

    /// Frobenius norm of `self - other` divided by the Frobenius norm of `other`.
    pub fn relative_distance(&self, other: &StiffnessMatrix) -> f64 {
        (self.0 - other.0).norm() / other.0.norm()
    }
}

impl ComplianceMatrix {
    pub fn new(m: Matrix6<f64>) -> Result<Self> {
        validated_spd(m, "compliance").map(ComplianceMatrix)
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn stiffness(&self) -> Result<StiffnessMatrix> {
        spd_inverse(&self.0, "compliance").and_then(StiffnessMatrix::new)
    }
}

/// Builds the stiffness of an orthotropic material in its principal axes.
pub fn stiffness_from_engineering(ec: &EngineeringConstants) -> Result<StiffnessMatrix> {
    ec.check_moduli()?;
    let s = ec.compliance_matrix();
    let s = (s + s.transpose()) * 0.5;
    let chol = s.cholesky().ok_or_else(|| {
        Error::InadmissibleMaterial(format!(
            "Poisson ratios nu21 = {}, nu32 = {}, nu31 = {}",
            ec.nu21, ec.nu32, ec.nu31
        ))
    })?;
    let c = chol.inverse();
    StiffnessMatrix::new((c + c.transpose()) * 0.5)
}

/// Inverse of a stiffness matrix.
pub fn compliance(c: &StiffnessMatrix) -> Result<ComplianceMatrix> {
    spd_inverse(&c.0, "stiffness").and_then(ComplianceMatrix::new)
}

/// Reads apparent engineering constants off the compliance of `c`.
///
/// Exact for orthotropic matrices; for matrices with shear/normal coupling the
/// values are the apparent moduli along each Voigt axis.
pub fn effective_engineering_constants(c: &StiffnessMatrix) -> Result<EngineeringConstants> {
    let s = compliance(c)?;
    let e11 = 1.0 / s.get(XX, XX);
    let e22 = 1.0 / s.get(YY, YY);
    Ok(EngineeringConstants {
        e11,
        e22,
        e33: 1.0 / s.get(ZZ, ZZ),
        g23: 1.0 / s.get(YZ, YZ),
        g31: 1.0 / s.get(ZX, ZX),
        g12: 1.0 / s.get(XY, XY),
        nu21: -s.get(YY, XX) * e11,
        nu32: -s.get(ZZ, YY) * e22,
        nu31: -s.get(ZZ, XX) * e11,
    })
}

/// One ply: in-plane fiber angle in degrees, thickness in mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ply {
    pub theta_deg: f64,
    pub thickness: f64,
    pub material: EngineeringConstants,
}

impl Ply {
    pub fn new(theta_deg: f64, thickness: f64, material: EngineeringConstants) -> Result<Self> {
        if !(thickness.is_finite() && thickness > 0.0) {
            return Err(Error::Config(format!(
                "ply thickness must be positive, got {thickness}"
            )));
        }
        if !theta_deg.is_finite() {
            return Err(Error::Config("ply angle is not finite".into()));
        }
        Ok(Ply {
            theta_deg,
            thickness,
            material,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta_deg.to_radians()
    }
}

/// Bottom-to-top stack of plies.
#[derive(Debug, Clone, PartialEq)]
pub struct Layup {
    plies: Vec<Ply>,
}

impl Layup {
    pub fn new(plies: Vec<Ply>) -> Result<Self> {
        if plies.is_empty() {
            return Err(Error::Config("a layup needs at least one ply".into()));
        }
        Ok(Layup { plies })
    }

    /// Builds a layup of equal-thickness plies of one material.
    pub fn uniform(
        angles_deg: &[f64],
        thickness: f64,
        material: EngineeringConstants,
    ) -> Result<Self> {
        let plies = angles_deg
            .iter()
            .map(|&a| Ply::new(a, thickness, material))
            .collect::<Result<Vec<_>>>()?;
        Self::new(plies)
    }

    /// Parses stacking notation such as `[0/90]_2s`, `[0/90/±45/0]_3s` or
    /// `[0]_30` into a layup of equal-thickness plies.
    pub fn from_notation(
        notation: &str,
        thickness: f64,
        material: EngineeringConstants,
    ) -> Result<Self> {
        let angles = parse_stacking(notation)?;
        Self::uniform(&angles, thickness, material)
    }

    pub fn plies(&self) -> &[Ply] {
        &self.plies
    }

    pub fn len(&self) -> usize {
        self.plies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plies.is_empty()
    }

    /// Total height `h` in mm.
    pub fn height(&self) -> f64 {
        self.plies.iter().map(|p| p.thickness).sum()
    }

    /// Flat interface coordinates measured from the midsurface, from `-h/2`
    /// to `+h/2` (`n + 1` values).
    pub fn interfaces(&self) -> Vec<f64> {
        let h = self.height();
        let mut z = -0.5 * h;
        let mut out = Vec::with_capacity(self.plies.len() + 1);
        out.push(z);
        for (k, p) in self.plies.iter().enumerate() {
            z += p.thickness;
            if k + 1 == self.plies.len() {
                z = 0.5 * h;
            }
            out.push(z);
        }
        out
    }
}

/// Expands stacking-sequence notation into a list of ply angles (degrees).
pub fn parse_stacking(notation: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Parse(format!("layup `{notation}`: {why}"));
    let s: String = notation.chars().filter(|c| !c.is_whitespace()).collect();
    let open = s.strip_prefix('[').ok_or_else(|| bad("expected `[`"))?;
    let close = open.find(']').ok_or_else(|| bad("missing `]`"))?;
    let body = &open[..close];
    let suffix = open[close + 1..].trim_start_matches('_');

    let mut base = Vec::new();
    for item in body.split('/') {
        if item.is_empty() {
            return Err(bad("empty ply entry"));
        }
        let (signs, rest): (&[f64], &str) = if let Some(r) = item.strip_prefix('±') {
            (&[1.0, -1.0], r)
        } else if let Some(r) = item.strip_prefix("+-") {
            (&[1.0, -1.0], r)
        } else if let Some(r) = item.strip_prefix('∓') {
            (&[-1.0, 1.0], r)
        } else if let Some(r) = item.strip_prefix("-+") {
            (&[-1.0, 1.0], r)
        } else {
            (&[1.0], item)
        };
        let angle: f64 = rest
            .parse()
            .map_err(|_| bad(&format!("bad angle `{item}`")))?;
        base.extend(signs.iter().map(|sg| sg * angle));
    }

    let (count, symmetric) = match suffix.strip_suffix(['s', 'S']) {
        Some(n) => (n, true),
        None => (suffix, false),
    };
    let repeat: usize = if count.is_empty() {
        1
    } else {
        count
            .parse()
            .map_err(|_| bad(&format!("bad repeat count `{count}`")))?
    };
    if repeat == 0 {
        return Err(bad("repeat count must be positive"));
    }
    let mut half: Vec<f64> = Vec::with_capacity(base.len() * repeat);
    for _ in 0..repeat {
        half.extend_from_slice(&base);
    }
    if symmetric {
        let mirrored: Vec<f64> = half.iter().rev().copied().collect();
        half.extend(mirrored);
    }
    Ok(half)
}

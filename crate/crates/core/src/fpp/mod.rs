//! Fringe projection: three-step phase extraction, phase-to-height mapping,
//! regridding of point clouds and out-of-plane displacement extraction.
//!
//! Grids are stored with rows along `y` and columns along `x`; node `(j, i)`
//! sits at `(x0 + i·dx, y0 + j·dy)`.

mod hull;
mod scatter;
pub mod spline;

use std::collections::HashMap;
use std::f64::consts::PI;

use ndarray::{Array2, Axis, Zip};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shearography::PhaseMap;

pub use hull::{contains as hull_contains, convex_hull, polygon_area};
use scatter::{mls_value, PointIndex};
use spline::CubicSpline;

/// Phase shift between consecutive fringe patterns.
pub const PHASE_STEP: f64 = 2.0 * PI / 3.0;

/// Captured fringe pattern, non-negative intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityImage {
    pub data: Array2<f64>,
    pub pixel_pitch: f64,
}

impl IntensityImage {
    pub fn new(data: Array2<f64>, pixel_pitch: f64) -> Result<Self> {
        if !(pixel_pitch.is_finite() && pixel_pitch > 0.0) {
            return Err(Error::Config(format!(
                "pixel pitch must be positive, got {pixel_pitch}"
            )));
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config(
                "intensities must be finite and non-negative".into(),
            ));
        }
        Ok(IntensityImage { data, pixel_pitch })
    }
}

/// Forward fringe model `I_k = a + b·cos(φ + (k − 1)·2π/3)`, `k = 1, 2, 3`.
pub fn fringe_images(
    phase: &Array2<f64>,
    a: f64,
    b: f64,
    pixel_pitch: f64,
) -> Result<[IntensityImage; 3]> {
    let make = |k: f64| {
        IntensityImage::new(
            phase.mapv(|p| a + b * (p + k * PHASE_STEP).cos()),
            pixel_pitch,
        )
    };
    Ok([make(0.0)?, make(1.0)?, make(2.0)?])
}

/// Wrapped phase with per-pixel modulation and validity.
#[derive(Debug, Clone)]
pub struct FringePhase {
    /// Wrapped phase; masked pixels hold 0.
    pub phase: PhaseMap,
    /// Recovered fringe amplitude `b`.
    pub modulation: Array2<f64>,
    /// `true` where the modulation reached the threshold.
    pub valid: Array2<bool>,
}

/// Three-step phase shifting for the model of [`fringe_images`]:
/// `φ = atan2(√3·(I₃ − I₂), 2I₁ − I₂ − I₃)`.
///
/// Pixels whose modulation is below `min_modulation` are masked; if no pixel
/// survives the input is degenerate.
pub fn extract_phase_3step(
    i1: &IntensityImage,
    i2: &IntensityImage,
    i3: &IntensityImage,
    min_modulation: f64,
) -> Result<FringePhase> {
    if i1.data.dim() != i2.data.dim() || i1.data.dim() != i3.data.dim() {
        return Err(Error::Config("fringe images differ in shape".into()));
    }
    let dim = i1.data.dim();
    let mut phase = Array2::zeros(dim);
    let mut modulation = Array2::zeros(dim);
    let mut valid = Array2::from_elem(dim, false);
    Zip::from(&mut phase)
        .and(&mut modulation)
        .and(&mut valid)
        .and(&i1.data)
        .and(&i2.data)
        .and(&i3.data)
        .for_each(|p, m, ok, &a, &b, &c| {
            let s = 3f64.sqrt() * (c - b);
            let k = 2.0 * a - b - c;
            *m = s.hypot(k) / 3.0;
            if *m >= min_modulation && *m > 0.0 {
                *ok = true;
                let v = s.atan2(k);
                // atan2 returns [-π, π]; fold -π onto π.
                *p = if v <= -PI { PI } else { v };
            }
        });
    if !valid.iter().any(|&v| v) {
        return Err(Error::DegenerateInput(
            "fringe modulation is zero everywhere".into(),
        ));
    }
    Ok(FringePhase {
        phase: PhaseMap {
            data: phase,
            pixel_pitch: i1.pixel_pitch,
            wrapped: true,
        },
        modulation,
        valid,
    })
}

/// Regular X–Y grid layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// `(x0, y0)` of node `(0, 0)`, mm.
    pub origin: [f64; 2],
    /// `(dx, dy)`, mm.
    pub spacing: [f64; 2],
    /// `(nx, ny)`: columns and rows.
    pub counts: [usize; 2],
}

impl GridSpec {
    pub fn new(origin: [f64; 2], spacing: [f64; 2], counts: [usize; 2]) -> Result<Self> {
        let g = GridSpec {
            origin,
            spacing,
            counts,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.spacing.iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(Error::Config("grid spacing must be positive".into()));
        }
        if !self.origin.iter().all(|o| o.is_finite()) {
            return Err(Error::Config("grid origin must be finite".into()));
        }
        if self.counts.contains(&0) {
            return Err(Error::Config(
                "grid needs at least one node per axis".into(),
            ));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin[0] + i as f64 * self.spacing[0]
    }

    pub fn y(&self, j: usize) -> f64 {
        self.origin[1] + j as f64 * self.spacing[1]
    }

    /// `(rows, cols)` of the value array.
    pub fn shape(&self) -> (usize, usize) {
        (self.counts[1], self.counts[0])
    }
}

/// Height (or displacement) samples on a regular grid. Masked nodes hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightGrid {
    pub spec: GridSpec,
    pub values: Array2<f64>,
    pub valid: Array2<bool>,
}

impl HeightGrid {
    pub fn new(spec: GridSpec, values: Array2<f64>, valid: Array2<bool>) -> Result<Self> {
        spec.validate()?;
        if values.dim() != spec.shape() || valid.dim() != spec.shape() {
            return Err(Error::Config(
                "grid arrays do not match the grid spec".into(),
            ));
        }
        let mut values = values;
        Zip::from(&mut values).and(&valid).for_each(|v, &ok| {
            if !ok {
                *v = f64::NAN;
            }
        });
        Ok(HeightGrid {
            spec,
            values,
            valid,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.valid[(row, col)].then(|| self.values[(row, col)])
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Supported nodes as a point cloud.
    pub fn to_point_cloud(&self) -> PointCloud {
        let mut points = Vec::with_capacity(self.valid_count());
        for ((j, i), &ok) in self.valid.indexed_iter() {
            if ok {
                points.push([self.spec.x(i), self.spec.y(j), self.values[(j, i)]]);
            }
        }
        PointCloud { points }
    }

    /// Largest supported value by magnitude, with its `(row, col)`.
    pub fn peak(&self) -> Option<(f64, (usize, usize))> {
        self.valid
            .indexed_iter()
            .filter(|(_, &ok)| ok)
            .map(|(idx, _)| (self.values[idx], idx))
            .max_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
    }
}

/// `z = k_cal·(φ − φ_ref)` on the pixel grid of `phase`.
pub fn phase_to_height(phase: &PhaseMap, k_cal: f64, reference: &PhaseMap) -> Result<HeightGrid> {
    if phase.dim() != reference.dim() {
        return Err(Error::Config(format!(
            "phase map {:?} and reference {:?} differ in shape",
            phase.dim(),
            reference.dim()
        )));
    }
    if !k_cal.is_finite() {
        return Err(Error::Config("calibration constant must be finite".into()));
    }
    let (rows, cols) = phase.dim();
    let spec = GridSpec::new([0.0, 0.0], [phase.pixel_pitch; 2], [cols, rows])?;
    let values = (&phase.data - &reference.data).mapv(|d| k_cal * d);
    HeightGrid::new(spec, values, Array2::from_elem((rows, cols), true))
}

/// Scattered 3D points, mm.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<[f64; 3]>,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 3]>) -> Result<Self> {
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "point cloud has non-finite coordinates".into(),
            ));
        }
        Ok(PointCloud { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Mean `(x, y)`.
    pub fn centroid_xy(&self) -> [f64; 2] {
        let n = self.points.len().max(1) as f64;
        let (sx, sy) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(a, b), p| (a + p[0], b + p[1]));
        [sx / n, sy / n]
    }
}

/// Tuning for [`regrid_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegridOptions {
    /// MLS support radius in multiples of the mean point spacing.
    pub support: f64,
    /// Use tensor-product splines when the cloud is a complete lattice.
    pub detect_lattice: bool,
}

impl Default for RegridOptions {
    fn default() -> Self {
        RegridOptions {
            support: 3.5,
            detect_lattice: true,
        }
    }
}

/// Interpolates the cloud's heights onto `grid` with cubic accuracy.
/// Nodes outside the cloud's convex hull are masked.
pub fn regrid(cloud: &PointCloud, grid: &GridSpec) -> Result<HeightGrid> {
    regrid_with(cloud, grid, &RegridOptions::default())
}

pub fn regrid_with(
    cloud: &PointCloud,
    grid: &GridSpec,
    opts: &RegridOptions,
) -> Result<HeightGrid> {
    grid.validate()?;
    if cloud.len() < 4 {
        return Err(Error::DegenerateInput(format!(
            "regridding needs at least 4 points, got {}",
            cloud.len()
        )));
    }
    let xy: Vec<[f64; 2]> = cloud.points.iter().map(|p| [p[0], p[1]]).collect();
    let hull = convex_hull(&xy);
    let area = polygon_area(&hull);
    let (lo, hi) = xy.iter().fold(
        ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]),
        |(lo, hi), p| {
            (
                [lo[0].min(p[0]), lo[1].min(p[1])],
                [hi[0].max(p[0]), hi[1].max(p[1])],
            )
        },
    );
    let diag = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
    if !(area > 1e-12 * diag * diag) {
        return Err(Error::DegenerateInput("point cloud is collinear".into()));
    }
    let tol = 1e-9 * diag;
    let (rows, cols) = grid.shape();
    let inside = Array2::from_shape_fn((rows, cols), |(j, i)| {
        hull_contains(&hull, [grid.x(i), grid.y(j)], tol)
    });

    let lattice = if opts.detect_lattice {
        Lattice::detect(cloud, diag)
    } else {
        None
    };
    let mut values = Array2::from_elem((rows, cols), f64::NAN);
    let mut valid = inside.clone();
    match lattice {
        Some(lat) => lat.evaluate(grid, &inside, &mut values)?,
        None => {
            let spacing = (area / cloud.len() as f64).sqrt();
            let radius = opts.support * spacing;
            let index = PointIndex::new(&cloud.points, radius);
            Zip::from(values.axis_iter_mut(Axis(0)))
                .and(valid.axis_iter_mut(Axis(0)))
                .and(inside.axis_iter(Axis(0)))
                .and(&ndarray::Array1::from_iter(0..rows))
                .par_for_each(|mut vrow, mut okrow, inrow, &j| {
                    let mut scratch = Vec::new();
                    for i in 0..cols {
                        if !inrow[i] {
                            continue;
                        }
                        match mls_value(&index, grid.x(i), grid.y(j), radius, &mut scratch) {
                            Some(v) => vrow[i] = v,
                            None => okrow[i] = false,
                        }
                    }
                });
        }
    }
    HeightGrid::new(*grid, values, valid)
}

/// A cloud whose points form a complete rectilinear lattice.
struct Lattice {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// `z[(row along y, col along x)]`.
    z: Array2<f64>,
}

fn unique_sorted(mut v: Vec<f64>, tol: f64) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= tol);
    v
}

fn locate(sorted: &[f64], v: f64, tol: f64) -> Option<usize> {
    let k = sorted.partition_point(|&s| s < v - tol);
    (k < sorted.len() && (sorted[k] - v).abs() <= tol).then_some(k)
}

impl Lattice {
    fn detect(cloud: &PointCloud, diag: f64) -> Option<Self> {
        let tol = 1e-9 * diag;
        let xs = unique_sorted(cloud.points.iter().map(|p| p[0]).collect(), tol);
        let ys = unique_sorted(cloud.points.iter().map(|p| p[1]).collect(), tol);
        if xs.len() < 4 || ys.len() < 4 || xs.len() * ys.len() != cloud.len() {
            return None;
        }
        let mut z = Array2::from_elem((ys.len(), xs.len()), f64::NAN);
        let mut seen: HashMap<(usize, usize), ()> = HashMap::with_capacity(cloud.len());
        for p in &cloud.points {
            let key = (locate(&ys, p[1], tol)?, locate(&xs, p[0], tol)?);
            if seen.insert(key, ()).is_some() {
                return None;
            }
            z[key] = p[2];
        }
        Some(Lattice { xs, ys, z })
    }

    fn evaluate(
        &self,
        grid: &GridSpec,
        inside: &Array2<bool>,
        out: &mut Array2<f64>,
    ) -> Result<()> {
        let (rows, cols) = grid.shape();
        let qx: Vec<f64> = (0..cols).map(|i| grid.x(i)).collect();
        // Pass 1: along x for every lattice row.
        let along_x: Vec<Vec<f64>> = self
            .z
            .axis_iter(Axis(0))
            .into_par_iter()
            .map(|row| {
                let s = CubicSpline::new(self.xs.clone(), row.to_vec())?;
                Ok(qx.iter().map(|&x| s.eval(x)).collect())
            })
            .collect::<Result<_>>()?;
        // Pass 2: along y for every query column.
        for i in 0..cols {
            if !(0..rows).any(|j| inside[(j, i)]) {
                continue;
            }
            let col: Vec<f64> = along_x.iter().map(|r| r[i]).collect();
            let s = CubicSpline::new(self.ys.clone(), col)?;
            for j in 0..rows {
                if inside[(j, i)] {
                    out[(j, i)] = s.eval(grid.y(j));
                }
            }
        }
        Ok(())
    }
}

/// Out-of-plane displacement between two scans plus drift diagnostics.
#[derive(Debug, Clone)]
pub struct Displacement {
    /// `after − before` on nodes supported by both clouds.
    pub field: HeightGrid,
    /// Centroid shift `(dx, dy)` of `after` relative to `before`, mm.
    pub in_plane_drift: [f64; 2],
    /// Drift exceeds 10% of the grid spacing; the out-of-plane reading is
    /// then contaminated by in-plane motion.
    pub drift_warning: bool,
}

/// Regrids both clouds onto `grid` and subtracts the heights.
pub fn displacement_extract(
    before: &PointCloud,
    after: &PointCloud,
    grid: &GridSpec,
) -> Result<Displacement> {
    let (b, a) = rayon::join(|| regrid(before, grid), || regrid(after, grid));
    let (b, a) = (b?, a?);
    let valid = Zip::from(&b.valid)
        .and(&a.valid)
        .map_collect(|&x, &y| x && y);
    if !valid.iter().any(|&v| v) {
        return Err(Error::NoOverlap);
    }
    let values = &a.values - &b.values;
    let field = HeightGrid::new(*grid, values, valid)?;

    let (cb, ca) = (before.centroid_xy(), after.centroid_xy());
    let drift = [ca[0] - cb[0], ca[1] - cb[1]];
    let limit = 0.1 * grid.spacing[0].min(grid.spacing[1]);
    let drift_warning = drift[0].hypot(drift[1]) > limit;
    if drift_warning {
        log::warn!(
            "in-plane drift ({:.4}, {:.4}) mm exceeds 10% of the grid spacing",
            drift[0],
            drift[1]
        );
    }
    Ok(Displacement {
        field,
        in_plane_drift: drift,
        drift_warning,
    })
}

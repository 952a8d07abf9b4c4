//! Shear-phase post-processing: wrapping, Itoh unwrapping, and integration of
//! the displacement derivative into out-of-plane displacement.
//!
//! Maps are stored row-major with rows along `y`, the shear direction. A
//! shearogram measures
//!
//! ```text
//! ΔΦ_y = 4π/λ_L · ∂w/∂y · Δy
//! ```
//!
//! so `w` follows by integrating `λ_L ΔΦ_y / (4π Δy)` along each column.
//! Units: `λ_L` and `w` in nm, `Δy` and pixel pitch in mm.

use std::f64::consts::{PI, TAU};

use ndarray::{Array2, ArrayView1, Axis, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// He-Ne wavelength, nm.
pub const HE_NE_WAVELENGTH_NM: f64 = 632.8;

/// 2D phase field in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    pub data: Array2<f64>,
    /// mm per pixel along both axes.
    pub pixel_pitch: f64,
    /// Values are known only modulo 2π and lie in `(-π, π]`.
    pub wrapped: bool,
}

impl PhaseMap {
    pub fn new(data: Array2<f64>, pixel_pitch: f64, wrapped: bool) -> Result<Self> {
        if !(pixel_pitch.is_finite() && pixel_pitch > 0.0) {
            return Err(Error::Config(format!(
                "pixel pitch must be positive, got {pixel_pitch}"
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("phase map contains non-finite values".into()));
        }
        if wrapped && data.iter().any(|&v| !(v > -PI && v <= PI)) {
            return Err(Error::Config(
                "wrapped phase map has values outside (-π, π]".into(),
            ));
        }
        Ok(PhaseMap {
            data,
            pixel_pitch,
            wrapped,
        })
    }

    pub fn unwrapped(data: Array2<f64>, pixel_pitch: f64) -> Result<Self> {
        Self::new(data, pixel_pitch, false)
    }

    pub fn dim(&self) -> (usize, usize) {
        self.data.dim()
    }
}

/// Shearing interferometer parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShearConfig {
    /// Laser wavelength, nm.
    #[serde(default = "default_laser")]
    pub laser_wavelength: f64,
    /// Shear amount Δy, mm. May be negative.
    pub shear: f64,
    /// `(row, col)` of the zero-displacement reference pixel.
    #[serde(default)]
    pub reference_point: (usize, usize),
}

fn default_laser() -> f64 {
    HE_NE_WAVELENGTH_NM
}

impl ShearConfig {
    pub fn new(laser_wavelength: f64, shear: f64, reference_point: (usize, usize)) -> Result<Self> {
        let cfg = ShearConfig {
            laser_wavelength,
            shear,
            reference_point,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.laser_wavelength.is_finite() && self.laser_wavelength > 0.0) {
            return Err(Error::Config("laser wavelength must be positive".into()));
        }
        if !self.shear.is_finite() || self.shear == 0.0 {
            return Err(Error::Config(
                "shear amount must be finite and non-zero".into(),
            ));
        }
        Ok(())
    }

    /// Displacement gradient (nm/mm) per radian of shear phase.
    pub fn gradient_per_radian(&self) -> f64 {
        self.laser_wavelength / (4.0 * PI * self.shear)
    }
}

/// Reduces an angle into `(-π, π]`.
pub fn wrap(v: f64) -> f64 {
    let r = v.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Wraps every value of an unwrapped map into `(-π, π]`.
pub fn wrap_phase(p: &PhaseMap) -> PhaseMap {
    PhaseMap {
        data: p.data.mapv(wrap),
        pixel_pitch: p.pixel_pitch,
        wrapped: true,
    }
}

/// Itoh unwrapping: accumulate wrapped differences from the first sample.
pub fn unwrap_1d(wrapped: ArrayView1<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(wrapped.len());
    let mut iter = wrapped.iter();
    if let Some(&first) = iter.next() {
        out.push(first);
        let mut prev_in = first;
        let mut prev_out = first;
        for &v in iter {
            prev_out += wrap(v - prev_in);
            prev_in = v;
            out.push(prev_out);
        }
    }
    out
}

/// Unwrapped map plus a consistency diagnostic.
#[derive(Debug, Clone)]
pub struct UnwrapResult {
    pub phase: PhaseMap,
    /// Horizontally adjacent pixel pairs whose unwrapped phases still differ
    /// by π or more. Zero for clean, adequately sampled fringes.
    pub residues: usize,
}

/// Unwraps the first row along `x`, then every column along `y` starting
/// from that row.
pub fn unwrap_map(p: &PhaseMap) -> UnwrapResult {
    let (rows, cols) = p.dim();
    let mut out = Array2::zeros((rows, cols));
    if rows > 0 && cols > 0 {
        let first_row = unwrap_1d(p.data.row(0));
        Zip::from(out.axis_iter_mut(Axis(1)))
            .and(p.data.axis_iter(Axis(1)))
            .and(&ndarray::Array1::from(first_row))
            .par_for_each(|mut out_col, in_col, &start| {
                let col = unwrap_1d(in_col);
                let offset = start - col[0];
                for (o, v) in out_col.iter_mut().zip(col) {
                    *o = v + offset;
                }
            });
    }
    let residues = if cols > 1 {
        out.rows()
            .into_iter()
            .map(|r| {
                r.windows(2)
                    .into_iter()
                    .filter(|w| (w[1] - w[0]).abs() >= PI)
                    .count()
            })
            .sum()
    } else {
        0
    };
    UnwrapResult {
        phase: PhaseMap {
            data: out,
            pixel_pitch: p.pixel_pitch,
            wrapped: false,
        },
        residues,
    }
}

/// Out-of-plane displacement (nm) from an unwrapped shear-phase map.
///
/// Every column is integrated along `y` from the first row with the
/// trapezoid rule; the value at the reference pixel is then subtracted from
/// the whole field, so moving the reference only shifts `w` by a constant.
pub fn integrate_displacement(p: &PhaseMap, cfg: &ShearConfig) -> Result<Array2<f64>> {
    cfg.validate()?;
    if p.wrapped {
        return Err(Error::Config(
            "phase map must be unwrapped before integration".into(),
        ));
    }
    let (rows, cols) = p.dim();
    let (r0, c0) = cfg.reference_point;
    if r0 >= rows || c0 >= cols {
        return Err(Error::Config(format!(
            "reference point ({r0}, {c0}) lies outside the {rows}×{cols} map"
        )));
    }
    let scale = cfg.gradient_per_radian() * p.pixel_pitch * 0.5;
    let mut w = Array2::zeros((rows, cols));
    Zip::from(w.axis_iter_mut(Axis(1)))
        .and(p.data.axis_iter(Axis(1)))
        .par_for_each(|mut w_col, phase_col| {
            let mut acc = 0.0;
            for i in 1..rows {
                acc += scale * (phase_col[i - 1] + phase_col[i]);
                w_col[i] = acc;
            }
        });
    let reference = w[(r0, c0)];
    w.mapv_inplace(|v| v - reference);
    Ok(w)
}

/// Forward model: shear phase of a displacement field `w` (nm) sampled with
/// pitch `pixel_pitch` (mm). `∂w/∂y` uses second-order central differences
/// inside and second-order one-sided differences at the first and last rows.
/// The result is unwrapped; pass it through [`wrap_phase`] to mimic a
/// measured fringe pattern.
pub fn simulate_shear_phase(
    w: &Array2<f64>,
    pixel_pitch: f64,
    cfg: &ShearConfig,
) -> Result<PhaseMap> {
    cfg.validate()?;
    let (rows, cols) = w.dim();
    let mut grad = Array2::zeros((rows, cols));
    if rows >= 3 {
        let h = pixel_pitch;
        for c in 0..cols {
            grad[(0, c)] = (-3.0 * w[(0, c)] + 4.0 * w[(1, c)] - w[(2, c)]) / (2.0 * h);
            for r in 1..rows - 1 {
                grad[(r, c)] = (w[(r + 1, c)] - w[(r - 1, c)]) / (2.0 * h);
            }
            let n = rows - 1;
            grad[(n, c)] = (3.0 * w[(n, c)] - 4.0 * w[(n - 1, c)] + w[(n - 2, c)]) / (2.0 * h);
        }
    } else if rows == 2 {
        for c in 0..cols {
            let g = (w[(1, c)] - w[(0, c)]) / pixel_pitch;
            grad[(0, c)] = g;
            grad[(1, c)] = g;
        }
    }
    let k = 1.0 / cfg.gradient_per_radian();
    PhaseMap::unwrapped(grad.mapv(|g| g * k), pixel_pitch)
}

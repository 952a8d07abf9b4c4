//! Graded cosine wrinkle: shape, slope and fiber misalignment.
//!
//! The wrinkle occupies one wavelength `|x| ≤ λ/2` of a laminate of height
//! `h` (`|z| ≤ h/2`, measured from the midsurface). Its amplitude decays
//! linearly from `A` at the midsurface to zero at both outer surfaces:
//!
//! ```text
//! W(x, z) = A · (h − 2|z|)/h · cos(2πx/λ)
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::Layup;

/// Severity ratios `A/λ` and the maximum misalignment angles (degrees) they
/// produce, over the tabulated wrinkle range.
pub const SEVERITY_TABLE: [(f64, f64); 9] = [
    (0.10, 32.14),
    (0.15, 43.30),
    (0.20, 51.49),
    (0.25, 57.52),
    (0.30, 62.05),
    (0.35, 65.55),
    (0.40, 68.30),
    (0.45, 70.52),
    (0.50, 72.34),
];

// Slack on the domain bounds so that strip edges computed in floating point
// are not rejected.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrinkleDescriptor {
    /// Amplitude `A` (mm).
    pub amplitude: f64,
    /// Wavelength `λ` (mm).
    pub wavelength: f64,
    /// Laminate height `h` (mm).
    pub height: f64,
}

impl WrinkleDescriptor {
    pub fn new(amplitude: f64, wavelength: f64, height: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::Config(format!(
                "wrinkle amplitude must be >= 0, got {amplitude}"
            )));
        }
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::Config(format!(
                "wrinkle wavelength must be > 0, got {wavelength}"
            )));
        }
        if !(height.is_finite() && height > 0.0) {
            return Err(Error::Config(format!(
                "laminate height must be > 0, got {height}"
            )));
        }
        Ok(WrinkleDescriptor {
            amplitude,
            wavelength,
            height,
        })
    }

    /// Wrinkle spanning the full height of `layup`.
    pub fn for_layup(amplitude: f64, wavelength: f64, layup: &Layup) -> Result<Self> {
        Self::new(amplitude, wavelength, layup.height())
    }

    /// Severity ratio `A/λ`.
    pub fn ratio(&self) -> f64 {
        self.amplitude / self.wavelength
    }

    pub fn contains(&self, x: f64, z: f64) -> bool {
        let half_l = 0.5 * self.wavelength * (1.0 + DOMAIN_SLACK);
        let half_h = 0.5 * self.height * (1.0 + DOMAIN_SLACK);
        x.abs() <= half_l && z.abs() <= half_h
    }

    fn check(&self, x: f64, z: f64) -> Result<()> {
        if self.contains(x, z) {
            Ok(())
        } else {
            Err(Error::Domain { x, z })
        }
    }

    /// Through-thickness decay factor `(h − 2|z|)/h`, clamped at 0.
    pub fn decay(&self, z: f64) -> f64 {
        ((self.height - 2.0 * z.abs()) / self.height).max(0.0)
    }

    /// Slope `∂W/∂x` without domain checking.
    pub(crate) fn slope_unchecked(&self, x: f64, z: f64) -> f64 {
        let k = 2.0 * PI / self.wavelength;
        -self.amplitude * k * self.decay(z) * (k * x).sin()
    }
}

/// Wrinkle height `W(x, z)` in mm.
pub fn wrinkle_height(x: f64, z: f64, w: &WrinkleDescriptor) -> Result<f64> {
    w.check(x, z)?;
    Ok(w.amplitude * w.decay(z) * (2.0 * PI * x / w.wavelength).cos())
}

/// Local slope `∂W/∂x`.
pub fn wrinkle_slope(x: f64, z: f64, w: &WrinkleDescriptor) -> Result<f64> {
    w.check(x, z)?;
    Ok(w.slope_unchecked(x, z))
}

/// Fiber misalignment `φ = arctan(∂W/∂x)` in radians. Odd in `x`.
pub fn misalignment_angle(x: f64, z: f64, w: &WrinkleDescriptor) -> Result<f64> {
    wrinkle_slope(x, z, w).map(f64::atan)
}

/// Largest misalignment (degrees) of a wrinkle with severity `ratio = A/λ`,
/// reached at `x = ±λ/4` on the midsurface.
pub fn max_misalignment(ratio: f64) -> f64 {
    (2.0 * PI * ratio).atan().to_degrees()
}

/// Ply interface coordinates at station `x`.
///
/// Interfaces stay at their nominal flat positions; the wrinkle only enters
/// through the misalignment angle. `x` is still range-checked.
pub fn ply_interface_heights(layup: &Layup, w: &WrinkleDescriptor, x: f64) -> Result<Vec<f64>> {
    w.check(x, 0.0)?;
    Ok(layup.interfaces())
}

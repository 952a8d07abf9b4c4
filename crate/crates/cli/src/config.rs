//! Run configuration (JSON) and the compiled-in presets.

use std::path::Path;

use serde::{Deserialize, Serialize};
use wrinkle_core::fpp::GridSpec;
use wrinkle_core::geometry::WrinkleDescriptor;
use wrinkle_core::homogenization::Discretization;
use wrinkle_core::material::{EngineeringConstants, Layup, CARBON_EPOXY};
use wrinkle_core::shearography::ShearConfig;

use crate::error::{CliError, CliResult};

pub const DEFAULT_PLY_THICKNESS: f64 = 0.25;
pub const DEFAULT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialSpec {
    Named(String),
    Inline(EngineeringConstants),
}

impl Default for MaterialSpec {
    fn default() -> Self {
        MaterialSpec::Named(CARBON_EPOXY.to_owned())
    }
}

impl MaterialSpec {
    pub fn resolve(&self) -> CliResult<EngineeringConstants> {
        match self {
            MaterialSpec::Inline(c) => Ok(*c),
            MaterialSpec::Named(n) => EngineeringConstants::builtin(n).ok_or_else(|| {
                CliError::config(format!(
                    "material: unknown built-in `{n}` (known: {CARBON_EPOXY})"
                ))
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WrinkleSpec {
    /// mm
    pub wavelength: f64,
    /// mm
    pub amplitude: f64,
}

/// Severity ratios `start, start + step, …` up to and including `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            start: 0.10,
            stop: 0.50,
            step: 0.05,
        }
    }
}

impl SweepSpec {
    pub fn ratios(&self) -> CliResult<Vec<f64>> {
        if ![self.start, self.stop, self.step]
            .iter()
            .all(|v| v.is_finite())
            || self.step <= 0.0
        {
            return Err(CliError::config(
                "sweep: start, stop and step must be finite with step > 0",
            ));
        }
        if self.start < 0.0 {
            return Err(CliError::config("sweep: ratios must be non-negative"));
        }
        if self.stop < self.start {
            return Ok(Vec::new());
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        // Rounding keeps accumulated step error out of the printed ratios.
        Ok((0..n)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    /// mm per pixel
    pub pixel_pitch: f64,
    /// Input holds wrapped phase that must be unwrapped first.
    #[serde(default = "yes")]
    pub wrapped: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FppSpec {
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub material: MaterialSpec,
    /// Stacking notation such as `[0/90]_2s`.
    #[serde(default)]
    pub layup: Option<String>,
    #[serde(default = "default_ply")]
    pub ply_thickness: f64,
    #[serde(default)]
    pub wrinkle: Option<WrinkleSpec>,
    #[serde(default)]
    pub discretization: Discretization,
    /// Largest relative entry change accepted by the convergence check.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub shear: Option<ShearConfig>,
    #[serde(default)]
    pub phase: Option<PhaseSpec>,
    #[serde(default)]
    pub fpp: Option<FppSpec>,
}

fn default_ply() -> f64 {
    DEFAULT_PLY_THICKNESS
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn laminate(notation: &str, wavelength: f64, amplitude: f64) -> Self {
        RunConfig {
            material: MaterialSpec::default(),
            layup: Some(notation.to_owned()),
            ply_thickness: DEFAULT_PLY_THICKNESS,
            wrinkle: Some(WrinkleSpec {
                wavelength,
                amplitude,
            }),
            discretization: Discretization::default(),
            tolerance: DEFAULT_TOLERANCE,
            sweep: None,
            shear: None,
            phase: None,
            fpp: None,
        }
    }

    pub fn preset(name: &str) -> CliResult<Self> {
        PRESETS
            .iter()
            .find(|p| p.0 == name)
            .map(|&(_, notation, wavelength, amplitude)| {
                Self::laminate(notation, wavelength, amplitude)
            })
            .ok_or_else(|| {
                let known: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
                CliError::config(format!(
                    "unknown preset `{name}` (known: {})",
                    known.join(", ")
                ))
            })
    }

    pub fn layup(&self) -> CliResult<Layup> {
        let notation = self
            .layup
            .as_deref()
            .ok_or_else(|| CliError::config("config: missing field `layup`"))?;
        if !(self.ply_thickness.is_finite() && self.ply_thickness > 0.0) {
            return Err(CliError::config("ply_thickness must be positive"));
        }
        Layup::from_notation(notation, self.ply_thickness, self.material.resolve()?)
            .map_err(|e| CliError::config(format!("layup: {e}")))
    }

    pub fn wrinkle_spec(&self) -> CliResult<WrinkleSpec> {
        self.wrinkle
            .ok_or_else(|| CliError::config("config: missing field `wrinkle`"))
    }

    pub fn wrinkle_for(&self, layup: &Layup, amplitude: f64) -> CliResult<WrinkleDescriptor> {
        let spec = self.wrinkle_spec()?;
        WrinkleDescriptor::for_layup(amplitude, spec.wavelength, layup)
            .map_err(|e| CliError::config(format!("wrinkle: {e}")))
    }

    /// Applies `--strips` / `--zpoints` and validates.
    pub fn discretization_with(
        &self,
        strips: Option<usize>,
        zpoints: Option<usize>,
    ) -> CliResult<Discretization> {
        let d = Discretization {
            n_strips: strips.unwrap_or(self.discretization.n_strips),
            n_z_points: zpoints.unwrap_or(self.discretization.n_z_points),
        };
        d.validate()
            .map_err(|e| CliError::config(format!("discretization: {e}")))?;
        Ok(d)
    }
}

/// `(name, layup, λ mm, A mm)` of the compiled-in laminates.
pub const PRESETS: [(&str, &str, f64, f64); 9] = [
    ("specimen-I", "[0/90]_2s", 6.6, 1.2),
    ("specimen-II", "[0]_30", 8.3, 1.0),
    ("cross-ply-8-a0.5", "[0/90]_2s", 5.0, 0.5),
    ("cross-ply-8-a0.75", "[0/90]_2s", 5.0, 0.75),
    ("cross-ply-16-a0.5", "[0/90]_4s", 5.0, 0.5),
    ("cross-ply-16-a1", "[0/90]_4s", 5.0, 1.0),
    ("quasi-30-a1", "[0/90/±45/0]_3s", 5.0, 1.0),
    ("quasi-30-a1.75", "[0/90/±45/0]_3s", 5.0, 1.75),
    ("quasi-30-a2.5", "[0/90/±45/0]_3s", 5.0, 2.5),
];

//! Library side of the `wrinkle` command: every subcommand renders its
//! machine-readable output to a `String` so it can be tested directly.

pub mod config;
pub mod error;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wrinkle_core::compare::{compare_series, published, Denominator, ErrorTable, PUBLISHED};
use wrinkle_core::fpp::{displacement_extract, Displacement};
use wrinkle_core::geometry::{max_misalignment, SEVERITY_TABLE};
use wrinkle_core::homogenization::{homogenize_checked, homogenize_wrinkle, Discretization};
use wrinkle_core::io::{load_phase_map, load_point_cloud, write_matrix_csv};
use wrinkle_core::material::{
    effective_engineering_constants, EngineeringConstants, StiffnessMatrix,
};
use wrinkle_core::shearography::{integrate_displacement, unwrap_map};

pub use config::RunConfig;
pub use error::{CliError, CliResult, Kind};

#[derive(Debug, Clone, Serialize)]
pub struct WrinkleReport {
    pub amplitude_mm: f64,
    pub wavelength_mm: f64,
    pub ratio: f64,
    pub max_misalignment_deg: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub refined_discretization: Discretization,
    pub max_entry_change: f64,
    pub frobenius_change: f64,
    pub tolerance: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StiffnessReport {
    pub layup: String,
    pub plies: usize,
    pub height_mm: f64,
    pub wrinkle: WrinkleReport,
    pub discretization: Discretization,
    /// Effective 6×6 stiffness in laminate axes, GPa.
    pub stiffness_gpa: [[f64; 6]; 6],
    /// Engineering constants of the effective stiffness; axes 1, 2, 3 are
    /// the laminate x, y, z.
    pub effective_constants: EngineeringConstants,
    pub convergence: ConvergenceReport,
    /// Zero amplitude: the result is the flat laminate.
    pub no_degradation: bool,
}

/// Effective stiffness with the doubled-discretization convergence check.
pub fn run_stiffness(
    cfg: &RunConfig,
    strips: Option<usize>,
    zpoints: Option<usize>,
) -> CliResult<StiffnessReport> {
    let layup = cfg.layup()?;
    let spec = cfg.wrinkle_spec()?;
    let wrinkle = cfg.wrinkle_for(&layup, spec.amplitude)?;
    let disc = cfg.discretization_with(strips, zpoints)?;
    if !(cfg.tolerance.is_finite() && cfg.tolerance > 0.0) {
        return Err(CliError::config("tolerance must be positive"));
    }
    let check = homogenize_checked(&layup, &wrinkle, &disc, cfg.tolerance)?;
    Ok(StiffnessReport {
        layup: cfg.layup.clone().unwrap_or_default(),
        plies: layup.len(),
        height_mm: layup.height(),
        wrinkle: WrinkleReport {
            amplitude_mm: wrinkle.amplitude,
            wavelength_mm: wrinkle.wavelength,
            ratio: wrinkle.ratio(),
            max_misalignment_deg: max_misalignment(wrinkle.ratio()),
        },
        discretization: disc,
        stiffness_gpa: check.stiffness.to_rows(),
        effective_constants: effective_engineering_constants(&check.stiffness)?,
        convergence: ConvergenceReport {
            refined_discretization: check.refined_discretization,
            max_entry_change: check.max_entry_change,
            frobenius_change: check.frobenius_change,
            tolerance: check.tolerance,
            converged: check.converged,
        },
        no_degradation: wrinkle.amplitude == 0.0,
    })
}

pub fn render_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn csv_string(
    write: impl FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>,
) -> CliResult<String> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        write(&mut w)?;
        w.flush()?;
    }
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Severity ratios and maximum misalignment angles, two decimals.
pub fn run_table2() -> CliResult<String> {
    csv_string(|w| {
        w.write_record(["ratio", "phi_max_deg"])?;
        for (ratio, _) in SEVERITY_TABLE {
            w.write_record([
                format!("{ratio:.2}"),
                format!("{:.2}", max_misalignment(ratio)),
            ])?;
        }
        Ok(())
    })
}

pub const SWEEP_HEADER: [&str; 11] = [
    "ratio",
    "amplitude_mm",
    "e_x_gpa",
    "e_y_gpa",
    "e_z_gpa",
    "g_yz_gpa",
    "g_zx_gpa",
    "g_xy_gpa",
    "nu_21",
    "nu_32",
    "nu_31",
];

/// Effective constants over a range of severity ratios at fixed wavelength.
/// Points run in parallel; rows follow the range order.
pub fn run_sweep(
    cfg: &RunConfig,
    strips: Option<usize>,
    zpoints: Option<usize>,
) -> CliResult<String> {
    let layup = cfg.layup()?;
    let spec = cfg.wrinkle_spec()?;
    let disc = cfg.discretization_with(strips, zpoints)?;
    let ratios = cfg.sweep.unwrap_or_default().ratios()?;
    let rows = ratios
        .par_iter()
        .map(|&ratio| {
            let amplitude = ratio * spec.wavelength;
            let w = cfg.wrinkle_for(&layup, amplitude)?;
            let c: StiffnessMatrix = homogenize_wrinkle(&layup, &w, &disc)?;
            let e = effective_engineering_constants(&c)?;
            Ok([
                ratio, amplitude, e.e11, e.e22, e.e33, e.g23, e.g31, e.g12, e.nu21, e.nu32, e.nu31,
            ])
        })
        .collect::<CliResult<Vec<_>>>()?;
    csv_string(|w| {
        w.write_record(SWEEP_HEADER)?;
        for r in rows {
            w.write_record(r.iter().map(f64::to_string))?;
        }
        Ok(())
    })
}

#[derive(Debug, Deserialize)]
struct SeriesRow {
    #[serde(default)]
    load: Option<f64>,
    measured: f64,
    reference: f64,
}

/// Loads, measured values and reference values of a comparison file.
pub type Series = (Vec<Option<f64>>, Vec<f64>, Vec<f64>);

/// Reads a CSV with columns `measured,reference` and an optional `load`.
pub fn read_series(path: &Path) -> CliResult<Series> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let (mut loads, mut measured, mut reference) = (Vec::new(), Vec::new(), Vec::new());
    for (i, row) in rdr.deserialize::<SeriesRow>().enumerate() {
        let row =
            row.map_err(|e| CliError::config(format!("{} row {}: {e}", path.display(), i + 2)))?;
        loads.push(row.load);
        measured.push(row.measured);
        reference.push(row.reference);
    }
    Ok((loads, measured, reference))
}

/// Source of a comparison: a published series or a CSV file.
pub enum SeriesSource<'a> {
    Published(&'a str),
    File(&'a Path),
}

pub fn run_compare(source: SeriesSource, denominator: Denominator) -> CliResult<String> {
    let (loads, table): (Vec<Option<f64>>, ErrorTable) = match source {
        SeriesSource::Published(name) => {
            let p = published(name).ok_or_else(|| {
                let known: Vec<&str> = PUBLISHED.iter().map(|p| p.name).collect();
                CliError::config(format!(
                    "unknown series `{name}` (known: {})",
                    known.join(", ")
                ))
            })?;
            (
                p.loads_n.iter().map(|&l| Some(l)).collect(),
                compare_series(p.measured, p.reference, denominator)?,
            )
        }
        SeriesSource::File(path) => {
            let (loads, m, r) = read_series(path)?;
            (loads, compare_series(&m, &r, denominator)?)
        }
    };
    csv_string(|w| {
        w.write_record([
            "load",
            "measured",
            "reference",
            "denominator",
            "relative_error",
            "error_display",
        ])?;
        for (row, load) in table.rows.iter().zip(loads) {
            w.write_record([
                load.map(|l| l.to_string()).unwrap_or_default(),
                row.measured.to_string(),
                row.reference.to_string(),
                table.denominator.to_string(),
                row.relative_error.to_string(),
                row.display_percent(),
            ])?;
        }
        Ok(())
    })
}

/// Displacement CSV (nm) and the residue count of the unwrapping step.
pub fn run_shear_integrate(phase_path: &Path, cfg: &RunConfig) -> CliResult<(String, usize)> {
    let shear = cfg
        .shear
        .ok_or_else(|| CliError::config("config: missing field `shear`"))?;
    let phase = cfg
        .phase
        .ok_or_else(|| CliError::config("config: missing field `phase`"))?;
    let map = load_phase_map(phase_path, phase.pixel_pitch, phase.wrapped)?;
    let (unwrapped, residues) = if map.wrapped {
        let u = unwrap_map(&map);
        (u.phase, u.residues)
    } else {
        (map, 0)
    };
    let w = integrate_displacement(&unwrapped, &shear)?;
    let mut buf = Vec::new();
    write_matrix_csv(&mut buf, &w)?;
    Ok((
        String::from_utf8(buf).expect("csv output is UTF-8"),
        residues,
    ))
}

pub fn run_fpp_extract(before: &Path, after: &Path, cfg: &RunConfig) -> CliResult<Displacement> {
    let fpp = cfg
        .fpp
        .ok_or_else(|| CliError::config("config: missing field `fpp`"))?;
    let b = load_point_cloud(before)?;
    let a = load_point_cloud(after)?;
    Ok(displacement_extract(&b, &a, &fpp.grid)?)
}

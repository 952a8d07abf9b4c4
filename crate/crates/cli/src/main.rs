use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wrinkle_cli::{
    render_json, run_compare, run_fpp_extract, run_shear_integrate, run_stiffness, run_sweep,
    run_table2, CliError, CliResult, RunConfig, SeriesSource,
};
use wrinkle_core::compare::Denominator;
use wrinkle_core::io::save_grid;

/// Effective stiffness of wrinkled laminates and optical displacement post-processing.
#[derive(Parser)]
#[command(name = "wrinkle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// JSON run configuration
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in laminate, e.g. specimen-I
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct Disc {
    /// Strips across one wavelength
    #[arg(long = "strips")]
    strips: Option<usize>,
    /// Gauss points per ply through the thickness
    #[arg(long = "zpoints")]
    zpoints: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Effective stiffness report (JSON)
    Stiffness {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        disc: Disc,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Severity ratio vs maximum misalignment (CSV)
    Table2 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Effective constants over a range of severity ratios (CSV)
    Sweep {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        disc: Disc,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relative error of a measured series against a reference (CSV)
    Compare {
        /// CSV with columns measured,reference and optionally load
        input: Option<PathBuf>,
        /// Published series instead of a file
        #[arg(long, conflicts_with = "input")]
        preset: Option<String>,
        #[arg(long, default_value = "reference", value_parser = ["measured", "reference"])]
        denominator: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shear-phase map to out-of-plane displacement in nm (CSV)
    ShearIntegrate {
        /// Phase map, `.phm` binary or CSV
        phase: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Out-of-plane displacement between two point clouds (CSV + JSON sidecar)
    FppExtract {
        before: PathBuf,
        after: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(source: &Source) -> CliResult<RunConfig> {
    match (&source.config, &source.preset) {
        (Some(path), None) => RunConfig::load(path),
        (None, Some(name)) => RunConfig::preset(name),
        _ => Err(CliError::config(
            "exactly one of --config or --preset is required",
        )),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn note(value: serde_json::Value) {
    eprintln!("{value}");
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Stiffness { source, disc, out } => {
            let report = run_stiffness(&load(&source)?, disc.strips, disc.zpoints)?;
            if !report.convergence.converged {
                note(
                    serde_json::json!({ "warning": "not converged", "max_entry_change": report.convergence.max_entry_change }),
                );
            }
            emit(out.as_deref(), &render_json(&report))
        }
        Command::Table2 { out } => emit(out.as_deref(), &run_table2()?),
        Command::Sweep { source, disc, out } => emit(
            out.as_deref(),
            &run_sweep(&load(&source)?, disc.strips, disc.zpoints)?,
        ),
        Command::Compare {
            input,
            preset,
            denominator,
            out,
        } => {
            let denominator: Denominator = denominator.parse()?;
            let source = match (&input, &preset) {
                (Some(path), None) => SeriesSource::File(path),
                (None, Some(name)) => SeriesSource::Published(name),
                _ => return Err(CliError::config("give an input CSV or --preset")),
            };
            emit(out.as_deref(), &run_compare(source, denominator)?)
        }
        Command::ShearIntegrate { phase, config, out } => {
            let (csv, residues) = run_shear_integrate(&phase, &RunConfig::load(&config)?)?;
            note(serde_json::json!({ "residues": residues }));
            emit(out.as_deref(), &csv)
        }
        Command::FppExtract {
            before,
            after,
            config,
            out,
        } => {
            let d = run_fpp_extract(&before, &after, &RunConfig::load(&config)?)?;
            note(serde_json::json!({
                "supported_cells": d.field.valid_count(),
                "in_plane_drift_mm": d.in_plane_drift,
                "drift_warning": d.drift_warning,
            }));
            match out {
                Some(path) => Ok(save_grid(&path, &d.field)?),
                None => {
                    let mut buf = Vec::new();
                    wrinkle_core::io::write_matrix_csv(&mut buf, &d.field.values)?;
                    emit(None, &String::from_utf8_lossy(&buf))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::config(
                e.to_string()
                    .lines()
                    .next()
                    .unwrap_or("invalid arguments")
                    .trim_start_matches("error: "),
            );
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.kind.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.kind.exit_code())
        }
    }
}

//! Relative error between measured and reference displacement series.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which value the absolute difference is divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    Measured,
    #[default]
    Reference,
}

impl FromStr for Denominator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "measured" => Ok(Denominator::Measured),
            "reference" => Ok(Denominator::Reference),
            other => Err(Error::Config(format!(
                "denominator must be `measured` or `reference`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Denominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Denominator::Measured => "measured",
            Denominator::Reference => "reference",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRow {
    pub load: Option<f64>,
    pub measured: f64,
    pub reference: f64,
    /// `|measured − reference| / |denominator|`, as a fraction.
    pub relative_error: f64,
}

impl ErrorRow {
    pub fn percent(&self) -> f64 {
        100.0 * self.relative_error
    }

    /// Percentage rounded to 0.1 for display.
    pub fn display_percent(&self) -> String {
        format!("{:.1}%", self.percent())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTable {
    pub denominator: Denominator,
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    /// Attaches load values to the rows.
    pub fn with_loads(mut self, loads: &[f64]) -> Result<Self> {
        if loads.len() != self.rows.len() {
            return Err(Error::LengthMismatch(loads.len(), self.rows.len()));
        }
        for (row, &l) in self.rows.iter_mut().zip(loads) {
            row.load = Some(l);
        }
        Ok(self)
    }

    pub fn min_max_percent(&self) -> Option<(f64, f64)> {
        self.rows
            .iter()
            .map(ErrorRow::percent)
            .fold(None, |acc, p| match acc {
                None => Some((p, p)),
                Some((lo, hi)) => Some((lo.min(p), hi.max(p))),
            })
    }
}

/// Row-wise relative error of `measured` against `reference`.
pub fn compare_series(
    measured: &[f64],
    reference: &[f64],
    denominator: Denominator,
) -> Result<ErrorTable> {
    if measured.len() != reference.len() {
        return Err(Error::LengthMismatch(measured.len(), reference.len()));
    }
    let rows = measured
        .iter()
        .zip(reference)
        .enumerate()
        .map(|(i, (&m, &r))| {
            let d = match denominator {
                Denominator::Measured => m,
                Denominator::Reference => r,
            };
            if d == 0.0 || !d.is_finite() {
                return Err(Error::ZeroDenominator(i));
            }
            Ok(ErrorRow {
                load: None,
                measured: m,
                reference: r,
                relative_error: (m - r).abs() / d.abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorTable { denominator, rows })
}

/// A published measurement-vs-simulation series with its printed errors.
#[derive(Debug, Clone, Copy)]
pub struct PublishedComparison {
    pub name: &'static str,
    pub unit: &'static str,
    pub loads_n: &'static [f64],
    pub measured: &'static [f64],
    pub reference: &'static [f64],
    pub printed_percent: &'static [f64],
    /// Convention that reproduces the printed percentages.
    pub denominator: Denominator,
}

impl PublishedComparison {
    pub fn table(&self) -> Result<ErrorTable> {
        compare_series(self.measured, self.reference, self.denominator)?.with_loads(self.loads_n)
    }
}

/// Shearography maximum displacement (nm) against simulation, specimen I.
pub const SHEAROGRAPHY_SPECIMEN_I: PublishedComparison = PublishedComparison {
    name: "shearography-specimen-I",
    unit: "nm",
    loads_n: &[2.0, 3.0, 6.0, 8.0, 10.0],
    measured: &[-375.0, -542.0, -1006.0, -1317.0, -1631.0],
    reference: &[-350.0, -524.0, -1048.0, -1398.0, -1748.0],
    printed_percent: &[6.7, 3.3, 4.2, 6.2, 7.1],
    denominator: Denominator::Measured,
};

/// Fringe-projection maximum displacement (mm) against simulation, specimen I.
pub const FPP_SPECIMEN_I: PublishedComparison = PublishedComparison {
    name: "fpp-specimen-I",
    unit: "mm",
    loads_n: &[200.0, 400.0, 600.0, 800.0, 1000.0],
    measured: &[-0.0646, -0.1142, -0.169, -0.2011, -0.280],
    reference: &[-0.0596, -0.1191, -0.1788, -0.2384, -0.298],
    printed_percent: &[8.4, 4.1, 5.5, 15.6, 6.0],
    denominator: Denominator::Reference,
};

pub const PUBLISHED: [PublishedComparison; 2] = [SHEAROGRAPHY_SPECIMEN_I, FPP_SPECIMEN_I];

pub fn published(name: &str) -> Option<PublishedComparison> {
    PUBLISHED.iter().copied().find(|p| p.name == name)
}

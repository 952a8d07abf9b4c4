use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("inadmissible material: compliance matrix is not positive definite ({0})")]
    InadmissibleMaterial(String),

    #[error("singular or non positive-definite matrix: {0}")]
    SingularMatrix(String),

    #[error("point (x = {x} mm, z = {z} mm) lies outside the wrinkle domain")]
    Domain { x: f64, z: f64 },

    #[error("singular out-of-plane block in ply {ply} at x = {x} mm")]
    HomogenizationSingularity { x: f64, ply: usize },

    #[error("singular block while averaging strips (strip centred at x = {x} mm)")]
    StripSingularity { x: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("the two point clouds share no supported grid cells")]
    NoOverlap,

    #[error("length mismatch: {0} measured values vs {1} reference values")]
    LengthMismatch(usize, usize),

    #[error("zero denominator in row {0}")]
    ZeroDenominator(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse error classes, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Math,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidMaterial(_)
            | Error::Domain { .. }
            | Error::Config(_)
            | Error::LengthMismatch(..)
            | Error::Parse(_) => ErrorKind::Config,
            Error::InadmissibleMaterial(_)
            | Error::SingularMatrix(_)
            | Error::HomogenizationSingularity { .. }
            | Error::StripSingularity { .. }
            | Error::DegenerateInput(_)
            | Error::NoOverlap
            | Error::ZeroDenominator(_) => ErrorKind::Math,
            Error::Io(_) => ErrorKind::Io,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse(format!("{other:?}")),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

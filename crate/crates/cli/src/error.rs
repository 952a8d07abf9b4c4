use std::fmt;

use serde::Serialize;
use wrinkle_core::ErrorKind;

/// Exit-code class of a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Config,
    Math,
    Io,
}

impl Kind {
    pub fn exit_code(self) -> u8 {
        match self {
            Kind::Config => 2,
            Kind::Math => 3,
            Kind::Io => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Config,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Io,
            message: message.into(),
        }
    }

    /// One-line JSON for stderr: `{"error":{"code":2,"kind":"config","message":"..."}}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            code: u8,
            kind: Kind,
            message: &'a str,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Body {
                code: self.kind.exit_code(),
                kind: self.kind,
                message: &self.message,
            },
        })
        .expect("error serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<wrinkle_core::Error> for CliError {
    fn from(e: wrinkle_core::Error) -> Self {
        let kind = match e.kind() {
            ErrorKind::Config => Kind::Config,
            ErrorKind::Math => Kind::Math,
            ErrorKind::Io => Kind::Io,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        wrinkle_core::Error::from(e).into()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

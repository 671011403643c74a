//! CLI error taxonomy and process exit codes.

use std::fmt;

use wva_core::WvaError;

/// Exit codes: 0 success, 2 bad arguments, 3 I/O error, 4 numeric-domain
/// error. Argument parsing itself also exits 2 (clap's default).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Domain(WvaError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Io(_) => 3,
            Self::Domain(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(msg) => write!(f, "error: {msg}"),
            Self::Io(msg) => write!(f, "i/o error: {msg}"),
            Self::Domain(err) => write!(f, "domain error: {err}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<WvaError> for CliError {
    fn from(err: WvaError) -> Self {
        Self::Domain(err)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

use horofourier_core::Error;
use thiserror::Error as ThisError;

/// Failures mapped onto the process exit codes.
#[derive(Debug, ThisError)]
pub enum CliError {
    /// Bad flags or configuration: exit 2.
    #[error("{0}")]
    Usage(String),
    /// Input data violating a stated invariant: exit 3.
    #[error("invariant violation: {0}")]
    Invariant(String),
    /// Verification checks failed: exit 1.
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
    /// Numerical or I/O failure: exit 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) | CliError::Runtime(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::Domain(_) | Error::OutOfValidatedRange(_) => CliError::Usage(e.to_string()),
            Error::Invariant(m) => CliError::Invariant(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("csv error: {e}"))
    }
}

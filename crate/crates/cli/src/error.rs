use std::process::ExitCode;

use kmsel_core::Error as CoreError;
use thiserror::Error;

/// Failure classes of the command-line tool, one per exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or argument values (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Unreadable, malformed or inconsistent input (exit 3).
    #[error("{0}")]
    Data(String),
    /// Degenerate traces, contrasts or supports (exit 4).
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        })
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::InvalidArgument(_) => CliError::Usage(msg),
            CoreError::DimensionMismatch(_) | CoreError::NonFinite { .. } => CliError::Data(msg),
            CoreError::EmptyCluster { .. } => CliError::Numerical(format!(
                "{msg}; the k-means run was rejected, try another --seed"
            )),
            CoreError::DegenerateContrast
            | CoreError::DegenerateSupport
            | CoreError::Numerical(_) => CliError::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

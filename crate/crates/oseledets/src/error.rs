use std::io;

use oseledets_core::Error as CoreError;

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{0}")]
    Precondition(CoreError),
    #[error("{0}")]
    Numerical(CoreError),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for usage, input and precondition problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::OutOfWindow { .. }
            | CoreError::InvalidParameter(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::NonFinite { .. } => CliError::Precondition(e),
            _ => CliError::Numerical(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

use std::process::ExitCode;

use trifringe_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("fit did not converge after {0} iterations")]
    NotConverged(usize),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Self::Io { .. } => 1,
            Self::Config(_) => 2,
            Self::Data(_) => 3,
            Self::NotConverged(_) => 4,
            Self::Validation(_) => 5,
        })
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidScan(_)
            | CoreError::DegenerateScan(_)
            | CoreError::ZeroIntegral
            | CoreError::AllPointsExcluded => Self::Data(e.to_string()),
            CoreError::Calibration(_) => Self::Validation(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

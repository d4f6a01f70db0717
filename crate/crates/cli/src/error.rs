use std::path::Path;

use lively_core::WalkError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parameter(String),

    #[error("{0}")]
    Numeric(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn param(msg: impl Into<String>) -> Self {
        CliError::Parameter(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parameter(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Parameter(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Core(#[from] fex_core::Error),

    #[error("certificate violation: {}", .0.join("; "))]
    Violation(Vec<String>),

    #[error("failed to encode report: {0}")]
    Encode(String),
}

impl CliError {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config { path: path.into(), message: message.into() }
    }

    /// Process exit code: 1 config, 2 budget or guard, 3 certificate violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(fex_core::Error::Budget { .. } | fex_core::Error::Resolution(_)) => 2,
            CliError::Violation(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

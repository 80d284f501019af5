use std::path::PathBuf;

use thiserror::Error;

/// Failures of a command-line run.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag value or flag combination; exit status 2.
    #[error("invalid value for {flag}: {message}")]
    Usage { flag: String, message: String },
    /// A simulator error; exit status 1.
    #[error("{}: {0}", .0.name())]
    Domain(#[from] ptssh_core::Error),
    #[error("nothing to plot: every series is empty")]
    EmptySeries,
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", .path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: malformed table: {message}", .path.display())]
    Table { path: PathBuf, message: String },
    #[error("JSON encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn usage(flag: &str, message: impl Into<String>) -> Self {
        CliError::Usage {
            flag: flag.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

use std::path::PathBuf;

use thiserror::Error;
use unicycle_core::{FitError, Issue, ModelFault};

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("invalid input:\n{}", list(.0))]
    Validation(Vec<Issue>),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("model fault: {0}")]
    Model(#[from] ModelFault),
    #[error("linearisation failed: {0}")]
    Fit(#[from] FitError),
}

fn list(issues: &[Issue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code: 2 for model faults, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Model(_) | Error::Fit(FitError::Model(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

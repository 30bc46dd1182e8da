use kwc_core::error::KwcError;
use serde::Serialize;
use thiserror::Error;

/// Failure classes of a run; each maps to one process exit code.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("validation: {0}")]
    Validation(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) | AppError::Io(_) => 1,
            AppError::NonConvergence(_) => 2,
            AppError::Invariant(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AppError::Validation(_) => "validation",
            AppError::NonConvergence(_) => "nonConvergence",
            AppError::Invariant(_) => "invariant",
            AppError::Io(_) => "io",
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport { exit_code: self.exit_code(), kind: self.kind(), message: self.to_string() }
    }
}

impl From<KwcError> for AppError {
    fn from(e: KwcError) -> Self {
        match e {
            KwcError::Solver { .. } => AppError::NonConvergence(e.to_string()),
            KwcError::Scheme(_) => AppError::Invariant(e.to_string()),
            _ => AppError::Validation(e.to_string()),
        }
    }
}

impl From<csv::Error> for AppError {
    fn from(e: csv::Error) -> Self {
        AppError::Io(std::io::Error::other(e))
    }
}

/// Body of `error.json`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ErrorReport {
    pub exit_code: i32,
    pub kind: &'static str,
    pub message: String,
}

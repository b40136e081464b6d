use std::path::Path;

use thiserror::Error;

/// CLI failure classes; each maps to a process exit code.
#[derive(Debug, Error)]
pub enum AppError {
    /// Bad input: unreadable or malformed files, invariant violations.
    #[error("{0}")]
    Validation(String),
    /// Refused because a size guard would be exceeded.
    #[error("{0}")]
    Guard(String),
    /// Failure writing results.
    #[error("{0}")]
    Output(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 2,
            AppError::Guard(_) => 3,
            AppError::Output(_) => 1,
        }
    }

    /// Core error with a location prefix, keeping the guard class.
    pub fn from_core(context: impl std::fmt::Display, e: adkey_core::Error) -> Self {
        let msg = format!("{context}: {e}");
        if e.is_guard() {
            AppError::Guard(msg)
        } else {
            AppError::Validation(msg)
        }
    }

    pub fn read(path: &Path, e: std::io::Error) -> Self {
        AppError::Validation(format!("{}: {e}", path.display()))
    }

    pub fn write(path: &Path, e: impl std::fmt::Display) -> Self {
        AppError::Output(format!("{}: {e}", path.display()))
    }
}

pub type AppResult<T> = Result<T, AppError>;

use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("Jacobi identity fails on basis triple ({}, {}, {})", .0.0, .0.1, .0.2)]
    Jacobi((usize, usize, usize)),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("not integrable: {0}")]
    NotIntegrable(String),
    #[error("calibration failed: no candidate passes ({0} candidates tried)")]
    Calibration(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

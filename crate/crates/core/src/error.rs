use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {size} exceeds the supported maximum {max}")]
    DimensionOverflow { size: usize, max: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("matrix 1-norm {0:e} is too large to exponentiate")]
    ExpmOverflow(f64),

    #[error("singular linear system in {0}")]
    Singular(&'static str),

    #[error("channel is never PPT on [0, {0}]")]
    NeverPpt(f64),

    #[error("fixed point check failed: residual {0:e}")]
    NotFixedPoint(f64),

    #[error("solver did not converge (duality gap {gap:e} after {iterations} iterations)")]
    Solver { gap: f64, iterations: usize },

    #[error("state leaked out of the codespace (weight {0:e})")]
    Leakage(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

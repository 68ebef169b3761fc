use thiserror::Error;

/// Errors produced while configuring, assembling or running a scheme.
#[derive(Debug, Error)]
pub enum PlateError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("singular or indefinite Schur complement: {0}")]
    SingularSchur(String),

    #[error("relative residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("conjugate gradient stalled after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("degenerate triangle #{index} (signed area {area:.3e})")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh file {file}, line {line}: {message}")]
    MeshParse {
        file: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PlateError>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(PlateError::DimensionMismatch { expected, found })
    }
}

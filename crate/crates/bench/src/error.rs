use plate_nc::PlateError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver failure at T = {t_final}: {source}")]
    Solver {
        t_final: f64,
        #[source]
        source: PlateError,
    },

    #[error("{0}")]
    Setup(#[from] PlateError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Process exit code: 2 for bad input, 1 for everything that failed at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Setup(PlateError::InvalidParameter(_))
            | BenchError::Setup(PlateError::InvalidMesh(_))
            | BenchError::Setup(PlateError::MeshParse { .. })
            | BenchError::Setup(PlateError::DegenerateTriangle { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

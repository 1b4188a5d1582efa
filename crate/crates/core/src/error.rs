use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("site {0:?} is not in the region")]
    SiteOutsideRegion((i64, i64)),

    #[error("plaquette {0:?} is not in the patch")]
    PlaquetteOutsidePatch((i64, i64)),

    #[error("operator is not positive semidefinite (lambda_min = {lambda_min:e}, tolerance {tol:e})")]
    NotPsd { lambda_min: f64, tol: f64 },

    #[error("matrix is not a projection: {0}")]
    NotProjector(String),

    #[error("eigensolver did not converge after {restarts} restarts (residual {residual:e})")]
    NonConvergence { restarts: usize, residual: f64 },

    #[error("model is frustrated at size {size}: ground energy {ground_energy:e}")]
    Frustrated { size: usize, ground_energy: f64 },

    #[error("interaction shapes violate the range assumptions: {}", .0.join("; "))]
    ShapeViolation(Vec<String>),

    #[error("interaction term rejected by the box classification: {0}")]
    Rejected(String),

    #[error("dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("kernel deflation exceeded {0} vectors")]
    KernelCap(usize),

    #[error("model file: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("linear algebra backend: {0}")]
    Linalg(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {point} lies outside the chart domain {domain}")]
    OutsideDomain { point: String, domain: String },

    #[error("metric is not positive definite at {point} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { point: String, min_eigenvalue: f64 },

    #[error("derivative order {requested} is not supported (maximum {max})")]
    UnsupportedOrder { requested: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("zero tangent vector")]
    ZeroVector,

    #[error("frame is not unitary (defect {0:e}); orthonormalize first")]
    NonUnitaryFrame(f64),

    #[error("frame vectors are not mutually orthogonal (max defect {0:e})")]
    NonOrthogonalFrame(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported moment degree {0} (only 2 and 4 are tabulated)")]
    UnsupportedDegree(usize),

    #[error("failed to diagonalize the second metric after {0} attempts")]
    DiagonalizationFailed(usize),

    #[error("solver did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("positivity lost: {0}")]
    PositivityLost(String),

    #[error("state has not been solved")]
    Unsolved,

    #[error("sweep aborted at eps = {eps}: {reason}")]
    SweepAborted { eps: f64, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

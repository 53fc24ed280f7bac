use thiserror::Error;

/// Error type shared by all solver modules.
#[derive(Debug, Error)]
pub enum GrlbError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid too coarse: {0} interior nodes (minimum 16)")]
    GridTooCoarse(usize),

    #[error("eigensolver did not converge: residual norm {residual:e}")]
    EigenNonConvergence { residual: f64 },

    #[error("region Gram matrix numerically singular (condition estimate {cond:e})")]
    SingularRegionGram { cond: f64 },

    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),

    #[error("quadrature did not converge: Richardson disagreement {disagreement:e}")]
    QuadratureNonConvergence { disagreement: f64 },

    #[error("finite-difference cross-check failed at {location}: relative error {error:e}")]
    AuditCrossCheckFailure { location: String, error: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GrlbError>;

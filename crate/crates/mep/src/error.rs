use thiserror::Error;

/// Error type shared by the whole crate.
#[derive(Debug, Error)]
pub enum MepError {
    /// Instance construction rejected the input grid or target values.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A parameter is outside the range an operation accepts.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested partial specification cannot be extended to an
    /// unbiased nonnegative estimator (endpoint mass above the constraint).
    #[error("infeasible extension at rho={rho}: committed mass {committed} exceeds bound {bound}")]
    InfeasibleExtension {
        rho: f64,
        committed: f64,
        bound: f64,
    },

    /// The ratio binary search could not establish a feasible upper bracket.
    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("malformed input file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, MepError>;

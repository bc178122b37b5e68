use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value returned by oracle of `{problem}` at y = {point:?}")]
    NonFiniteValue { problem: String, point: Vec<f64> },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("problem `{name}` needs n >= {min}, got {n}")]
    DimensionTooSmall { name: String, n: usize, min: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("model set is empty")]
    EmptyModel,

    #[error("every subproblem start terminated infeasible")]
    AllRestartsInfeasible,

    #[error("grid oracle supports n <= 2, got {0}")]
    DimensionTooLarge(usize),

    #[error("no benchmark results to profile")]
    EmptyResults,

    #[error("unknown method `{0}` (expected `sojet` or `gs`)")]
    UnknownMethod(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

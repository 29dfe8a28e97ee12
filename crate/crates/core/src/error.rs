use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed expression: {0}")]
    MalformedExpr(String),
    #[error("malformed system: {0}")]
    MalformedSystem(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("inadmissible transition ({0}, {1})")]
    Inadmissible(String, String),
    #[error("word must contain at least {0} letters")]
    WordTooShort(usize),
    #[error("inverse branch did not converge at {0}")]
    InversionFailed(String),
    #[error("domain mismatch: configuration lives on `{found}`, expected `{expected}`")]
    DomainMismatch { expected: String, found: String },
    #[error("vanishing derivative at {0}")]
    VanishingDerivative(String),
    #[error("word count {count} at depth {depth} exceeds cap {cap}")]
    CoverCap { depth: usize, count: u128, cap: usize },
    #[error("limit geometry did not converge within depth {max_depth}; last differences {diffs:?}")]
    NoConvergence { max_depth: usize, diffs: Vec<f64> },
    #[error("too many rejected perturbation samples: {rejected} rejected for {accepted} accepted")]
    TooManyRejections { rejected: usize, accepted: usize },
    #[error("insufficient pairs: found {found}, need at least {needed}")]
    InsufficientPairs { found: usize, needed: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("parameter {mu} outside validity radius {radius}")]
    OutsideValidity { mu: String, radius: f64 },
    #[error("singular linear map (determinant {0:e})")]
    Singular(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

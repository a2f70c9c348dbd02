use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("player count must be at least 1")]
    EmptyPlayerSet,
    #[error("invalid value {value} at position {index}: {reason}")]
    InvalidValue {
        index: usize,
        value: f64,
        reason: &'static str,
    },
    #[error("player count mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("unknown resource `{0}`")]
    UnknownResource(String),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),
    #[error("enumeration needs {size} allocations, cap is {cap}")]
    EnumerationCap { size: u128, cap: u128 },
    #[error("no Nash equilibrium found (tolerance {tol})")]
    NoEquilibrium { tol: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("linear program: {0}")]
    Lp(#[from] crate::lp::LpError),
    #[error("linear program ended with status {0:?}")]
    LpStatus(crate::lp::LpStatus),
    #[error("invalid theta: {0}")]
    InvalidTheta(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

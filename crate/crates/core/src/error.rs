use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spectrum is empty")]
    Empty,
    #[error("entry {index} is not a finite number")]
    NonFinite { index: usize },
    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("weights sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("geometric ratio must lie in (0,1), got {0}")]
    InvalidRatio(f64),
    #[error("tolerance must lie in (0, 1e-3), got {0}")]
    InvalidTolerance(f64),
    #[error("no index k with d_k <= {eps} within {cap} terms")]
    Unbounded { eps: f64, cap: usize },
    #[error("alpha must be positive and different from 1, got {0}")]
    InvalidAlpha(f64),
    #[error("eta is undefined for negative input {0}")]
    NegativeInput(f64),
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("epsilon must lie in [0,1], got {0}")]
    InvalidEpsilon(f64),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("epsilon {eps} is not below d_(m+1) = {tail}")]
    BranchViolation { eps: f64, tail: f64 },
    #[error("state is pure (rank 1)")]
    PureState,
    #[error("rank {rank} exceeds the search cap {cap}")]
    TooLarge { rank: usize, cap: usize },
    #[error("invalid search budget: {0}")]
    InvalidBudget(String),
    #[error("parse error: {0}")]
    Parse(String),
}

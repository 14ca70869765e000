use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),
    #[error("search budget exceeded: estimated {estimate} nodes, budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u64 },
    #[error("decode failure: {0}")]
    DecodeFailure(String),
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

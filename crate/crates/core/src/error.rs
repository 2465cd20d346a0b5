use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("frequency overflow")]
    FrequencyOverflow,

    #[error("sumset budget exceeded at step {step}: {size} elements > cap {cap}")]
    SumsetBudget { step: usize, size: usize, cap: usize },

    #[error("support cap exceeded: {size} terms > cap {cap}")]
    SupportCap { size: usize, cap: usize },

    #[error("grid budget exceeded: {points} points > budget {budget}")]
    GridBudget { points: usize, budget: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("element {element:?} outside range [1, {upper}]")]
    OutOfRange { element: Vec<i64>, upper: i64 },

    #[error("non-unique representation risk: ratio {ratio} < 3 at index {index}")]
    NonUniqueRepresentation { index: usize, ratio: f64 },

    #[error("linear program failed at x* = {x_star:?}: {status}")]
    LpFailure { x_star: Vec<f64>, status: String },

    #[error("net budget exceeded: {size} > {budget}")]
    NetBudget { size: usize, budget: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

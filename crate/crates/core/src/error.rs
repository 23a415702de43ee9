use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a distribution needs at least 2 symbols, got {0}")]
    TooFewSymbols(usize),
    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("entry {index} is not finite")]
    NonFiniteEntry { index: usize },
    #[error("all weights are zero")]
    AllZero,
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("alphabet sizes differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("reference distribution has zero mass at symbol {0}")]
    ZeroReference(usize),
    #[error("sample count must be at least 1")]
    ZeroSamples,
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("invalid divergence order {0}: must be finite and > 1")]
    InvalidOrder(f64),
    #[error("order {0} is not an integer >= 2, required by the falling-power estimator")]
    NonIntegerOrder(f64),
    #[error("invalid family parameter: {0}")]
    InvalidFamily(String),
    #[error("power sum must be positive, got {0}")]
    NonPositivePowerSum(f64),
    #[error("median amplification needs an odd number of groups, got {0}")]
    EvenGroups(u64),
    #[error("enumeration needs {needed} outcomes, budget is {budget}")]
    BudgetExceeded { needed: f64, budget: u64 },
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("symbol {symbol} is outside the alphabet of size {k}")]
    SymbolOutOfRange { symbol: u64, k: usize },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

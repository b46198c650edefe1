use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("row {row} sums to {sum}, expected 1 within 1e-9")]
    NonStochasticRow { row: usize, sum: f64 },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("enumeration budget exceeded: {required} entries > budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("capacity iteration did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("infeasible smoothing level: {0}")]
    InfeasibleEps(String),

    #[error("epsilon {eps} outside [0, {limit})")]
    EpsOutOfRange { eps: f64, limit: f64 },

    #[error("delta {delta} outside (0, {limit}]")]
    DeltaOutOfRange { delta: f64, limit: f64 },

    #[error("gamma {0} outside the open interval (0, 1)")]
    GammaOutOfRange(f64),

    #[error("marginal of A is not uniform within 1e-9")]
    NonUniformMarginal,

    #[error("unknown symbol index {index} for alphabet of size {alphabet_size}")]
    UnknownSymbol { index: usize, alphabet_size: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("integer overflow computing {0}")]
    Overflow(&'static str),

    #[error("degenerate hash domain: k = {0}, need k >= 1")]
    DegenerateDomain(usize),

    #[error("invalid hash family: {0}")]
    InvalidHashFamily(String),

    #[error("invalid encoder: {0}")]
    InvalidEncoder(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

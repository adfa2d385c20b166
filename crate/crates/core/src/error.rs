use thiserror::Error;

/// Errors raised by the series, lattice and case machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not invertible over integers: leading coefficient {0}")]
    NotInvertible(String),

    #[error("zero series has no inverse")]
    ZeroSeries,

    #[error("enumeration budget of {budget} vectors exceeded (reached {reached})")]
    BudgetExceeded { budget: u64, reached: u64 },

    #[error("invalid root system tag `{0}`")]
    InvalidType(String),

    #[error("level incompatible with quotient: multiplier {multiplier} does not divide level {level}")]
    LevelIncompatible { multiplier: u64, level: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("rank {0} too large for the multivariate expansion; use nakajima_coefficient or the specialization")]
    RankTooLarge(usize),

    #[error("series is not supported on an integer exponent grid")]
    NonIntegerGrid,

    #[error("case rejected (line {line}): {invariant}")]
    InvalidCase { line: usize, invariant: String },

    #[error("length bound {0} exceeds the oracle limit of 30")]
    OracleBound(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("inexact division of Laurent polynomials")]
    InexactDivision,
}

pub type Result<T> = std::result::Result<T, Error>;

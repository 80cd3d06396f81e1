use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation domain error: {0}")]
    Domain(String),

    #[error("value of magnitude {magnitude:e} exceeds 2^45; compensated precision required")]
    PrecisionRequired { magnitude: f64 },

    #[error("value of magnitude {magnitude:e} exceeds the compensated range 2^90")]
    Overflow { magnitude: f64 },

    #[error("non-finite intermediate value")]
    NonFinite,

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("prime table too small: need {needed}, table covers {available}")]
    TableTooSmall { needed: String, available: String },

    #[error("gcd({a}, {q}) = {gcd} is not 1")]
    NotCoprime { a: i64, q: u64, gcd: u64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("prime cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

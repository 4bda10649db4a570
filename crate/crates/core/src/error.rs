use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty truncation")]
    EmptyTruncation,

    #[error("unsupported Eisenstein weight {0}")]
    UnsupportedEisensteinWeight(u32),

    #[error("weight {0}: space not one-dimensional or not implemented")]
    UnsupportedWeight(u32),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("insufficient coefficients: need n up to {needed}, have {available}")]
    InsufficientCoefficients { needed: u64, available: u64 },

    #[error("outside absolute convergence (Re(s) = {0}); use strip evaluator")]
    OutsideAbsoluteConvergence(f64),

    #[error("accuracy {target:e} not reachable: achieved bound {achieved:e}")]
    AccuracyNotReached { target: f64, achieved: f64 },

    #[error("Hecke self-test failed at n = {0}")]
    HeckeSelfTest(u64),

    #[error("checksum mismatch in coefficient cache")]
    Checksum,

    #[error("weight mismatch: expected {expected}, file has {found}")]
    WeightMismatch { expected: u32, found: u32 },

    #[error("malformed cache file: {0}")]
    CacheFormat(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("zero table is empty")]
    EmptyZeroTable,

    #[error("Q undefined: partial sum vanishes at x = {0}")]
    QUndefined(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no check registered under {0:?}")]
    UnknownCheck(String),

    #[error("no evaluator registered under {0:?}")]
    UnknownEvaluator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("sieve limit {0} is below the minimum of 9")]
    LimitTooSmall(u64),
    #[error("sieve limit {0} exceeds the supported maximum {max}", max = crate::sieve::MAX_LIMIT)]
    LimitTooLarge(u64),
    #[error("{what} {value} lies outside the sieved range [2, {limit}]")]
    BeyondLimit {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    #[error("index {index} out of range (valid: 1..={max})")]
    IndexOutOfRange { index: u64, max: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("inverted window [{lo}, {hi}]")]
    InvertedWindow { lo: u64, hi: u64 },
    #[error("window [{lo}, {hi}] does not match [{other_lo}, {other_hi}]")]
    WindowMismatch {
        lo: u64,
        hi: u64,
        other_lo: u64,
        other_hi: u64,
    },
    #[error("{n}-fold sumset of a window starting at {lo} is empty below {hi}")]
    EmptyCertifiedRange { n: u64, lo: u64, hi: u64 },
    #[error("set spec parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u8, u8),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("unknown code `{0}` (expected C2 or C4)")]
    UnknownCode(String),
    #[error("QPSK needs an even number of bits, got {0}")]
    OddBitCount(usize),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("{degenerate} of {total} instances were degenerate (limit 1%); {hint}")]
    TooManyDegenerate {
        degenerate: usize,
        total: usize,
        hint: String,
    },
}

use thiserror::Error;

/// Errors produced by the analyses and constructions in this crate.
///
/// Coordinates carried in error payloads are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{value} is not an element of GF({p})")]
    NotAnElement { value: u64, p: u64 },
    #[error("alphabet of size {q} is too small, need at least {needed}")]
    AlphabetTooSmall { q: usize, needed: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("symbol {symbol} out of range for alphabet of size {q}")]
    SymbolOutOfRange { symbol: i64, q: usize },
    #[error("duplicate codeword {0:?}")]
    DuplicateWord(Vec<u16>),
    #[error("a code needs at least one codeword")]
    EmptyCode,
    #[error("code has fewer than two codewords")]
    DegenerateCode,
    #[error("code size {size} is not a power of {q}")]
    NonIntegralDimension { size: usize, q: usize },
    #[error("projection onto the first {k} coordinates is not a bijection")]
    NotSystematic { k: usize },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("invalid construction spec: {0}")]
    InvalidSpec(String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("coordinate {coord} has no repair set of size at most {cap}")]
    NoRepairSet { coord: usize, cap: usize },
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("hypotheses not met: {0}")]
    NotApplicable(String),
    #[error("coordinate {coord} needs global repair: its witness set is erased or missing")]
    NeedsGlobalRepair { coord: usize },
    #[error("non-erased symbols are not consistent with any codeword")]
    Inconsistent,
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors shared across the crate. Bounded-search verdicts (PASS/FAIL,
/// NOT_CONTRACTING_UP_TO_CAP, NOT_IN_STABILIZER, ...) are ordinary return
/// values, not errors; only genuine misuse or resource exhaustion lands here.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("permutation degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("letter {letter} out of range 1..={d}")]
    LetterOutOfRange { letter: usize, d: usize },
    #[error("index k={k} out of range 1..={n}")]
    IndexOutOfRange { k: usize, n: usize },
    #[error("{0}")]
    InvalidPermutation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("arity must be at least 2 (got {0})")]
    BadArity(usize),
    #[error("resource cap exceeded during {0}")]
    CapExceeded(&'static str),
    #[error("subgroup membership is indeterminate (fuel exhausted) for {0}")]
    Indeterminate(&'static str),
    #[error("groupoid composition mismatch: {feet} feet vs {heads} heads")]
    FeetHeadsMismatch { feet: usize, heads: usize },
    #[error("unsupported context: {0}")]
    UnsupportedContext(String),
    #[error("unknown format: {0}")]
    UnknownFormat(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

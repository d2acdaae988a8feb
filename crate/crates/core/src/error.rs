use thiserror::Error;

/// Errors shared by every layer of the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("inconsistent hypotheses: {0}")]
    InconsistentHypotheses(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("alphabet too large: {0} tests")]
    AlphabetTooLarge(usize),
    #[error("unknown location {0}")]
    UnknownLocation(String),
    #[error("no repair found")]
    NoRepairFound,
    #[error("incompatible abstractions: {0}")]
    IncompatibleAbstractions(String),
    #[error("store space too large: {0} stores")]
    DomainTooLarge(usize),
    #[error("mixed directions in composition")]
    MixedDirections,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

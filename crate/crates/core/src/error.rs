use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or unsupported input.
    #[error("input error: {0}")]
    Input(String),
    /// Parse failure with a 1-based position.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    /// An operation was called outside its domain.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Arithmetic or algebraic impossibility (zero ideal, missing root, ...).
    #[error("algebra error: {0}")]
    Algebra(String),
    #[error("no coordinate maximal contact: {0}")]
    NoMaximalContact(String),
    #[error("step budget of {0} blow-ups exhausted")]
    Budget(usize),
    /// A certificate check failed.
    #[error("certification failed: {0}")]
    Certification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

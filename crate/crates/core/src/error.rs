use thiserror::Error;

/// Malformed textual input, with the offending token and its 1-based column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at column {position}: `{token}`")]
pub struct ParseError {
    pub message: String,
    pub token: String,
    pub position: usize,
}

impl ParseError {
    pub fn new(message: impl Into<String>, token: impl Into<String>, position: usize) -> Self {
        ParseError {
            message: message.into(),
            token: token.into(),
            position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("division by zero")]
    DivisionByZero,
    #[error("symbols left unbound: {0:?}")]
    UnboundSymbols(Vec<String>),
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("{0} is not a valid basis element for rank {1}")]
    IndexOutOfRange(String, usize),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("the zero vector has no highest-weight straightening")]
    ZeroVector,
    #[error("generator {0} is not twisted by an index of the twist set")]
    IndexNotInTwist(String),
    #[error("invalid twist parameters: {0}")]
    InvalidTwist(String),
    #[error("invalid module descriptor: {0}")]
    InvalidModule(String),
    #[error("vector is not a vector of this module: {0}")]
    InvalidVector(String),
    #[error("probe box too small along axis {axis}: need reach {needed}, have {have}")]
    BoxTooSmall { axis: usize, needed: i64, have: i64 },
    #[error("convolution is not exact on the requested box at offset {0:?}")]
    UnsafeConvolution(Vec<i64>),
    #[error("root {0:?} has nonpositive height; partition counts would be infinite")]
    NonPositiveRoot(Vec<i64>),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

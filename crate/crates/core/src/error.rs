use thiserror::Error;

use crate::profile::CollisionWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid grammar: {0}")]
    InvalidGrammar(String),

    #[error("counter overflow while computing {0}")]
    Overflow(&'static str),

    #[error("requested {requested} characters but rule derives only {available}")]
    OutOfRange { requested: u64, available: u64 },

    #[error("rule {rule} derives {len} characters, fewer than q = {q}")]
    NotRelevant { rule: usize, len: u64, q: usize },

    #[error("q mismatch: {0} vs {1}")]
    QMismatch(usize, usize),

    #[error("text too long for the reference check: {len} > cap {cap}")]
    TooLarge { len: u64, cap: u64 },

    #[error("fingerprint collisions persisted after {attempts} attempts")]
    RetriesExhausted {
        attempts: usize,
        witnesses: Vec<CollisionWitness>,
    },

    #[error("decompression accounting broken: {0}")]
    Accounting(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

use thiserror::Error;

use crate::ClientId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("coalition game too large for exact enumeration: n = {n}, limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("k = {k} exceeds population of {population}")]
    SelectionTooLarge { k: usize, population: usize },

    #[error("round {round} is older than chain tip round {tip}")]
    RoundOrder { round: u64, tip: u64 },

    #[error("unknown client {0}")]
    UnknownClient(ClientId),

    #[error("no client accepted the offered contracts")]
    NoParticipants,

    #[error("ledger format: {0}")]
    Format(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

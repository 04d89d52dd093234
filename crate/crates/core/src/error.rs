use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid filtration: {0}")]
    Invalid(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("illegal switch at {pos}: {reason}")]
    IllegalSwitch { pos: usize, reason: String },
    #[error("illegal expansion at {pos}: {reason}")]
    IllegalExpansion { pos: usize, reason: String },
    #[error("illegal contraction at {pos}: {reason}")]
    IllegalContraction { pos: usize, reason: String },
    #[error("illegal transposition at {pos}: cell is a face of its successor")]
    IllegalTransposition { pos: usize },
    #[error("{op} at {pos} is not supported on the FZZ path")]
    UnsupportedOnFzzPath { op: &'static str, pos: usize },
    #[error("no legal operation exists")]
    Exhausted,
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Error {
        Error::Contract(msg.into())
    }

    pub(crate) fn switch(pos: usize, reason: impl Into<String>) -> Error {
        Error::IllegalSwitch { pos, reason: reason.into() }
    }

    pub(crate) fn expansion(pos: usize, reason: impl Into<String>) -> Error {
        Error::IllegalExpansion { pos, reason: reason.into() }
    }

    pub(crate) fn contraction(pos: usize, reason: impl Into<String>) -> Error {
        Error::IllegalContraction { pos, reason: reason.into() }
    }
}

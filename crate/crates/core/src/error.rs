use alloc::string::String;

use crate::pair::Pair;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// No open pairs remain. This is the normal end of a run, not a fault.
    #[error("process terminated: no open pairs remain")]
    Terminated,
    #[error("state corruption: {0}")]
    StateCorruption(String),
    #[error("observer failed at step {step}: {message}")]
    Observer { step: usize, message: String },
    #[error("K4 found on vertices {0:?}")]
    K4Found([u32; 4]),
    #[error("pair {0} is already an edge")]
    AlreadyEdge(Pair),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

use thiserror::Error;

/// Errors raised by the library.
///
/// The variants map onto the CLI exit codes: `Input` and `Parse` are caller
/// mistakes, `Resource` means a configured cap would be exceeded, and `Move`
/// is an illegal move in the rank game.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("illegal move: {reason}; legal moves: {}", legal.join(", "))]
    Move { reason: String, legal: Vec<String> },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

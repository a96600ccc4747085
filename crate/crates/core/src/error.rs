use thiserror::Error;

/// Errors raised by the game, the learners and the geometry toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller supplied an argument outside its domain.
    #[error("invalid input: {0}")]
    Input(String),

    /// A run was configured in a way that cannot be executed.
    #[error("configuration error: {0}")]
    Config(String),

    /// One side of the game behaved in a way the protocol rules out.
    #[error("protocol violation: {0}")]
    Protocol(String),

    /// Numerical machinery failed where it should not.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

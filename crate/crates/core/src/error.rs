use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The conditioning outcome has (numerically) zero probability.
    #[error("conditioning event has probability {probability:e}")]
    DegenerateCondition { probability: f64 },

    /// An objective or solver produced a non-finite or otherwise unusable value.
    #[error("numerical failure: {message}")]
    NumericalFailure { message: String, angles: Vec<(f64, f64)> },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or out-of-range input, or a violated precondition.
    #[error("invalid input: {0}")]
    Input(String),
    /// The requested transformation cannot exist (e.g. incompatible basis pairs).
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A structural invariant the algorithm relies on did not hold.
    #[error("internal invariant violated: {0}")]
    Internal(String),
    /// A brute-force search or enumeration exceeded its configured cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn internal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Internal(msg.into()))
}

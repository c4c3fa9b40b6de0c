use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested problem size exceeds the configured dense-matrix budget.
    #[error("capacity exceeded: {what} = {requested} is above the limit {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

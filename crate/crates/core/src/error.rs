use alloc::string::String;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resource limit: {what} needs {required}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        required: u64,
        limit: u64,
    },

    #[error("estimate undefined: {0}")]
    UndefinedEstimate(&'static str),

    #[error("no pure Nash equilibrium among {profiles} profiles")]
    NoPureEquilibrium { profiles: u64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

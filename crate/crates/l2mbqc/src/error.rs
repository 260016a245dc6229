use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("arity mismatch: expected {expected} input bits, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("arity {n} exceeds the cap of {cap}")]
    ArityCap { n: usize, cap: usize },

    #[error("singular linear system (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("completion failed: {0}")]
    Completion(String),

    #[error("root pairing failed: {0}")]
    RootPairing(String),

    #[error("angle verification failed: failure probability {failure:.3e}")]
    Unverified { failure: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("engine capacity exceeded: {0}")]
    Capacity(String),

    #[error("unsupported resource for this engine: {0}")]
    UnsupportedResource(String),

    #[error("schedule is not tagged as compiler output")]
    NotCompiled,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

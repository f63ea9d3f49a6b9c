use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input does not satisfy a structural requirement (bad file, bad field, out-of-range id).
    #[error("validation error: {0}")]
    Validation(String),

    /// A configuration lookup outside its domain of definition.
    #[error("configuration is not defined on node {0}")]
    Domain(usize),

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    /// An operation's precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An operation declined to run (trigger false, budget exceeded, dependent input).
    #[error("refused: {0}")]
    Refused(String),

    /// An internal invariant was violated. Always a bug or an unexpected
    /// failure of a proof step; never silently recovered.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

/// Return `Error::Invariant` from the enclosing function when `cond` is false.
#[macro_export]
macro_rules! ensure_invariant {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Invariant(format!($($arg)+)));
        }
    };
}

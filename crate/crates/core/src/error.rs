use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// A computation was refused because it would exceed a configured cap.
    /// `what` names the offending quantity (e.g. `C_18`), not just the input.
    #[error("{what} = {value} exceeds the configured cap {cap}")]
    ResourceLimit {
        what: String,
        value: String,
        cap: String,
    },

    /// Malformed textual input; `offset` is a byte offset into the input.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// Two halves of a tanglegram (or a matching) disagree on leaf count.
    #[error("size mismatch: left has {left} leaves, right has {right}")]
    SizeMismatch { left: usize, right: usize },

    /// Input outside an operation's documented domain.
    #[error("{0}")]
    Domain(String),

    /// An internal exactness check failed; this is a bug, not a user error.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn resource(what: impl Into<String>, value: impl ToString, cap: impl ToString) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            value: value.to_string(),
            cap: cap.to_string(),
        }
    }

    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}

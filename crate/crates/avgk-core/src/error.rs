//! Error type shared by all modules.

use alloc::string::String;

/// Errors reported by the library.
///
/// Two families cover every failure mode: arguments outside their documented
/// range ([`Error::Domain`]) and input data violating a structural invariant
/// ([`Error::Validation`]). Row and line numbers in messages are 1-based
/// (file convention); class indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An argument was outside its documented range.
    #[error("domain error: {0}")]
    Domain(String),
    /// Data failed a structural or numerical invariant.
    #[error("validation error: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

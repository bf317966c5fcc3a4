use thiserror::Error;

/// Errors raised while validating inputs or evaluating bounds.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an input value was violated.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An argument lies outside the domain where a formula applies.
    #[error("{0}")]
    Domain(String),

    /// A moment profile lacks an exponent that the requested bound needs.
    #[error("exponent not in profile: {0}")]
    MissingExponent(String),

    /// A custom (p, q) table has no entry for the requested exponent.
    #[error("no (p, q) entry for exponent {0}")]
    ScheduleLookup(String),

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// Brute-force enumeration refused because the input is too large.
    #[error("enumeration refused: n = {n} exceeds limit {limit}")]
    TooLarge { n: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

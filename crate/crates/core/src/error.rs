//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong while building networks, assembling
/// generators, or running searches.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is out of its documented range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A site or matrix index does not exist in the given state or network.
    #[error("index out of range: {0}")]
    Index(String),

    /// Matrix dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An input matrix failed a physicality check (Hermiticity, positivity,
    /// trace) beyond the documented tolerance.
    #[error("validation failed: {0}")]
    Validation(String),

    /// A linear-algebra routine failed or produced non-finite values.
    #[error("numeric failure in {0}")]
    Numeric(String),

    /// A peak/root search could not bracket its target.
    #[error("search failed: {0}")]
    Search(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Failure classes shared by every module.
///
/// The CLI maps these onto exit codes, so the variant matters more than the text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Bad input: mixed fields, malformed polynomials, violated preconditions.
    #[error("usage error: {0}")]
    Usage(String),
    /// A table or enumeration would exceed the configured budget.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// Input is well formed but outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method failed to meet its tolerance.
    #[error("numeric error: {message} (residual {residual:e})")]
    Numeric { message: String, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}

pub(crate) fn capacity<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capacity(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

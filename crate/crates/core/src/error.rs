use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: wrong shapes, non-finite entries, out-of-range parameters.
    #[error("invalid input: {0}")]
    Input(String),

    /// A metric (or Gram matrix) failed to be positive definite or is too ill-conditioned.
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A dimension that cannot be forced by the available exactness data.
    #[error("undetermined: {0}")]
    Undetermined(String),

    /// A configured check whose own hypotheses failed on the supplied data.
    #[error("suite configuration: {0}")]
    Configuration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

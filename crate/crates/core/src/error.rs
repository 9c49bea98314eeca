use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module.
///
/// The variants split into two families: caller mistakes or resource limits
/// (`Domain`, `Capacity`, `Validation`) and failed internal checks
/// (`Precision`, `Consistency`, `Property`). The CLI maps the first family to
/// exit code 1 and the second to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("precision target not reached: {0}")]
    Precision(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("property violated: {0}")]
    Property(String),
}

impl Error {
    /// True for failed checks (as opposed to bad input or limits).
    pub fn is_check_failure(&self) -> bool {
        matches!(
            self,
            Error::Precision(_) | Error::Consistency(_) | Error::Property(_)
        )
    }
}

//! Error type shared across the library.

use thiserror::Error;

/// Errors raised by curve construction, simulation, capital formulas and the
/// valuation engines.
///
/// `InvalidInput` covers precondition violations on user-supplied data
/// (configuration problems); `Numerical` covers failures of iterative
/// algorithms on otherwise valid inputs (root searches, PDE sweeps).
/// Callers that map errors to process exit codes should treat the former as
/// configuration errors and the latter as numerical errors.
#[derive(Debug, Error)]
pub enum XvaError {
    /// A precondition on user input was violated. The message names the
    /// offending module and parameter.
    #[error("{0}")]
    InvalidInput(String),

    /// An iterative numerical procedure failed to converge or to bracket a
    /// root. The message is module-qualified.
    #[error("{0}")]
    Numerical(String),
}

impl XvaError {
    /// Convenience constructor for input errors: `XvaError::input("curve: ...")`.
    pub fn input(msg: impl Into<String>) -> Self {
        XvaError::InvalidInput(msg.into())
    }

    /// Convenience constructor for numerical errors.
    pub fn numerical(msg: impl Into<String>) -> Self {
        XvaError::Numerical(msg.into())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, XvaError>;

//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by construction, evolution, and measurement routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid configuration value (bad cutoff, parameter out of range).
    #[error("configuration error: {0}")]
    Config(String),

    /// API misuse: mismatched dimensions or operator spaces.
    #[error("usage error: {0}")]
    Usage(String),

    /// A numerical routine produced non-finite values or failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The adaptive integrator could not meet its tolerance within budget.
    #[error("integration error: {0}")]
    Integration(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    pub fn integration(msg: impl Into<String>) -> Self {
        Error::Integration(msg.into())
    }
}

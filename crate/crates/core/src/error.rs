// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An input failed structural validation (bad discriminant, non-prime, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A configured resource cap was hit.
    #[error("capacity error: {what} (limit {limit}, requested {requested})")]
    Capacity {
        what: &'static str,
        limit: u64,
        requested: u64,
    },

    /// An exact integer result does not fit the 64-bit value width.
    #[error("overflow: {0}")]
    Overflow(String),

    /// An internal consistency check failed.
    #[error("integrity error: {0}")]
    Integrity(String),
}

impl Error {
    /// Short machine-readable tag, used in structured error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Validation(_) => "validation",
            Error::Capacity { .. } => "capacity",
            Error::Overflow(_) => "overflow",
            Error::Integrity(_) => "integrity",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

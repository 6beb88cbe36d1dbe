// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors raised by penalty construction and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SegError {
    #[error("series is empty")]
    EmptySeries,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid segment ({a}, {b}] for a series of {m} points")]
    InvalidRange { a: usize, b: usize, m: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration of {count} placements exceeds the budget of {budget}")]
    EnumerationBudget { count: u128, budget: u128 },

    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),

    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl SegError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        SegError::InvalidParameter(msg.into())
    }
}

pub type Result<T, E = SegError> = std::result::Result<T, E>;

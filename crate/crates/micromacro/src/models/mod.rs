//! Concrete forcing fields: a scalar problem with closed-form solution and a
//! multi-level transition-rate model.

mod bloch;
mod toy;

pub use bloch::{rate_r, rate_s, s_lorentzian, BlochConfig, RateKind};
pub use toy::ToyConfig;

use crate::algebra::AlgebraError;
use crate::averaging::AveragingError;

/// Errors from model construction.
#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Averaging(#[from] AveragingError),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
}

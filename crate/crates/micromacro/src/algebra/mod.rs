//! Canonical algebra of exponential-trigonometric matrix polynomials.
//!
//! The building block of the whole crate is the class of matrix-valued maps
//!
//! ```text
//! tau  ->  sum_k  C_k * exp( (i <alpha_k, omega> + lambda_k) tau )
//! ```
//!
//! with complex `d x d` coefficients `C_k`, integer mode vectors `alpha_k`
//! against a fixed real frequency vector `omega`, and decay exponents
//! `lambda_k` with non-positive real part.  Terms with `lambda = 0` form the
//! quasi-periodic ("sharp") part; terms with `Re lambda < 0` form the
//! exponentially decaying ("flat") part.  The representation is canonical:
//! terms are keyed by `(alpha, lambda)`, so sums, products, averages,
//! primitives and derivatives can all be carried out exactly, coefficient by
//! coefficient.

mod frequency;
mod poly;
mod serialize;

pub use frequency::{FrequencyVector, MultiIndex};
pub use poly::{Antiderivative, ExpTrigPoly, WindowCursor};
pub use serialize::{ExpTrigPolyDoc, FrequencyVectorDoc, MatrixDoc, TermDoc};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Errors produced by the exponential-trigonometric algebra.
#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("matrix dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operands carry different frequency vectors")]
    FrequencyMismatch,
    #[error("mode {alpha:?} is resonant: |alpha . omega| = {dot:e} is within tolerance {tol:e}")]
    ResonantMode { alpha: Vec<i32>, dot: f64, tol: f64 },
    #[error("zero-mean primitive requested but the average has norm {norm:e}")]
    NonzeroMean { norm: f64 },
    #[error("mode of order {order} exceeds the cap {cap}")]
    ModeCapExceeded { order: u32, cap: u32 },
    #[error("decay exponent {lambda} has positive real part")]
    GrowingTerm { lambda: C64 },
    #[error("decay exponent {lambda} is purely imaginary; such oscillations belong in the mode vector")]
    ImaginaryDecay { lambda: C64 },
    #[error("flat decay rate {rate} is slower than the unit rate required here")]
    FlatRateBelowUnit { rate: f64 },
    #[error("imaginary residue {residue:e} exceeds the tolerance for a real-valued result")]
    ImaginaryResidue { residue: f64 },
    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },
    #[error("invalid frequency vector: {0}")]
    InvalidFrequency(String),
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
    #[error("document rejected: {0}")]
    Document(String),
}

/// Induced `l1` operator norm (maximum absolute column sum) of a complex matrix.
pub fn op_norm_l1(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum())
        .fold(0.0_f64, f64::max)
}

/// `l1` norm of a complex vector, matching the induced matrix norm above.
pub fn vec_norm_l1(v: &nalgebra::DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

/// `l-infinity` norm of a complex vector, used by the blow-up guard.
pub fn vec_norm_inf(v: &nalgebra::DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

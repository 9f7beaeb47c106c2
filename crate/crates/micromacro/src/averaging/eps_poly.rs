//! Polynomials in the scale separation parameter `eps` whose coefficients
//! are exp-trig polynomials in the fast phase `tau`.
//!
//! The averaging iteration is exact in `eps`: every object it produces is a
//! finite series `sum_k eps^k p_k(tau)`.  Keeping the series symbolic means a
//! single decomposition serves the whole `eps` sweep, and lets tests compare
//! coefficients instead of sampled values.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::algebra::{AlgebraError, ExpTrigPoly, FrequencyVector};

/// A finite series `sum_k eps^k p_k(tau)` with exp-trig coefficients.
///
/// The coefficient list never carries trailing zero polynomials, so
/// [`Self::degree`] is meaningful.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsPoly {
    freq: FrequencyVector,
    dim: usize,
    coeffs: Vec<ExpTrigPoly>,
}

impl EpsPoly {
    /// The zero series.
    pub fn zero(freq: &FrequencyVector, dim: usize) -> Self {
        Self {
            freq: freq.clone(),
            dim,
            coeffs: Vec::new(),
        }
    }

    /// The constant (in `eps`) series equal to the identity map.
    pub fn identity(freq: &FrequencyVector, dim: usize) -> Self {
        Self::from_poly(ExpTrigPoly::identity(freq, dim))
    }

    /// Lifts a single exp-trig polynomial into an `eps`-degree-zero series.
    pub fn from_poly(p: ExpTrigPoly) -> Self {
        let freq = p.freq().clone();
        let dim = p.dim();
        let mut out = Self {
            freq,
            dim,
            coeffs: vec![p],
        };
        out.trim();
        out
    }

    /// Builds a series of constant matrices `sum_k eps^k M_k`.
    pub fn from_constant_series(freq: &FrequencyVector, mats: &[DMatrix<C64>]) -> Self {
        let dim = mats.first().map_or(0, DMatrix::nrows);
        let coeffs = mats
            .iter()
            .map(|m| ExpTrigPoly::constant(freq, m.clone()))
            .collect();
        let mut out = Self {
            freq: freq.clone(),
            dim,
            coeffs,
        };
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(ExpTrigPoly::is_zero) {
            self.coeffs.pop();
        }
    }

    /// Frequency vector shared by every coefficient.
    pub fn freq(&self) -> &FrequencyVector {
        &self.freq
    }

    /// Matrix dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Degree in `eps`, or `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `eps^k`; zero when `k` exceeds the degree.
    pub fn coeff(&self, k: usize) -> ExpTrigPoly {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| ExpTrigPoly::zero(&self.freq, self.dim))
    }

    /// Borrowing iterator over `(power, coefficient)` pairs.
    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &ExpTrigPoly)> + '_ {
        self.coeffs.iter().enumerate()
    }

    /// True for the zero series.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn compatible(&self, rhs: &Self) -> Result<(), AlgebraError> {
        if self.freq != rhs.freq {
            return Err(AlgebraError::FrequencyMismatch);
        }
        if self.dim != rhs.dim {
            return Err(AlgebraError::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        Ok(())
    }

    /// Sum of two series.
    pub fn add(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.add_scaled(rhs, 1.0)
    }

    /// Difference of two series.
    pub fn sub(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.add_scaled(rhs, -1.0)
    }

    /// `self + factor * rhs` with a real factor.
    pub fn add_scaled(&self, rhs: &Self, factor: f64) -> Result<Self, AlgebraError> {
        self.compatible(rhs)?;
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            let a = self.coeffs.get(k);
            let b = rhs.coeffs.get(k);
            let c = match (a, b) {
                (Some(a), Some(b)) => a.add_scaled(b, C64::new(factor, 0.0))?,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.scale_re(factor),
                (None, None) => unreachable!(),
            };
            coeffs.push(c);
        }
        let mut out = Self {
            freq: self.freq.clone(),
            dim: self.dim,
            coeffs,
        };
        out.trim();
        Ok(out)
    }

    /// Scales every coefficient by a real factor.
    pub fn scale_re(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = c.scale_re(factor);
        }
        out.trim();
        out
    }

    /// Product of two series: Cauchy convolution in `eps`, pointwise matrix
    /// product in `tau`.  Order matters, as for matrices.
    pub fn mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.compatible(rhs)?;
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero(&self.freq, self.dim));
        }
        let deg = self.coeffs.len() + rhs.coeffs.len() - 2;
        let mut coeffs =
            vec![ExpTrigPoly::zero(&self.freq, self.dim); deg + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b)?)?;
            }
        }
        let mut out = Self {
            freq: self.freq.clone(),
            dim: self.dim,
            coeffs,
        };
        out.trim();
        Ok(out)
    }

    /// Multiplies by `eps^k`, shifting every coefficient up.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs =
            vec![ExpTrigPoly::zero(&self.freq, self.dim); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self {
            freq: self.freq.clone(),
            dim: self.dim,
            coeffs,
        }
    }

    /// Truncates to terms of `eps`-power at most `max_deg`.
    pub fn truncate(&self, max_deg: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(max_deg + 1);
        out.trim();
        out
    }

    /// Averages every coefficient, yielding the series of constant matrices
    /// `sum_k eps^k <p_k>`.
    pub fn average_series(&self) -> Vec<DMatrix<C64>> {
        let mut mats: Vec<DMatrix<C64>> =
            self.coeffs.iter().map(ExpTrigPoly::average).collect();
        while mats
            .last()
            .is_some_and(|m| m.iter().all(|z| z.re == 0.0 && z.im == 0.0))
        {
            mats.pop();
        }
        mats
    }

    /// Termwise zero-mean primitive of every coefficient.
    pub fn zero_mean_primitive(&self) -> Result<Self, AlgebraError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(ExpTrigPoly::zero_mean_primitive)
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Self {
            freq: self.freq.clone(),
            dim: self.dim,
            coeffs,
        };
        out.trim();
        Ok(out)
    }

    /// Termwise derivative in `tau` of the requested order.
    pub fn derivative(&self, order: u32) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = c.derivative(order);
        }
        out.trim();
        out
    }

    /// Collapses the series at a concrete `eps` into one exp-trig polynomial.
    pub fn at_eps(&self, eps: f64) -> Result<ExpTrigPoly, AlgebraError> {
        let mut acc = ExpTrigPoly::zero(&self.freq, self.dim);
        let mut power = 1.0;
        for c in &self.coeffs {
            acc = acc.add(&c.scale_re(power))?;
            power *= eps;
        }
        Ok(acc)
    }

    /// Evaluates at a concrete `(eps, tau)` pair.
    pub fn evaluate(&self, eps: f64, tau: f64) -> DMatrix<C64> {
        let mut acc = DMatrix::zeros(self.dim, self.dim);
        let mut power = C64::new(1.0, 0.0);
        for c in &self.coeffs {
            acc += c.evaluate(tau) * power;
            power *= eps;
        }
        acc
    }

    /// Largest coefficient distance across `eps` powers.
    pub fn coefficient_distance(&self, rhs: &Self) -> f64 {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = ExpTrigPoly::zero(&self.freq, self.dim);
        (0..len)
            .map(|k| {
                let a = self.coeffs.get(k).unwrap_or(&zero);
                let b = rhs.coeffs.get(k).unwrap_or(&zero);
                a.coefficient_distance(b)
            })
            .fold(0.0, f64::max)
    }
}

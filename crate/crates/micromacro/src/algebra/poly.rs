//! The canonical exponential-trigonometric polynomial type and its calculus.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{op_norm_l1, AlgebraError, FrequencyVector, MultiIndex};

/// Relative cutoff under which a coefficient is dropped during canonicalization.
const DROP_TOL: f64 = 1e-14;
/// Absolute tolerance on the mean when a zero-mean primitive is requested.
const MEAN_TOL: f64 = 1e-12;
/// Largest imaginary residue tolerated when exporting real values.
const IMAG_TOL: f64 = 1e-10;

/// Decay exponent usable as a map key: `-0.0` is folded to `0.0` and ordering
/// is total, so equal exponents always share one canonical slot.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Decay(C64);

impl Decay {
    fn new(z: C64) -> Self {
        Self(C64::new(z.re + 0.0, z.im + 0.0))
    }

    fn value(self) -> C64 {
        self.0
    }

    fn is_zero(self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }
}

impl Eq for Decay {}

impl PartialOrd for Decay {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decay {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .re
            .total_cmp(&other.0.re)
            .then(self.0.im.total_cmp(&other.0.im))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct TermKey {
    alpha: MultiIndex,
    decay: Decay,
}

/// A matrix-valued sum of terms `C * exp((i <alpha, omega> + lambda) tau)`.
///
/// Terms are stored canonically, keyed by `(alpha, lambda)`; the sharp
/// (quasi-periodic) part collects the terms with `lambda = 0` and the flat
/// (decaying) part those with `Re lambda < 0`.  All operations keep the
/// representation canonical and drop coefficients below `1e-14` of the
/// largest one.
///
/// ```
/// use micromacro::algebra::{ExpTrigPoly, FrequencyVector};
///
/// let freq = FrequencyVector::mono(std::f64::consts::PI).unwrap();
/// let cos = ExpTrigPoly::cosine(&freq, 0).unwrap();
/// // <cos^2> = 1/2, recovered exactly from the canonical product.
/// let avg = cos.mul(&cos).unwrap().average();
/// assert!((avg[(0, 0)].re - 0.5).abs() < 1e-15);
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct ExpTrigPoly {
    freq: FrequencyVector,
    dim: usize,
    terms: BTreeMap<TermKey, DMatrix<C64>>,
}

impl ExpTrigPoly {
    /// The zero polynomial.
    pub fn zero(freq: &FrequencyVector, dim: usize) -> Self {
        Self {
            freq: freq.clone(),
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// The constant polynomial with the given coefficient.
    pub fn constant(freq: &FrequencyVector, coeff: DMatrix<C64>) -> Self {
        let dim = coeff.nrows();
        let mut p = Self::zero(freq, dim);
        p.insert(MultiIndex::zero(freq.dim()), C64::new(0.0, 0.0), coeff)
            .expect("constant term is always insertable");
        p
    }

    /// The constant identity map.
    pub fn identity(freq: &FrequencyVector, dim: usize) -> Self {
        Self::constant(freq, DMatrix::identity(dim, dim))
    }

    /// A scalar (1 x 1) constant.
    pub fn scalar(freq: &FrequencyVector, value: C64) -> Self {
        Self::constant(freq, DMatrix::from_element(1, 1, value))
    }

    /// The scalar map `tau -> cos(omega_p tau)` (zero-based `p`).
    pub fn cosine(freq: &FrequencyVector, p: usize) -> Result<Self, AlgebraError> {
        let r = freq.dim();
        let half = DMatrix::from_element(1, 1, C64::new(0.5, 0.0));
        let mut out = Self::zero(freq, 1);
        out.insert(MultiIndex::unit(r, p), C64::new(0.0, 0.0), half.clone())?;
        out.insert(MultiIndex::unit(r, p).neg(), C64::new(0.0, 0.0), half)?;
        Ok(out)
    }

    /// The scalar map `tau -> sin(omega_p tau)` (zero-based `p`).
    pub fn sine(freq: &FrequencyVector, p: usize) -> Result<Self, AlgebraError> {
        let r = freq.dim();
        let mut out = Self::zero(freq, 1);
        out.insert(
            MultiIndex::unit(r, p),
            C64::new(0.0, 0.0),
            DMatrix::from_element(1, 1, C64::new(0.0, -0.5)),
        )?;
        out.insert(
            MultiIndex::unit(r, p).neg(),
            C64::new(0.0, 0.0),
            DMatrix::from_element(1, 1, C64::new(0.0, 0.5)),
        )?;
        Ok(out)
    }

    /// The scalar map `tau -> value * exp(lambda tau)` with `Re lambda < 0`.
    pub fn decaying(freq: &FrequencyVector, lambda: C64, value: C64) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(freq, 1);
        out.insert(
            MultiIndex::zero(freq.dim()),
            lambda,
            DMatrix::from_element(1, 1, value),
        )?;
        Ok(out)
    }

    /// Builds a polynomial from raw `(alpha, lambda, coefficient)` triples.
    pub fn from_terms<I>(freq: &FrequencyVector, dim: usize, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Vec<i32>, C64, DMatrix<C64>)>,
    {
        let mut out = Self::zero(freq, dim);
        for (alpha, lambda, coeff) in terms {
            out.insert(MultiIndex::new(alpha), lambda, coeff)?;
        }
        out.prune();
        Ok(out)
    }

    /// Assembles a `d x d` matrix polynomial from scalar entry polynomials.
    pub fn from_scalar_entries(
        freq: &FrequencyVector,
        entries: &[Vec<ExpTrigPoly>],
    ) -> Result<Self, AlgebraError> {
        let d = entries.len();
        let mut out = Self::zero(freq, d);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != d {
                return Err(AlgebraError::DimensionMismatch {
                    left: d,
                    right: row.len(),
                });
            }
            for (j, p) in row.iter().enumerate() {
                if p.dim != 1 {
                    return Err(AlgebraError::DimensionMismatch {
                        left: 1,
                        right: p.dim,
                    });
                }
                if p.freq != *freq {
                    return Err(AlgebraError::FrequencyMismatch);
                }
                for (key, c) in &p.terms {
                    let mut coeff = DMatrix::zeros(d, d);
                    coeff[(i, j)] = c[(0, 0)];
                    out.insert(key.alpha.clone(), key.decay.value(), coeff)?;
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Adds one term into the canonical map, validating it first.
    pub fn insert(
        &mut self,
        alpha: MultiIndex,
        lambda: C64,
        coeff: DMatrix<C64>,
    ) -> Result<(), AlgebraError> {
        if coeff.nrows() != self.dim || coeff.ncols() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                left: self.dim,
                right: coeff.nrows().max(coeff.ncols()),
            });
        }
        if alpha.len() != self.freq.dim() {
            return Err(AlgebraError::DimensionMismatch {
                left: self.freq.dim(),
                right: alpha.len(),
            });
        }
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(AlgebraError::NonFinite {
                context: "decay exponent",
            });
        }
        if coeff.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(AlgebraError::NonFinite {
                context: "term coefficient",
            });
        }
        if lambda.re > 0.0 {
            return Err(AlgebraError::GrowingTerm { lambda });
        }
        if lambda.re == 0.0 && lambda.im != 0.0 {
            return Err(AlgebraError::ImaginaryDecay { lambda });
        }
        let order = alpha.order();
        if order > self.freq.mode_cap() {
            return Err(AlgebraError::ModeCapExceeded {
                order,
                cap: self.freq.mode_cap(),
            });
        }
        if !alpha.is_zero() {
            let dot = self.freq.dot(&alpha);
            if dot.abs() <= self.freq.resonance_tol() {
                return Err(AlgebraError::ResonantMode {
                    alpha: alpha.as_slice().to_vec(),
                    dot,
                    tol: self.freq.resonance_tol(),
                });
            }
        }
        let key = TermKey {
            alpha,
            decay: Decay::new(lambda),
        };
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
            }
        }
        Ok(())
    }

    /// Frequency vector shared by every term.
    pub fn freq(&self) -> &FrequencyVector {
        &self.freq
    }

    /// Matrix dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of canonical terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates over canonical terms as `(alpha, lambda, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, C64, &DMatrix<C64>)> + '_ {
        self.terms
            .iter()
            .map(|(k, c)| (&k.alpha, k.decay.value(), c))
    }

    /// Coefficient stored at `(alpha, lambda)`, if any.
    pub fn coefficient(&self, alpha: &[i32], lambda: C64) -> Option<&DMatrix<C64>> {
        self.terms.get(&TermKey {
            alpha: MultiIndex::new(alpha.to_vec()),
            decay: Decay::new(lambda),
        })
    }

    /// Largest mode order `|alpha|_1` present.
    pub fn max_mode_order(&self) -> u32 {
        self.terms.keys().map(|k| k.alpha.order()).max().unwrap_or(0)
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

    fn prune(&mut self) {
        let max = self
            .terms
            .values()
            .map(op_norm_l1)
            .fold(0.0_f64, f64::max);
        if max == 0.0 {
            self.terms.clear();
        } else {
            self.terms.retain(|_, c| op_norm_l1(c) > DROP_TOL * max);
        }
    }

    /// Sum of two polynomials over the same frequency vector.
    pub fn add(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.add_scaled(rhs, C64::new(1.0, 0.0))
    }

    /// Difference of two polynomials.
    pub fn sub(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.add_scaled(rhs, C64::new(-1.0, 0.0))
    }

    /// `self + factor * rhs` in one pass.
    pub fn add_scaled(&self, rhs: &Self, factor: C64) -> Result<Self, AlgebraError> {
        self.compatible(rhs)?;
        let mut out = self.clone();
        for (key, coeff) in &rhs.terms {
            match out.terms.entry(key.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(coeff * factor);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() += coeff * factor;
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Scales every coefficient by a complex factor.
    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for coeff in out.terms.values_mut() {
            *coeff *= factor;
        }
        out.prune();
        out
    }

    /// Scales every coefficient by a real factor.
    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    /// Pointwise matrix product: modes add, decays add.
    ///
    /// Products of sharp terms stay sharp; a flat factor makes the product
    /// flat.  The result lives on the same frequency vector and is canonical.
    pub fn mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.compatible(rhs)?;
        let mut out = Self::zero(&self.freq, self.dim);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                out.insert(
                    k1.alpha.sum(&k2.alpha),
                    k1.decay.value() + k2.decay.value(),
                    c1 * c2,
                )?;
            }
        }
        out.prune();
        Ok(out)
    }

    /// Right-multiplies every coefficient by a constant matrix.
    pub fn mul_matrix_right(&self, m: &DMatrix<C64>) -> Result<Self, AlgebraError> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                left: self.dim,
                right: m.nrows().max(m.ncols()),
            });
        }
        let mut out = self.clone();
        for coeff in out.terms.values_mut() {
            *coeff = &*coeff * m;
        }
        out.prune();
        Ok(out)
    }

    /// Left-multiplies every coefficient by a constant matrix.
    pub fn mul_matrix_left(&self, m: &DMatrix<C64>) -> Result<Self, AlgebraError> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                left: self.dim,
                right: m.nrows().max(m.ncols()),
            });
        }
        let mut out = self.clone();
        for coeff in out.terms.values_mut() {
            *coeff = m * &*coeff;
        }
        out.prune();
        Ok(out)
    }

    /// Long-time average: the coefficient of the `(0, 0)` term.
    ///
    /// Sharp modes with `alpha != 0` average to zero because their inner
    /// products are non-resonant, and flat terms decay, so only the constant
    /// term survives.
    pub fn average(&self) -> DMatrix<C64> {
        let key = TermKey {
            alpha: MultiIndex::zero(self.freq.dim()),
            decay: Decay::new(C64::new(0.0, 0.0)),
        };
        self.terms
            .get(&key)
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(self.dim, self.dim))
    }

    /// The quasi-periodic part (terms with `lambda = 0`).
    pub fn sharp_part(&self) -> Self {
        let mut out = self.clone();
        out.terms.retain(|k, _| k.decay.is_zero());
        out
    }

    /// The decaying part (terms with `Re lambda < 0`).
    pub fn flat_part(&self) -> Self {
        let mut out = self.clone();
        out.terms.retain(|k, _| !k.decay.is_zero());
        out
    }

    /// Slowest decay rate `g = min(-Re lambda)` over flat terms, if any.
    pub fn flat_rate(&self) -> Option<f64> {
        self.terms
            .keys()
            .filter(|k| !k.decay.is_zero())
            .map(|k| -k.decay.value().re)
            .fold(None, |acc, g| Some(acc.map_or(g, |m: f64| m.min(g))))
    }

    /// The primitive with zero average.
    ///
    /// Requires the input mean to vanish (up to `1e-12` relative to the
    /// largest coefficient).  Sharp modes divide by `i <alpha, omega>`, flat
    /// terms by `lambda + i <alpha, omega>`; the flat part of the result is
    /// the tail integral that vanishes at `tau -> +infinity`, so the whole
    /// primitive has zero average again.
    pub fn zero_mean_primitive(&self) -> Result<Self, AlgebraError> {
        let scale = self
            .terms
            .values()
            .map(op_norm_l1)
            .fold(0.0_f64, f64::max)
            .max(1.0);
        let mean_norm = op_norm_l1(&self.average());
        if mean_norm > MEAN_TOL * scale {
            return Err(AlgebraError::NonzeroMean { norm: mean_norm });
        }
        let mut out = Self::zero(&self.freq, self.dim);
        for (key, coeff) in &self.terms {
            if key.alpha.is_zero() && key.decay.is_zero() {
                continue; // residual mean below tolerance: dropped
            }
            let z = C64::new(0.0, self.freq.dot(&key.alpha)) + key.decay.value();
            out.terms.insert(key.clone(), coeff.map(|c| c / z));
        }
        out.prune();
        Ok(out)
    }

    /// Termwise derivative of the requested order.
    pub fn derivative(&self, order: u32) -> Self {
        let mut out = self.clone();
        for (key, coeff) in out.terms.iter_mut() {
            let z = C64::new(0.0, self.freq.dot(&key.alpha)) + key.decay.value();
            *coeff *= z.powu(order);
        }
        out.prune();
        out
    }

    /// Mode-weighted norm: `sum_sharp e^{kappa |alpha|} |C| + sum_flat |C|`
    /// with the induced `l1` matrix norm.
    ///
    /// The sharp sum dominates the sup norm on any strip of width `kappa`;
    /// the flat sum dominates `sup_tau e^{g tau} |flat part|` for the stored
    /// decay rate `g`, since every flat factor `e^{(g + Re lambda) tau}` is
    /// at most one.
    pub fn norm_kappa(&self, kappa: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                if k.decay.is_zero() {
                    (kappa * f64::from(k.alpha.order())).exp() * op_norm_l1(c)
                } else {
                    op_norm_l1(c)
                }
            })
            .sum()
    }

    /// [`Self::norm_kappa`] in strict unit-rate mode: errors when a flat term
    /// decays slower than `e^{-tau}`.
    pub fn norm_kappa_unit_rate(&self, kappa: f64) -> Result<f64, AlgebraError> {
        for key in self.terms.keys() {
            let re = key.decay.value().re;
            if re < 0.0 && re > -1.0 {
                return Err(AlgebraError::FlatRateBelowUnit { rate: -re });
            }
        }
        Ok(self.norm_kappa(kappa))
    }

    /// Evaluates the polynomial at a phase `tau`.
    pub fn evaluate(&self, tau: f64) -> DMatrix<C64> {
        let mut acc = DMatrix::zeros(self.dim, self.dim);
        for (key, coeff) in &self.terms {
            let z = C64::new(0.0, self.freq.dot(&key.alpha)) + key.decay.value();
            let factor = (z * tau).exp();
            acc.zip_apply(coeff, |a, c| *a += c * factor);
        }
        acc
    }

    /// Evaluates and strips the imaginary part, which must be a residue below
    /// `1e-10` in magnitude.
    pub fn evaluate_real(&self, tau: f64) -> Result<DMatrix<f64>, AlgebraError> {
        let value = self.evaluate(tau);
        let residue = value.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if residue > IMAG_TOL {
            return Err(AlgebraError::ImaginaryResidue { residue });
        }
        Ok(value.map(|z| z.re))
    }

    /// Largest coefficient distance to another polynomial, over the union of
    /// canonical terms.  Two polynomials within `tol` of each other in this
    /// metric evaluate within `term_count * tol` everywhere.
    pub fn coefficient_distance(&self, rhs: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for (key, coeff) in &self.terms {
            let d = match rhs.terms.get(key) {
                Some(other) => op_norm_l1(&(coeff - other)),
                None => op_norm_l1(coeff),
            };
            worst = worst.max(d);
        }
        for (key, coeff) in &rhs.terms {
            if !self.terms.contains_key(key) {
                worst = worst.max(op_norm_l1(coeff));
            }
        }
        worst
    }
}

/// An antiderivative of an exponential-trigonometric polynomial.
///
/// The constant term integrates into a linear ramp; every other term divides
/// by its exponent.  Window integrals `int_{tau0}^{tau1}` are formed from the
/// ramp slope times the window length plus a difference of bounded
/// oscillatory values, which avoids cancellation for huge phases.
#[derive(Clone, Debug)]
pub struct Antiderivative {
    dim: usize,
    linear: DMatrix<C64>,
    terms: Vec<(C64, DMatrix<C64>)>,
}

impl Antiderivative {
    /// Builds the antiderivative; never fails because stored terms are
    /// non-resonant by construction.
    pub fn new(p: &ExpTrigPoly) -> Self {
        let linear = p.average();
        let mut terms = Vec::with_capacity(p.terms.len());
        for (key, coeff) in &p.terms {
            if key.alpha.is_zero() && key.decay.is_zero() {
                continue;
            }
            let z = C64::new(0.0, p.freq.dot(&key.alpha)) + key.decay.value();
            terms.push((z, coeff.map(|c| c / z)));
        }
        Self {
            dim: p.dim,
            linear,
            terms,
        }
    }

    /// Matrix dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Slope of the ramp part, i.e. the average of the integrand.
    pub fn mean(&self) -> &DMatrix<C64> {
        &self.linear
    }

    /// Sum of oscillatory coefficient norms; `2 *` this bounds the sup of the
    /// ramp-free part of any window integral.
    pub fn oscillatory_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| op_norm_l1(c)).sum()
    }

    /// The window integral `int_{tau0}^{tau1}` of the integrand.
    pub fn window(&self, tau0: f64, tau1: f64) -> DMatrix<C64> {
        let mut acc = &self.linear * C64::from(tau1 - tau0);
        for (z, coeff) in &self.terms {
            let factor = (z * tau1).exp() - (z * tau0).exp();
            acc.zip_apply(coeff, |a, c| *a += c * factor);
        }
        acc
    }

    /// Starts a cursor for scanning consecutive windows from `tau0`.
    pub fn cursor(&self, tau0: f64) -> WindowCursor<'_> {
        let base = self.terms.iter().map(|(z, _)| (z * tau0).exp()).collect();
        WindowCursor {
            anti: self,
            base_tau: tau0,
            base,
        }
    }
}

/// Scans window integrals with a moving base point, sharing exponentials
/// between the end of one window and the start of the next.
pub struct WindowCursor<'a> {
    anti: &'a Antiderivative,
    base_tau: f64,
    base: Vec<C64>,
}

impl WindowCursor<'_> {
    /// Current base point.
    pub fn base_tau(&self) -> f64 {
        self.base_tau
    }

    /// Integral from the base point to `tau`, leaving the base unchanged.
    pub fn window_to(&self, tau: f64) -> DMatrix<C64> {
        let mut acc = &self.anti.linear * C64::from(tau - self.base_tau);
        for ((z, coeff), b) in self.anti.terms.iter().zip(&self.base) {
            let factor = (z * tau).exp() - b;
            acc.zip_apply(coeff, |a, c| *a += c * factor);
        }
        acc
    }

    /// Integral from the base point to `tau`, then rebases there; only one
    /// set of exponentials is computed per call.
    pub fn step_to(&mut self, tau: f64) -> DMatrix<C64> {
        let mut acc = &self.anti.linear * C64::from(tau - self.base_tau);
        for ((z, coeff), b) in self.anti.terms.iter().zip(self.base.iter_mut()) {
            let e = (z * tau).exp();
            let factor = e - *b;
            *b = e;
            acc.zip_apply(coeff, |a, c| *a += c * factor);
        }
        self.base_tau = tau;
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn freq_1f() -> FrequencyVector {
        FrequencyVector::mono(PI).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cancelling_sum_collapses_to_zero() {
        let freq = freq_1f();
        let p = ExpTrigPoly::cosine(&freq, 0).unwrap();
        let diff = p.sub(&p).unwrap();
        assert!(diff.is_zero());
        assert_eq!(diff.term_count(), 0);
    }

    #[test]
    fn products_merge_into_canonical_modes() {
        let freq = freq_1f();
        let cos = ExpTrigPoly::cosine(&freq, 0).unwrap();
        // cos^2 = 1/2 + cos(2 omega tau) / 2: exactly three canonical terms.
        let sq = cos.mul(&cos).unwrap();
        assert_eq!(sq.term_count(), 3);
        let mean = sq.average();
        assert!((mean[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((sq.evaluate(0.3)[(0, 0)].re - (PI * 0.3).cos().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn sharp_times_flat_is_flat() {
        let freq = freq_1f();
        let cos = ExpTrigPoly::cosine(&freq, 0).unwrap();
        let flat = ExpTrigPoly::decaying(&freq, c(-1.0, 0.0), c(2.0, 0.0)).unwrap();
        let prod = cos.mul(&flat).unwrap();
        assert!(prod.sharp_part().is_zero());
        assert_eq!(prod.flat_rate(), Some(1.0));
        assert!(prod.average().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn purely_imaginary_decay_is_rejected() {
        let freq = freq_1f();
        let err = ExpTrigPoly::decaying(&freq, c(0.0, 1.0), c(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, AlgebraError::ImaginaryDecay { .. }));
        let err = ExpTrigPoly::decaying(&freq, c(0.5, 0.0), c(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, AlgebraError::GrowingTerm { .. }));
    }

    #[test]
    fn primitive_of_cosine_is_scaled_sine() {
        let freq = freq_1f();
        let cos = ExpTrigPoly::cosine(&freq, 0).unwrap();
        let prim = cos.zero_mean_primitive().unwrap();
        let sine = ExpTrigPoly::sine(&freq, 0).unwrap().scale_re(1.0 / PI);
        assert!(prim.coefficient_distance(&sine) < 1e-15);
    }

    #[test]
    fn primitive_of_decay_matches_closed_form() {
        let freq = freq_1f();
        let flat = ExpTrigPoly::decaying(&freq, c(-1.0, 0.0), c(3.0, 0.0)).unwrap();
        // int_{+inf}^tau 3 e^{-s} ds = -3 e^{-tau}
        let prim = flat.zero_mean_primitive().unwrap();
        assert!((prim.evaluate(0.7)[(0, 0)].re + 3.0 * (-0.7_f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn primitive_requires_zero_mean() {
        let freq = freq_1f();
        let p = ExpTrigPoly::scalar(&freq, c(1.0, 0.0));
        assert!(matches!(
            p.zero_mean_primitive(),
            Err(AlgebraError::NonzeroMean { .. })
        ));
    }

    #[test]
    fn derivative_undoes_primitive() {
        let freq = freq_1f();
        let cos = ExpTrigPoly::cosine(&freq, 0).unwrap();
        let flat = ExpTrigPoly::decaying(&freq, c(-2.0, 0.5 * PI * 0.0), c(1.5, 0.0)).unwrap();
        let p = cos.add(&flat).unwrap();
        let back = p.zero_mean_primitive().unwrap().derivative(1);
        assert!(back.coefficient_distance(&p) < 1e-14);
    }

    #[test]
    fn norm_weights_sharp_modes_only() {
        let freq = freq_1f();
        let cos = ExpTrigPoly::cosine(&freq, 0).unwrap();
        let flat = ExpTrigPoly::decaying(&freq, c(-1.0, 0.0), c(0.25, 0.0)).unwrap();
        let p = cos.add(&flat).unwrap();
        let kappa = 0.3_f64;
        let expect = kappa.exp() + 0.25;
        assert!((p.norm_kappa(kappa) - expect).abs() < 1e-14);
        // Slow decay trips the strict unit-rate mode.
        let slow = ExpTrigPoly::decaying(&freq, c(-0.5, 0.0), c(1.0, 0.0)).unwrap();
        assert!(matches!(
            slow.norm_kappa_unit_rate(0.0),
            Err(AlgebraError::FlatRateBelowUnit { .. })
        ));
    }

    #[test]
    fn window_integral_has_ramp_and_oscillation() {
        let freq = freq_1f();
        // integrand 2 + cos(pi tau)
        let p = ExpTrigPoly::scalar(&freq, c(2.0, 0.0))
            .add(&ExpTrigPoly::cosine(&freq, 0).unwrap())
            .unwrap();
        let anti = Antiderivative::new(&p);
        let (a, b) = (0.3, 1.9);
        let exact = 2.0 * (b - a) + ((PI * b).sin() - (PI * a).sin()) / PI;
        assert!((anti.window(a, b)[(0, 0)].re - exact).abs() < 1e-14);

        let mut cursor = anti.cursor(a);
        assert!((cursor.window_to(b)[(0, 0)].re - exact).abs() < 1e-14);
        let stepped = cursor.step_to(b);
        assert!((stepped[(0, 0)].re - exact).abs() < 1e-14);
        assert_eq!(cursor.base_tau(), b);
    }

    #[test]
    fn real_export_rejects_large_imaginary_residue() {
        let freq = freq_1f();
        let p = ExpTrigPoly::scalar(&freq, c(1.0, 1e-6));
        assert!(matches!(
            p.evaluate_real(0.0),
            Err(AlgebraError::ImaginaryResidue { .. })
        ));
        let q = ExpTrigPoly::cosine(&freq, 0).unwrap();
        let v = q.evaluate_real(0.25).unwrap();
        assert!((v[(0, 0)] - (PI * 0.25).cos()).abs() < 1e-14);
    }
}

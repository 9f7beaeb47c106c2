//! Shared oracle helpers for the integration suites.
//!
//! Everything here is deliberately primitive: plain complex arithmetic on
//! term dictionaries, adaptive Simpson quadrature, centered differences.
//! These recompute expected values through routes independent of the
//! library's algebra, so agreement is evidence rather than tautology.

#![allow(dead_code)] // each integration target links only what it uses

use std::collections::HashMap;

use micromacro::algebra::{ExpTrigPoly, FrequencyVector};
use micromacro::models::BlochConfig;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// A scalar exponential-trigonometric expression kept as a raw dictionary
/// `(alpha, lambda) -> coefficient`, manipulated with plain arithmetic.
#[derive(Clone, Debug, Default)]
pub struct TermMap {
    pub terms: HashMap<(Vec<i32>, [u64; 2]), C64>,
}

fn lambda_key(lambda: C64) -> [u64; 2] {
    // normalize -0.0 so that keys agree with arithmetic producing +0.0
    [(lambda.re + 0.0).to_bits(), (lambda.im + 0.0).to_bits()]
}

fn lambda_of(key: [u64; 2]) -> C64 {
    C64::new(f64::from_bits(key[0]), f64::from_bits(key[1]))
}

impl TermMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `c * e^{(i <alpha, omega> + lambda) tau}`.
    pub fn add(&mut self, alpha: Vec<i32>, lambda: C64, c: C64) {
        *self
            .terms
            .entry((alpha, lambda_key(lambda)))
            .or_insert(C64::new(0.0, 0.0)) += c;
    }

    /// Sum of two dictionaries.
    pub fn plus(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for ((alpha, lk), c) in &rhs.terms {
            out.add(alpha.clone(), lambda_of(*lk), *c);
        }
        out
    }

    /// Product: modes add, decay rates add, coefficients multiply.
    pub fn times(&self, rhs: &Self) -> Self {
        let mut out = Self::new();
        for ((a1, l1), c1) in &self.terms {
            for ((a2, l2), c2) in &rhs.terms {
                let alpha: Vec<i32> = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                out.add(alpha, lambda_of(*l1) + lambda_of(*l2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out
    }

    /// Primitive with zero mean: each term is divided by its exponent
    /// `z = i <alpha, omega> + lambda`. The constant sharp term must have
    /// (numerically) cancelled beforehand.
    pub fn primitive(&self, omega: &[f64]) -> Self {
        let mut out = Self::new();
        for ((alpha, lk), c) in &self.terms {
            let phase: f64 = alpha
                .iter()
                .zip(omega)
                .map(|(a, w)| *a as f64 * w)
                .sum();
            let z = C64::new(0.0, phase) + lambda_of(*lk);
            if z.norm() == 0.0 {
                assert!(
                    c.norm() < 1e-13,
                    "primitive of a term with nonzero mean: {c}"
                );
                continue;
            }
            out.add(alpha.clone(), lambda_of(*lk), c / z);
        }
        out
    }

    /// Pointwise evaluation by direct summation.
    pub fn eval(&self, omega: &[f64], tau: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for ((alpha, lk), c) in &self.terms {
            let phase: f64 = alpha
                .iter()
                .zip(omega)
                .map(|(a, w)| *a as f64 * w)
                .sum();
            let z = C64::new(0.0, phase) + lambda_of(*lk);
            acc += c * (z * tau).exp();
        }
        acc
    }

    /// Largest coefficient magnitude (for relative comparisons).
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Converts to a canonical scalar polynomial for coefficientwise
    /// comparison. Coefficients below `1e-15 * max` are dropped to match
    /// canonical pruning of exact zeros.
    pub fn to_poly(&self, freq: &FrequencyVector) -> ExpTrigPoly {
        let cutoff = 1e-15 * self.max_coeff();
        let terms = self.terms.iter().filter_map(|((alpha, lk), c)| {
            if c.norm() <= cutoff {
                return None;
            }
            Some((
                alpha.clone(),
                lambda_of(*lk),
                DMatrix::from_element(1, 1, *c),
            ))
        });
        ExpTrigPoly::from_terms(freq, 1, terms).expect("oracle terms are valid")
    }
}

/// `cos(omega_p tau)` over `r` frequencies as a dictionary.
pub fn cos_term(r: usize, p: usize) -> TermMap {
    let mut unit = vec![0i32; r];
    unit[p] = 1;
    let mut neg = vec![0i32; r];
    neg[p] = -1;
    let mut m = TermMap::new();
    m.add(unit, C64::new(0.0, 0.0), C64::new(0.5, 0.0));
    m.add(neg, C64::new(0.0, 0.0), C64::new(0.5, 0.0));
    m
}

/// `sin(omega_p tau)` over `r` frequencies as a dictionary.
pub fn sin_term(r: usize, p: usize) -> TermMap {
    let mut unit = vec![0i32; r];
    unit[p] = 1;
    let mut neg = vec![0i32; r];
    neg[p] = -1;
    let mut m = TermMap::new();
    m.add(unit, C64::new(0.0, 0.0), C64::new(0.0, -0.5));
    m.add(neg, C64::new(0.0, 0.0), C64::new(0.0, 0.5));
    m
}

/// A single decaying term `c e^{lambda tau}` with no oscillation.
pub fn flat_term(r: usize, lambda: C64, c: C64) -> TermMap {
    let mut m = TermMap::new();
    m.add(vec![0; r], lambda, c);
    m
}

/// Hand-built pieces of the scalar problem's forcing
/// `a = -1 + b + a_flat`: the oscillatory part `b`, its primitive `B`, and
/// the decaying part.
pub struct ToyOracle {
    pub omega: Vec<f64>,
    pub gamma: f64,
    /// `(1/r) sum_p cos(omega_p tau)`.
    pub b: TermMap,
    /// `gamma e^{-tau}`.
    pub a_flat: TermMap,
    /// First homological correction `C1 = B - gamma e^{-tau}` with
    /// `B = (1/r) sum_p sin(omega_p tau)/omega_p`.
    pub c1: TermMap,
    /// Second correction `C2 = P((b + a_flat) C1)`.
    pub c2: TermMap,
    /// The order-1 defect coefficient at `eps^1`: `-(b + a_flat) C1`.
    pub delta1: TermMap,
}

impl ToyOracle {
    pub fn build(omega: &[f64], gamma: f64) -> Self {
        let r = omega.len();
        let mut b = TermMap::new();
        for p in 0..r {
            b = b.plus(&cos_term(r, p).scale(C64::from(1.0 / r as f64)));
        }
        let a_flat = flat_term(r, C64::new(-1.0, 0.0), C64::from(gamma));
        let fluct = b.plus(&a_flat);
        let c1 = fluct.primitive(omega);
        let c2 = fluct.times(&c1).primitive(omega);
        let delta1 = fluct.times(&c1).scale(C64::from(-1.0));
        Self {
            omega: omega.to_vec(),
            gamma,
            b,
            a_flat,
            c1,
            c2,
            delta1,
        }
    }
}

/// Adaptive Simpson quadrature for complex integrands, with absolute
/// tolerance `tol` on both parts.
pub fn simpson<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> C64 {
    fn simpson_rule<F: Fn(f64) -> C64>(f: &F, a: f64, fa: C64, b: f64, fb: C64) -> (C64, C64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fm)
    }
    fn recurse<F: Fn(f64) -> C64>(
        f: &F,
        a: f64,
        fa: C64,
        b: f64,
        fb: C64,
        whole: C64,
        fm: C64,
        tol: f64,
        depth: u32,
    ) -> C64 {
        let m = 0.5 * (a + b);
        let (left, flm) = simpson_rule(f, a, fa, m, fm);
        let (right, frm) = simpson_rule(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, frm, 0.5 * tol, depth - 1)
    }
    if a == b {
        return C64::new(0.0, 0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, fm) = simpson_rule(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, fm, tol, 40)
}

/// Centered second difference at spacing `h`.
pub fn second_difference<F: Fn(f64) -> f64>(f: &F, t: f64, h: f64) -> f64 {
    (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h)
}

/// The driving field `V(tau) = (E0 / r) sum_p cos(omega_p tau)` of the rate
/// model, written out directly from the configuration.
pub fn bloch_driving(config: &BlochConfig, tau: f64) -> f64 {
    let r = config.omega.len() as f64;
    config.field_amplitude / r * config.omega.iter().map(|w| (w * tau).cos()).sum::<f64>()
}

/// The transition rate straight from its definition,
/// `Psi_lj(tau) = 2 |p_lj|^2 Re[ V(tau) int_0^tau e^{Omega_lj s} V(tau - s) ds ]`,
/// with the memory integral done by adaptive quadrature.
pub fn bloch_rate_by_quadrature(config: &BlochConfig, l: usize, j: usize, tau: f64) -> f64 {
    let big_omega = config.big_omega(l, j);
    let memory = simpson(
        &|s| (big_omega * s).exp() * C64::from(bloch_driving(config, tau - s)),
        0.0,
        tau,
        1e-12,
    );
    2.0 * config.dipole[l][j].powi(2) * (C64::from(bloch_driving(config, tau)) * memory).re
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|(x, _)| x.ln()).sum::<f64>() / n;
    let my = points.iter().map(|(_, y)| y.ln()).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in points {
        sxx += (x.ln() - mx) * (x.ln() - mx);
        sxy += (x.ln() - mx) * (y.ln() - my);
    }
    sxy / sxx
}

//! Frequency vectors, integer mode vectors and small-divisor bookkeeping.

use super::AlgebraError;

/// Default mode cap: terms with `|alpha|_1` beyond this are rejected.
pub(crate) const DEFAULT_MODE_CAP: u32 = 64;
/// Resonance tolerance as a fraction of the largest frequency magnitude.
const RESONANCE_TOL_FACTOR: f64 = 1e-10;

/// Integer mode vector `alpha` indexing a quasi-periodic mode `<alpha, omega>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<i32>);

impl MultiIndex {
    /// Builds a mode vector from its entries.
    pub fn new(entries: Vec<i32>) -> Self {
        Self(entries)
    }

    /// The zero mode of length `r`.
    pub fn zero(r: usize) -> Self {
        Self(vec![0; r])
    }

    /// The `p`-th unit mode of length `r` (zero-based `p`).
    pub fn unit(r: usize, p: usize) -> Self {
        let mut entries = vec![0; r];
        entries[p] = 1;
        Self(entries)
    }

    /// Number of components.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True when every component vanishes.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Order `|alpha|_1 = sum |alpha_p|`.
    pub fn order(&self) -> u32 {
        self.0.iter().map(|a| a.unsigned_abs()).sum()
    }

    /// True for the zero mode.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Inner product `<alpha, omega>` against a frequency slice.
    pub fn dot(&self, omega: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(omega)
            .map(|(&a, &w)| f64::from(a) * w)
            .sum()
    }

    /// Componentwise sum, as produced by products of modes.
    pub fn sum(&self, rhs: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&rhs.0)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    /// Componentwise negation.
    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|&a| -a).collect())
    }

    /// The raw components.
    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }
}

/// A real frequency vector `omega` together with its small-divisor data.
///
/// The pair `(c_d, nu)` quantifies the non-resonance bound
/// `|<alpha, omega>| >= c_d / |alpha|^nu` used when estimating primitives of
/// zero-mean quasi-periodic maps.  For a single frequency the bound is exact
/// with `nu = 0` and `c_d = |omega_1|`; for several frequencies use
/// [`FrequencyVector::certified`], which certifies the constant by scanning
/// every mode up to the cap.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyVector {
    omega: Vec<f64>,
    c_d: f64,
    nu: f64,
    resonance_tol: f64,
    mode_cap: u32,
}

impl FrequencyVector {
    /// Single-frequency vector; `nu = 0` and `c_d = |omega_1|` hold exactly.
    pub fn mono(omega: f64) -> Result<Self, AlgebraError> {
        if !omega.is_finite() || omega == 0.0 {
            return Err(AlgebraError::InvalidFrequency(format!(
                "frequency must be finite and nonzero, got {omega}"
            )));
        }
        Ok(Self {
            omega: vec![omega],
            c_d: omega.abs(),
            nu: 0.0,
            resonance_tol: RESONANCE_TOL_FACTOR * omega.abs(),
            mode_cap: DEFAULT_MODE_CAP,
        })
    }

    /// Multi-frequency vector with `c_d` certified by a finite scan.
    ///
    /// The constant is taken as the minimum of `|<alpha, omega>| * |alpha|^nu`
    /// over every nonzero mode with `|alpha|_1` up to the mode cap, so the
    /// non-resonance bound is exact for every mode the algebra can store.
    /// Fails if an exact resonance (inner product within the resonance
    /// tolerance) is found in that range.
    pub fn certified(omega: Vec<f64>, nu: f64) -> Result<Self, AlgebraError> {
        if omega.is_empty() {
            return Err(AlgebraError::InvalidFrequency("empty frequency vector".into()));
        }
        if omega.iter().any(|w| !w.is_finite() || *w == 0.0) {
            return Err(AlgebraError::InvalidFrequency(
                "frequencies must be finite and nonzero".into(),
            ));
        }
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(AlgebraError::InvalidFrequency(format!(
                "diophantine exponent must be finite and non-negative, got {nu}"
            )));
        }
        if omega.len() == 1 {
            return Self::mono(omega[0]);
        }
        let max_omega = omega.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
        let tol = RESONANCE_TOL_FACTOR * max_omega;
        let c_d = scan_diophantine(&omega, nu, DEFAULT_MODE_CAP, tol)?;
        Ok(Self {
            omega,
            c_d,
            nu,
            resonance_tol: tol,
            mode_cap: DEFAULT_MODE_CAP,
        })
    }

    /// Rebuilds a frequency vector from explicitly trusted constants.
    pub fn with_constants(
        omega: Vec<f64>,
        c_d: f64,
        nu: f64,
        resonance_tol: f64,
        mode_cap: u32,
    ) -> Result<Self, AlgebraError> {
        if omega.is_empty() || omega.iter().any(|w| !w.is_finite() || *w == 0.0) {
            return Err(AlgebraError::InvalidFrequency(
                "frequencies must be finite and nonzero".into(),
            ));
        }
        if !(c_d.is_finite() && c_d > 0.0) || !(nu.is_finite() && nu >= 0.0) {
            return Err(AlgebraError::InvalidFrequency(
                "small-divisor constants must be finite and positive".into(),
            ));
        }
        if !(resonance_tol.is_finite() && resonance_tol > 0.0) || mode_cap == 0 {
            return Err(AlgebraError::InvalidFrequency(
                "resonance tolerance and mode cap must be positive".into(),
            ));
        }
        Ok(Self {
            omega,
            c_d,
            nu,
            resonance_tol,
            mode_cap,
        })
    }

    /// Replaces the mode cap.
    pub fn with_mode_cap(mut self, cap: u32) -> Self {
        self.mode_cap = cap.max(1);
        self
    }

    /// Number of constituent frequencies.
    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    /// The frequencies themselves.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Certified small-divisor constant `c_d`.
    pub fn c_d(&self) -> f64 {
        self.c_d
    }

    /// Diophantine exponent `nu`.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Inner products below this magnitude count as resonant.
    pub fn resonance_tol(&self) -> f64 {
        self.resonance_tol
    }

    /// Largest admissible mode order `|alpha|_1`.
    pub fn mode_cap(&self) -> u32 {
        self.mode_cap
    }

    /// Inner product `<alpha, omega>`.
    pub fn dot(&self, alpha: &MultiIndex) -> f64 {
        alpha.dot(&self.omega)
    }

    /// Integration constant `c_I(kappa)` bounding the loss incurred by one
    /// zero-mean primitive in the mode-weighted norms: `max(1, 1/c_d)` for
    /// `nu = 0` and `max(1, (nu/(kappa e))^nu / c_d)` otherwise.
    pub fn integration_constant(&self, kappa: f64) -> f64 {
        if self.nu == 0.0 {
            (1.0 / self.c_d).max(1.0)
        } else if kappa <= 0.0 {
            f64::INFINITY
        } else {
            ((self.nu / (kappa * std::f64::consts::E)).powf(self.nu) / self.c_d).max(1.0)
        }
    }
}

/// Minimum of `|<alpha, omega>| * |alpha|^nu` over `0 < |alpha|_1 <= cap`.
fn scan_diophantine(
    omega: &[f64],
    nu: f64,
    cap: u32,
    resonance_tol: f64,
) -> Result<f64, AlgebraError> {
    let r = omega.len();
    let bound = cap as i64;
    let mut alpha = vec![-bound; r];
    let mut best = f64::INFINITY;
    loop {
        let order: i64 = alpha.iter().map(|a| a.abs()).sum();
        if order > 0 && order <= bound {
            // Only half of the lattice matters: alpha and -alpha give the
            // same magnitude.
            if alpha.iter().find(|a| **a != 0).is_some_and(|a| *a > 0) {
                let dot: f64 = alpha
                    .iter()
                    .zip(omega)
                    .map(|(&a, &w)| a as f64 * w)
                    .sum::<f64>()
                    .abs();
                if dot <= resonance_tol {
                    return Err(AlgebraError::ResonantMode {
                        alpha: alpha.iter().map(|&a| a as i32).collect(),
                        dot,
                        tol: resonance_tol,
                    });
                }
                best = best.min(dot * (order as f64).powf(nu));
            }
        }
        // Odometer increment over the cube [-cap, cap]^r.
        let mut p = 0;
        loop {
            if p == r {
                return Ok(best);
            }
            alpha[p] += 1;
            if alpha[p] <= bound {
                break;
            }
            alpha[p] = -bound;
            p += 1;
        }
    }
}

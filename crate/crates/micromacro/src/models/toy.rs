//! A scalar problem with known solution, used to exercise every layer.
//!
//! The equation is `du/dt = a(t/eps) u` with
//!
//! ```text
//! a(tau) = -1 + (1/r) sum_p cos(omega_p tau) + gamma e^{-tau},
//! ```
//!
//! whose solution is available in closed form for every `eps`:
//!
//! ```text
//! u(t) = u0 exp(-t + eps B(t/eps) + eps gamma (1 - e^{-t/eps})),
//! B(tau) = (1/r) sum_p sin(omega_p tau) / omega_p.
//! ```
//!
//! Error sweeps against this exact solution need no reference integration,
//! which keeps the uniform-accuracy studies honest and fast.

use serde::{Deserialize, Serialize};

use crate::algebra::{ExpTrigPoly, FrequencyVector};
use crate::averaging::SharpFlatField;
use num_complex::Complex64 as C64;

use super::ModelError;

/// Configuration of the scalar test problem.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ToyConfig {
    /// Frequencies `omega_p` of the quasi-periodic part.
    pub omega: Vec<f64>,
    /// Amplitude `gamma >= 0` of the decaying part.
    pub gamma: f64,
    /// Initial value.
    pub u0: f64,
    /// Final physical time of sweeps.
    pub horizon: f64,
}

impl ToyConfig {
    /// Single frequency `pi`, with the decaying term switched on.
    pub fn mono() -> Self {
        Self {
            omega: vec![std::f64::consts::PI],
            gamma: 1.0,
            u0: 1.0,
            horizon: 10.0,
        }
    }

    /// Three rationally independent frequencies `(1, pi, sqrt(5) pi)`.
    pub fn multi() -> Self {
        Self {
            omega: vec![
                1.0,
                std::f64::consts::PI,
                5.0_f64.sqrt() * std::f64::consts::PI,
            ],
            gamma: 1.0,
            u0: 1.0,
            horizon: 10.0,
        }
    }

    /// Same configuration with a different decay amplitude.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// Checks the configuration before building anything from it.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.omega.is_empty() {
            return Err(ModelError::InvalidConfig(
                "at least one frequency is required".into(),
            ));
        }
        if self.omega.iter().any(|w| !w.is_finite() || *w == 0.0) {
            return Err(ModelError::InvalidConfig(
                "frequencies must be finite and nonzero".into(),
            ));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(ModelError::InvalidConfig(
                "decay amplitude must be finite and nonnegative".into(),
            ));
        }
        if !self.u0.is_finite() {
            return Err(ModelError::InvalidConfig("initial value must be finite".into()));
        }
        if !(self.horizon > 0.0) {
            return Err(ModelError::InvalidConfig("horizon must be positive".into()));
        }
        Ok(())
    }

    /// The frequency vector, with small-divisor constants certified by a
    /// lattice scan when there is more than one frequency.
    pub fn frequency(&self) -> Result<FrequencyVector, ModelError> {
        self.validate()?;
        let freq = if self.omega.len() == 1 {
            FrequencyVector::mono(self.omega[0])?
        } else {
            FrequencyVector::certified(self.omega.clone(), (self.omega.len() - 1) as f64)?
        };
        Ok(freq)
    }

    /// The forcing field `a(tau)` wrapped with its analytic data.
    pub fn field(&self) -> Result<SharpFlatField, ModelError> {
        let freq = self.frequency()?;
        let r = self.omega.len();
        let mut a = ExpTrigPoly::scalar(&freq, C64::from(-1.0));
        for p in 0..r {
            a = a.add(&ExpTrigPoly::cosine(&freq, p)?.scale_re(1.0 / r as f64))?;
        }
        if self.gamma != 0.0 {
            a = a.add(&ExpTrigPoly::decaying(
                &freq,
                C64::from(-1.0),
                C64::from(self.gamma),
            )?)?;
        }
        Ok(SharpFlatField::new(a)?)
    }

    /// Primitive `B(tau) = (1/r) sum_p sin(omega_p tau) / omega_p` of the
    /// zero-mean sharp part.
    pub fn sharp_primitive(&self, tau: f64) -> f64 {
        let r = self.omega.len() as f64;
        self.omega.iter().map(|w| (w * tau).sin() / w).sum::<f64>() / r
    }

    /// The exact solution at time `t` for scale parameter `eps > 0`.
    pub fn exact(&self, eps: f64, t: f64) -> f64 {
        let tau = t / eps;
        let phase =
            -t + eps * self.sharp_primitive(tau) + eps * self.gamma * (1.0 - (-tau).exp());
        self.u0 * phase.exp()
    }

    /// The averaged (`eps -> 0`) solution at time `t`.
    pub fn limit(&self, t: f64) -> f64 {
        self.u0 * (-t).exp()
    }

    /// The initial value as a complex vector, ready for the integrators.
    pub fn initial_vector(&self) -> nalgebra::DVector<C64> {
        nalgebra::DVector::from_element(1, C64::from(self.u0))
    }
}

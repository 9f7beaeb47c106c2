//! Transition rates between atomic levels driven by a quasi-periodic field.
//!
//! In the weak-coupling transitional regime, populations `u_j` of an
//! `N`-level system with energies `E_j`, damping `gamma_lj`, and dipole
//! moments `p_lj` obey the rate equation `du/dt = a(t/eps^2) u`.  For the
//! polychromatic field `V(tau) = (E0 / r) sum_p cos(omega_p tau)`, the
//! off-diagonal rate is
//!
//! ```text
//! Psi_lj(tau) = 2 |p_lj|^2 Re[ V(tau) int_0^tau e^{Omega_lj s} V(tau - s) ds ],
//! Omega_lj    = -i (E_l - E_j) - gamma_lj,
//! ```
//!
//! which the functions here expand exactly into a sharp (quasi-periodic)
//! part plus a flat part decaying like `e^{-gamma_lj tau}`.  Diagonal
//! entries balance the off-diagonal ones, so column sums vanish and total
//! population is conserved.  The expansion is written with the kernels
//!
//! ```text
//! R(tau, omega, Omega) =  Re[ omega e^{Omega tau} / (omega^2 + Omega^2) ],
//! S(tau, omega, Omega) = -Re[ Omega e^{Omega tau} / (omega^2 + Omega^2) ],
//! ```
//!
//! evaluated at `tau = 0` for the stationary sharp coefficients and kept as
//! decaying exponentials for the flat part.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{ExpTrigPoly, FrequencyVector};
use crate::averaging::SharpFlatField;

use super::ModelError;

/// Resonance kernel `R(tau, omega, Omega)`.
pub fn rate_r(tau: f64, omega: f64, big_omega: C64) -> f64 {
    (C64::from(omega) * (big_omega * tau).exp()
        / (C64::from(omega * omega) + big_omega * big_omega))
        .re
}

/// Resonance kernel `S(tau, omega, Omega)`.
pub fn rate_s(tau: f64, omega: f64, big_omega: C64) -> f64 {
    -(big_omega * (big_omega * tau).exp()
        / (C64::from(omega * omega) + big_omega * big_omega))
        .re
}

/// Stationary kernel `S(0, omega, Omega)` written as a pair of Lorentzians
/// centred at `omega = -delta_e` and `omega = +delta_e`:
///
/// ```text
/// S(0) = (gamma / 2) [ 1 / (gamma^2 + (omega + delta_e)^2)
///                    + 1 / (gamma^2 + (omega - delta_e)^2) ].
/// ```
///
/// Algebraically identical to [`rate_s`] at `tau = 0` with
/// `Omega = -i delta_e - gamma`; the two routes cross-check each other.
pub fn s_lorentzian(omega: f64, delta_e: f64, gamma: f64) -> f64 {
    0.5 * gamma
        * (1.0 / (gamma * gamma + (omega + delta_e).powi(2))
            + 1.0 / (gamma * gamma + (omega - delta_e).powi(2)))
}

/// Which part of the transition rates drives the equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateKind {
    /// Keep the decaying memory of the switch-on transient.
    #[serde(rename = "with_flat")]
    WithFlat,
    /// Keep only the stationary quasi-periodic rates.
    #[serde(rename = "oscillatory_only")]
    OscillatoryOnly,
}

/// Configuration of the level system and driving field.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BlochConfig {
    /// Level energies `E_j`.
    pub energies: Vec<f64>,
    /// Symmetric damping rates `gamma_lj` (diagonal unused).
    pub damping: Vec<Vec<f64>>,
    /// Symmetric dipole magnitudes `|p_lj|` (diagonal unused).
    pub dipole: Vec<Vec<f64>>,
    /// Field amplitude `E0`.
    pub field_amplitude: f64,
    /// Field frequencies `omega_p`.
    pub omega: Vec<f64>,
    /// Which rate parts to keep.
    pub rate_kind: RateKind,
    /// Initial populations.
    pub initial: Vec<f64>,
    /// Final physical time of sweeps.
    pub horizon: f64,
}

fn ones_offdiag(d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
        .collect()
}

impl BlochConfig {
    /// Three levels at energies `(0, 2, 3)`, monochromatic driving at
    /// frequency `pi`, transient memory kept.
    pub fn three_level_mono() -> Self {
        Self {
            energies: vec![0.0, 2.0, 3.0],
            damping: ones_offdiag(3),
            dipole: ones_offdiag(3),
            field_amplitude: 1.0,
            omega: vec![std::f64::consts::PI],
            rate_kind: RateKind::WithFlat,
            initial: vec![0.0, 0.0, 1.0],
            horizon: 10.0,
        }
    }

    /// The same levels driven at `(1, pi, sqrt(5) pi)`, stationary rates
    /// only.
    pub fn three_level_multi() -> Self {
        Self {
            omega: vec![
                1.0,
                std::f64::consts::PI,
                5.0_f64.sqrt() * std::f64::consts::PI,
            ],
            rate_kind: RateKind::OscillatoryOnly,
            ..Self::three_level_mono()
        }
    }

    /// Number of levels.
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Checks symmetry, signs, and sizes before building anything.
    pub fn validate(&self) -> Result<(), ModelError> {
        let d = self.dim();
        if d < 2 {
            return Err(ModelError::InvalidConfig(
                "at least two levels are required".into(),
            ));
        }
        for (name, m) in [("damping", &self.damping), ("dipole", &self.dipole)] {
            if m.len() != d || m.iter().any(|row| row.len() != d) {
                return Err(ModelError::InvalidConfig(format!(
                    "{name} matrix must be {d} x {d}"
                )));
            }
            for l in 0..d {
                for j in 0..d {
                    if !m[l][j].is_finite() || m[l][j] < 0.0 {
                        return Err(ModelError::InvalidConfig(format!(
                            "{name}[{l}][{j}] must be finite and nonnegative"
                        )));
                    }
                    if (m[l][j] - m[j][l]).abs() > 1e-14 {
                        return Err(ModelError::InvalidConfig(format!(
                            "{name} matrix must be symmetric"
                        )));
                    }
                }
            }
        }
        if self.rate_kind == RateKind::WithFlat {
            for l in 0..d {
                for j in 0..d {
                    if l != j && self.damping[l][j] < 1.0 {
                        return Err(ModelError::InvalidConfig(
                            "transient rates require damping >= 1; rescale the fast time \
                             or drop the flat part"
                                .into(),
                        ));
                    }
                }
            }
        }
        if !(self.field_amplitude > 0.0) {
            return Err(ModelError::InvalidConfig(
                "field amplitude must be positive".into(),
            ));
        }
        if self.omega.is_empty() || self.omega.iter().any(|w| !w.is_finite() || *w == 0.0) {
            return Err(ModelError::InvalidConfig(
                "field frequencies must be finite and nonzero".into(),
            ));
        }
        if self.initial.len() != d || self.initial.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "initial populations must be {d} finite nonnegative numbers"
            )));
        }
        if !(self.horizon > 0.0) {
            return Err(ModelError::InvalidConfig("horizon must be positive".into()));
        }
        Ok(())
    }

    /// The frequency vector of the driving field, certified for the
    /// multi-frequency case.
    pub fn frequency(&self) -> Result<FrequencyVector, ModelError> {
        self.validate()?;
        let freq = if self.omega.len() == 1 {
            FrequencyVector::mono(self.omega[0])?
        } else {
            FrequencyVector::certified(self.omega.clone(), (self.omega.len() - 1) as f64)?
        };
        Ok(freq)
    }

    /// Complex rate `Omega_lj = -i (E_l - E_j) - gamma_lj`.
    pub fn big_omega(&self, l: usize, j: usize) -> C64 {
        C64::new(-self.damping[l][j], -(self.energies[l] - self.energies[j]))
    }

    /// The transition rate `Psi_lj` as an exact sharp-plus-flat polynomial.
    pub fn transition_poly(
        &self,
        freq: &FrequencyVector,
        l: usize,
        j: usize,
    ) -> Result<ExpTrigPoly, ModelError> {
        let r = self.omega.len();
        let pref =
            2.0 * self.field_amplitude.powi(2) / (r * r) as f64 * self.dipole[l][j].powi(2);
        let omega_lj = self.big_omega(l, j);
        let mut acc = ExpTrigPoly::zero(freq, 1);
        for p1 in 0..r {
            let cos1 = ExpTrigPoly::cosine(freq, p1)?;
            for p2 in 0..r {
                let w2 = self.omega[p2];
                let r0 = rate_r(0.0, w2, omega_lj);
                let s0 = rate_s(0.0, w2, omega_lj);
                let stationary = ExpTrigPoly::sine(freq, p2)?
                    .scale_re(r0)
                    .add(&ExpTrigPoly::cosine(freq, p2)?.scale_re(s0))?;
                acc = acc.add(&cos1.mul(&stationary)?)?;
                // S(tau) decomposed into the conjugate pair of decaying
                // exponentials; the minus sign matches -Re[Omega e^{..}].
                let c = omega_lj / (C64::from(w2 * w2) + omega_lj * omega_lj);
                let s_tau = ExpTrigPoly::decaying(freq, omega_lj, -0.5 * c)?.add(
                    &ExpTrigPoly::decaying(freq, omega_lj.conj(), -0.5 * c.conj())?,
                )?;
                acc = acc.add(&cos1.mul(&s_tau)?.neg())?;
            }
        }
        Ok(acc.scale_re(pref))
    }

    /// Long-time mean of `Psi_lj` in closed form:
    /// `(E0^2 / r^2) |p_lj|^2 sum_p S(0, omega_p, Omega_lj)`.
    pub fn mean_rate(&self, l: usize, j: usize) -> f64 {
        let r = self.omega.len();
        let omega_lj = self.big_omega(l, j);
        let pref = self.field_amplitude.powi(2) / (r * r) as f64 * self.dipole[l][j].powi(2);
        pref * self
            .omega
            .iter()
            .map(|w| rate_s(0.0, *w, omega_lj))
            .sum::<f64>()
    }

    /// Assembles the rate matrix field `a(tau)`: off-diagonal gains
    /// `a_jk = Psi_kj`, diagonal losses `a_jj = -sum_{l != j} Psi_lj`.
    ///
    /// Each unordered pair shares one polynomial (`Psi` is symmetric because
    /// `Omega_jl = conj(Omega_lj)`), so every column of every coefficient
    /// matrix sums to exactly zero and total population is conserved.
    pub fn rate_field(&self) -> Result<SharpFlatField, ModelError> {
        let freq = self.frequency()?;
        let d = self.dim();
        let zero = ExpTrigPoly::zero(&freq, 1);
        // transition polynomials for unordered pairs, built once
        let mut psis = vec![vec![None; d]; d];
        for l in 0..d {
            for j in (l + 1)..d {
                let mut psi = self.transition_poly(&freq, l, j)?;
                if self.rate_kind == RateKind::OscillatoryOnly {
                    psi = psi.sharp_part();
                }
                psis[l][j] = Some(psi);
            }
        }
        let pair = |l: usize, j: usize| -> &ExpTrigPoly {
            psis[l.min(j)][l.max(j)].as_ref().expect("filled above")
        };
        let mut entries = vec![vec![zero.clone(); d]; d];
        for j in 0..d {
            let mut loss = zero.clone();
            for l in 0..d {
                if l == j {
                    continue;
                }
                entries[j][l] = pair(j, l).clone();
                loss = loss.add(pair(l, j))?;
            }
            entries[j][j] = loss.neg();
        }
        let a = ExpTrigPoly::from_scalar_entries(&freq, &entries)?;
        Ok(SharpFlatField::new(a)?)
    }

    /// The stationary transition rate `Upsilon_lj` of the monochromatic
    /// permanent regime:
    ///
    /// ```text
    /// Upsilon_lj(tau) = (E0^2 |p_lj|^2 / omega)
    ///                   [ sin^2(omega tau) R(0) + sin cos S(0) ].
    /// ```
    pub fn upsilon_inf(
        &self,
        freq: &FrequencyVector,
        l: usize,
        j: usize,
    ) -> Result<ExpTrigPoly, ModelError> {
        let [omega] = self.omega.as_slice() else {
            return Err(ModelError::InvalidConfig(
                "the permanent-regime rate is defined for monochromatic driving".into(),
            ));
        };
        let omega_lj = self.big_omega(l, j);
        let pref = self.field_amplitude.powi(2) * self.dipole[l][j].powi(2) / omega;
        let sin = ExpTrigPoly::sine(freq, 0)?;
        let cos = ExpTrigPoly::cosine(freq, 0)?;
        let r0 = rate_r(0.0, *omega, omega_lj);
        let s0 = rate_s(0.0, *omega, omega_lj);
        Ok(sin
            .mul(&sin.scale_re(r0).add(&cos.scale_re(s0))?)?
            .scale_re(pref))
    }

    /// Mean of [`Self::upsilon_inf`] in closed form:
    /// `E0^2 |p_lj|^2 R(0) / (2 omega)`.
    pub fn upsilon_inf_mean(&self, l: usize, j: usize) -> Result<f64, ModelError> {
        let [omega] = self.omega.as_slice() else {
            return Err(ModelError::InvalidConfig(
                "the permanent-regime rate is defined for monochromatic driving".into(),
            ));
        };
        let r0 = rate_r(0.0, *omega, self.big_omega(l, j));
        Ok(self.field_amplitude.powi(2) * self.dipole[l][j].powi(2) * r0 / (2.0 * omega))
    }

    /// Mean of the product `Psi^inf_lj Upsilon^inf_ki` in closed form:
    ///
    /// ```text
    /// (E0^4 |p_lj|^2 |p_ki|^2 / (4 omega)) (R_lj S_ki + S_lj R_ki),
    /// ```
    ///
    /// the only stationary products surviving the averages
    /// `<cos^2 sin^2> = 1/8` and `<odd powers> = 0`.
    pub fn psi_upsilon_mean(
        &self,
        (l, j): (usize, usize),
        (k, i): (usize, usize),
    ) -> Result<f64, ModelError> {
        let [omega] = self.omega.as_slice() else {
            return Err(ModelError::InvalidConfig(
                "the permanent-regime rate is defined for monochromatic driving".into(),
            ));
        };
        let om_lj = self.big_omega(l, j);
        let om_ki = self.big_omega(k, i);
        let pref = self.field_amplitude.powi(4)
            * self.dipole[l][j].powi(2)
            * self.dipole[k][i].powi(2)
            / (4.0 * omega);
        Ok(pref
            * (rate_r(0.0, *omega, om_lj) * rate_s(0.0, *omega, om_ki)
                + rate_s(0.0, *omega, om_lj) * rate_r(0.0, *omega, om_ki)))
    }

    /// Initial populations as a complex vector.
    pub fn initial_vector(&self) -> DVector<C64> {
        DVector::from_iterator(self.initial.len(), self.initial.iter().map(|x| C64::from(*x)))
    }
}

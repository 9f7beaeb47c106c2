//! Error sweeps over `(dt, eps)` grids, with reference solutions, order
//! fits, and CSV emission.
//!
//! A sweep fixes a problem, a scheme, and a mode (micro-macro or direct),
//! then measures the discrete error
//!
//! ```text
//! E(dt, eps) = max_ell | u_ref(t_ell) - u_ell |_{l1}
//! ```
//!
//! over every stored step against a reference: the closed-form solution for
//! the scalar problem, or a fine exact-window Euler run for the rate model.
//! Uniform accuracy means the error curves for different `eps` stack on top
//! of each other instead of degrading as `eps` shrinks.

mod emit;
mod fit;

pub use emit::{read_records_csv, write_records_csv, write_series_by_dt, write_series_by_eps};
pub use fit::{fit_order, fit_records, OrderFit};

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{vec_norm_l1, AlgebraError};
use crate::averaging::{AveragingError, MicroMacroDecomposition, SharpFlatField};
use crate::integrators::{
    DirectProblem, IntegratorError, MicroMacroProblem, SchemeKind, SolveMode, Trajectory,
};
use crate::models::{BlochConfig, ModelError, ToyConfig};

/// Errors from the sweep layer.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Averaging(#[from] AveragingError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error("time {t} does not align with the reference sample grid")]
    MisalignedGrid { t: f64 },
    #[error("not enough usable points for a fit: {usable}")]
    InsufficientData { usable: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("records file rejected: {0}")]
    Csv(String),
}

/// The two bundled problems.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind")]
pub enum Problem {
    #[serde(rename = "toy")]
    Toy(ToyConfig),
    #[serde(rename = "bloch")]
    Bloch(BlochConfig),
}

impl Problem {
    /// Short label used in record files: base name plus frequency count,
    /// e.g. `toy-1f` or `bloch-3f`.
    pub fn label(&self) -> String {
        match self {
            Problem::Toy(c) => format!("toy-{}f", c.omega.len()),
            Problem::Bloch(c) => format!("bloch-{}f", c.omega.len()),
        }
    }

    /// Final physical time of sweeps.
    pub fn horizon(&self) -> f64 {
        match self {
            Problem::Toy(c) => c.horizon,
            Problem::Bloch(c) => c.horizon,
        }
    }

    /// Initial value.
    pub fn initial_vector(&self) -> DVector<C64> {
        match self {
            Problem::Toy(c) => c.initial_vector(),
            Problem::Bloch(c) => c.initial_vector(),
        }
    }

    /// The forcing field.
    pub fn field(&self) -> Result<SharpFlatField, ModelError> {
        match self {
            Problem::Toy(c) => c.field(),
            Problem::Bloch(c) => c.rate_field(),
        }
    }

    /// Maps the physical scale parameter to the one the averaging sees:
    /// the identity for the scalar problem, `eps^2` for the rate model,
    /// whose coefficients live on the slow time `t / eps^2`.
    pub fn averaging_eps(&self, eps: f64) -> f64 {
        match self {
            Problem::Toy(_) => eps,
            Problem::Bloch(_) => eps * eps,
        }
    }

    /// True when a closed-form solution is available.
    pub fn has_closed_form(&self) -> bool {
        matches!(self, Problem::Toy(_))
    }
}

/// How reference values are produced.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind")]
pub enum ReferencePolicy {
    /// The closed-form solution (scalar problem only); essentially exact.
    #[serde(rename = "exact")]
    Exact,
    /// A fine exact-window Euler run sampled on a uniform grid of `store`
    /// intervals; `accuracy` is the error this reference is trusted to.
    #[serde(rename = "fine_integral_euler")]
    FineIntegralEuler {
        steps: usize,
        store: usize,
        accuracy: f64,
    },
}

impl ReferencePolicy {
    /// Default fine-run policy for the rate model: `2e6` exact-window Euler
    /// steps (`dt = 5e-6` over `T = 10`), stored every 625 steps, trusted to
    /// `1e-5`.
    pub fn default_fine() -> Self {
        ReferencePolicy::FineIntegralEuler {
            steps: 2_000_000,
            store: 3200,
            accuracy: 1e-5,
        }
    }
}

/// Reference values for one `(problem, eps)` pair.
#[derive(Clone, Debug)]
pub struct Reference {
    accuracy: f64,
    data: ReferenceData,
}

#[derive(Clone, Debug)]
enum ReferenceData {
    Closed { config: ToyConfig, eps: f64 },
    Sampled { horizon: f64, values: Vec<DVector<C64>> },
}

impl Reference {
    /// Error level this reference is trusted to.
    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    /// Reference value at time `t`, which must lie on the sample grid for
    /// sampled references.
    pub fn value_at(&self, t: f64) -> Result<DVector<C64>, HarnessError> {
        match &self.data {
            ReferenceData::Closed { config, eps } => Ok(DVector::from_element(
                1,
                C64::from(config.exact(*eps, t)),
            )),
            ReferenceData::Sampled { horizon, values } => {
                let step = horizon / (values.len() - 1) as f64;
                let idx = (t / step).round();
                if (t - idx * step).abs() > 1e-9 * horizon.max(1.0) {
                    return Err(HarnessError::MisalignedGrid { t });
                }
                let idx = idx as usize;
                values
                    .get(idx)
                    .cloned()
                    .ok_or(HarnessError::MisalignedGrid { t })
            }
        }
    }
}

/// Cache of references shared between sweeps (same problem, same `eps`),
/// so several schemes can reuse one fine run.
#[derive(Default)]
pub struct ReferenceCache {
    map: HashMap<(String, u64, u64), Arc<Reference>>,
}

impl ReferenceCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(problem: &Problem, policy: &ReferencePolicy, eps: f64) -> (String, u64, u64) {
        let policy_tag = match policy {
            ReferencePolicy::Exact => 0,
            ReferencePolicy::FineIntegralEuler { steps, .. } => *steps as u64,
        };
        (problem.label(), eps.to_bits(), policy_tag)
    }

    /// Returns the cached reference or builds and stores it.
    pub fn get_or_build(
        &mut self,
        problem: &Problem,
        policy: &ReferencePolicy,
        eps: f64,
    ) -> Result<Arc<Reference>, HarnessError> {
        let key = Self::key(problem, policy, eps);
        if let Some(r) = self.map.get(&key) {
            return Ok(r.clone());
        }
        let built = Arc::new(build_reference(problem, policy, eps)?);
        self.map.insert(key, built.clone());
        Ok(built)
    }

    /// Number of cached references.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// True when nothing is cached yet.
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Builds a reference for one `(problem, eps)` pair.
pub fn build_reference(
    problem: &Problem,
    policy: &ReferencePolicy,
    eps: f64,
) -> Result<Reference, HarnessError> {
    match policy {
        ReferencePolicy::Exact => match problem {
            Problem::Toy(config) => Ok(Reference {
                accuracy: 1e-14,
                data: ReferenceData::Closed {
                    config: config.clone(),
                    eps,
                },
            }),
            Problem::Bloch(_) => Err(HarnessError::InvalidConfig(
                "the rate model has no closed-form solution; use a fine reference run".into(),
            )),
        },
        ReferencePolicy::FineIntegralEuler {
            steps,
            store,
            accuracy,
        } => {
            if steps % store != 0 {
                return Err(HarnessError::InvalidConfig(format!(
                    "reference steps {steps} must be a multiple of the stored intervals {store}"
                )));
            }
            let field = problem.field()?;
            let direct = DirectProblem::new(field.forcing(), problem.averaging_eps(eps))?;
            let traj = direct.solve(
                SchemeKind::IntegralEuler,
                &problem.initial_vector(),
                problem.horizon(),
                *steps,
                steps / store,
            )?;
            if traj.blew_up {
                return Err(HarnessError::InvalidConfig(format!(
                    "reference run blew up for eps = {eps:e}; it cannot serve as a reference"
                )));
            }
            Ok(Reference {
                accuracy: *accuracy,
                data: ReferenceData::Sampled {
                    horizon: problem.horizon(),
                    values: traj.u,
                },
            })
        }
    }
}

/// Largest stored-step `l1` distance between a trajectory and a reference;
/// infinite when the trajectory blew up.
pub fn compute_error(traj: &Trajectory, reference: &Reference) -> Result<f64, HarnessError> {
    if traj.blew_up {
        return Ok(f64::INFINITY);
    }
    let mut worst = 0.0_f64;
    for (t, u) in traj.times.iter().zip(&traj.u) {
        let r = reference.value_at(*t)?;
        worst = worst.max(vec_norm_l1(&(u - r)));
    }
    Ok(worst)
}

/// A full sweep specification.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepConfig {
    pub problem: Problem,
    pub mode: SolveMode,
    pub scheme: SchemeKind,
    /// Micro-macro order `n`; ignored in direct mode.
    pub order: usize,
    /// Contraction factor for the decomposition; `0.5` unless tuning.
    pub contraction: f64,
    /// Physical scale parameters, each measured against its own reference.
    pub eps_grid: Vec<f64>,
    /// Step counts `L`; `dt = horizon / L`.
    pub steps_grid: Vec<usize>,
    pub reference: ReferencePolicy,
}

impl SweepConfig {
    /// The standard sweep for a problem and scheme: the default `eps` and
    /// step grids, exact reference for the scalar problem, a fine run for
    /// the rate model.
    pub fn standard(problem: Problem, mode: SolveMode, scheme: SchemeKind, order: usize) -> Self {
        let (steps_grid, reference) = match &problem {
            Problem::Toy(_) => (
                (0..10).map(|k| 20 << k).collect(),
                ReferencePolicy::Exact,
            ),
            Problem::Bloch(_) => (
                (0..8).map(|k| 25 << k).collect(),
                ReferencePolicy::default_fine(),
            ),
        };
        Self {
            problem,
            mode,
            scheme,
            order,
            contraction: 0.5,
            eps_grid: geometric_grid(0.5, 1e-4, 13),
            steps_grid,
            reference,
        }
    }

    /// Checks grids and reference compatibility.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.eps_grid.is_empty() || self.steps_grid.is_empty() {
            return Err(HarnessError::InvalidConfig(
                "eps and step grids must be nonempty".into(),
            ));
        }
        if self.eps_grid.iter().any(|e| !(*e > 0.0)) {
            return Err(HarnessError::InvalidConfig(
                "every eps must be positive".into(),
            ));
        }
        if self.steps_grid.iter().any(|l| *l == 0) {
            return Err(HarnessError::InvalidConfig(
                "every step count must be positive".into(),
            ));
        }
        if !(self.contraction > 0.0 && self.contraction <= 1.0) {
            return Err(HarnessError::InvalidConfig(format!(
                "contraction factor must lie in (0, 1], got {}",
                self.contraction
            )));
        }
        match &self.reference {
            ReferencePolicy::Exact => {
                if !self.problem.has_closed_form() {
                    return Err(HarnessError::InvalidConfig(
                        "exact reference requires a problem with closed-form solution".into(),
                    ));
                }
            }
            ReferencePolicy::FineIntegralEuler { steps, store, .. } => {
                if steps % store != 0 {
                    return Err(HarnessError::InvalidConfig(format!(
                        "reference steps {steps} must be a multiple of {store}"
                    )));
                }
                for l in &self.steps_grid {
                    if store % l != 0 {
                        return Err(HarnessError::InvalidConfig(format!(
                            "step count {l} does not divide the reference grid of {store} \
                             stored intervals; errors could not be compared stepwise"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// One measured point of a sweep.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepRecord {
    pub problem: String,
    pub scheme: SchemeKind,
    /// Micro-macro order, or 0 for direct runs.
    pub n: usize,
    pub eps: f64,
    pub dt: f64,
    pub error: f64,
    pub runtime_s: f64,
    /// Semicolon-separated `key=value` annotations; may be empty.
    pub flags: String,
}

/// Result of one sweep: the configuration and its records, sorted by
/// `(eps, dt)`.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    /// Records for one grid `eps` (bit-exact match).
    pub fn records_for_eps(&self, eps: f64) -> Vec<&SweepRecord> {
        self.records
            .iter()
            .filter(|r| r.eps.to_bits() == eps.to_bits())
            .collect()
    }
}

/// Geometric grid of `n` points from `hi` down to `lo`.
pub fn geometric_grid(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi > lo && lo > 0.0);
    let ratio = (lo / hi).powf(1.0 / (n - 1) as f64);
    (0..n).map(|k| hi * ratio.powi(k as i32)).collect()
}

/// Runs a sweep with a private reference cache.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult, HarnessError> {
    run_sweep_cached(config, &mut ReferenceCache::new())
}

/// Runs a sweep, reusing cached references where available.
///
/// References are built once per `eps` (the dominant cost for fine-run
/// policies) and shared through the cache across schemes and orders.
pub fn run_sweep_cached(
    config: &SweepConfig,
    cache: &mut ReferenceCache,
) -> Result<SweepResult, HarnessError> {
    config.validate()?;
    let label = config.problem.label();
    let horizon = config.problem.horizon();
    let u0 = config.problem.initial_vector();
    let field = config.problem.field()?;
    let decomp = match config.mode {
        SolveMode::MicroMacro => Some(MicroMacroDecomposition::build(
            field.clone(),
            config.order,
            config.contraction,
        )?),
        SolveMode::Direct => None,
    };
    let is_bloch = matches!(config.problem, Problem::Bloch(_));

    let mut records = Vec::with_capacity(config.eps_grid.len() * config.steps_grid.len());
    for &eps in &config.eps_grid {
        let reference = cache.get_or_build(&config.problem, &config.reference, eps)?;
        let avg_eps = config.problem.averaging_eps(eps);
        enum Runner {
            Micro(MicroMacroProblem),
            Direct(DirectProblem),
        }
        let runner = match &decomp {
            Some(d) => Runner::Micro(MicroMacroProblem::new(d, avg_eps)?),
            None => Runner::Direct(DirectProblem::new(field.forcing(), avg_eps)?),
        };
        for &steps in &config.steps_grid {
            let started = Instant::now();
            let traj = match &runner {
                Runner::Micro(p) => p.solve(config.scheme, &u0, horizon, steps, 1)?,
                Runner::Direct(p) => p.solve(config.scheme, &u0, horizon, steps, 1)?,
            };
            let runtime_s = started.elapsed().as_secs_f64();
            let error = compute_error(&traj, &reference)?;
            let flags = if is_bloch {
                format!("minpop={}", traj.min_real_component)
            } else {
                String::new()
            };
            records.push(SweepRecord {
                problem: label.clone(),
                scheme: config.scheme,
                n: match config.mode {
                    SolveMode::MicroMacro => config.order,
                    SolveMode::Direct => 0,
                },
                eps,
                dt: horizon / steps as f64,
                error,
                runtime_s,
                flags,
            });
        }
    }
    records.sort_by(|a, b| {
        a.eps
            .total_cmp(&b.eps)
            .then(a.dt.total_cmp(&b.dt))
    });
    Ok(SweepResult {
        config: config.clone(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_grid_hits_both_ends() {
        let g = geometric_grid(0.5, 1e-4, 13);
        assert_eq!(g.len(), 13);
        assert!((g[0] - 0.5).abs() < 1e-15);
        assert!((g[12] - 1e-4).abs() < 1e-18);
        for pair in g.windows(2) {
            assert!(pair[1] < pair[0]);
        }
    }

    #[test]
    fn exact_reference_requires_closed_form() {
        let bloch = Problem::Bloch(BlochConfig::three_level_mono());
        assert!(build_reference(&bloch, &ReferencePolicy::Exact, 0.1).is_err());
        let mut cfg = SweepConfig::standard(
            bloch,
            SolveMode::Direct,
            SchemeKind::ExplicitEuler,
            0,
        );
        cfg.reference = ReferencePolicy::Exact;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn misaligned_steps_are_rejected() {
        let mut cfg = SweepConfig::standard(
            Problem::Bloch(BlochConfig::three_level_mono()),
            SolveMode::Direct,
            SchemeKind::ExplicitEuler,
            0,
        );
        cfg.steps_grid = vec![3000]; // does not divide 3200
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn standard_bloch_steps_divide_the_reference_grid() {
        let cfg = SweepConfig::standard(
            Problem::Bloch(BlochConfig::three_level_mono()),
            SolveMode::MicroMacro,
            SchemeKind::ExplicitEuler,
            1,
        );
        cfg.validate().unwrap();
        assert_eq!(cfg.steps_grid, vec![25, 50, 100, 200, 400, 800, 1600, 3200]);
    }

    #[test]
    fn toy_sweep_errors_shrink_with_dt() {
        let mut cfg = SweepConfig::standard(
            Problem::Toy(ToyConfig::mono()),
            SolveMode::MicroMacro,
            SchemeKind::ExplicitEuler,
            1,
        );
        cfg.eps_grid = vec![0.05];
        cfg.steps_grid = vec![100, 200, 400];
        let result = run_sweep(&cfg).unwrap();
        assert_eq!(result.records.len(), 3);
        // sorted by dt ascending; errors should grow with dt
        assert!(result.records[0].dt < result.records[2].dt);
        assert!(result.records[0].error < result.records[2].error);
        assert!(result.records.iter().all(|r| r.error.is_finite()));
    }

    #[test]
    fn sweep_labels_direct_runs_with_order_zero() {
        let mut cfg = SweepConfig::standard(
            Problem::Toy(ToyConfig::mono()),
            SolveMode::Direct,
            SchemeKind::Rk2,
            2,
        );
        cfg.eps_grid = vec![0.1];
        cfg.steps_grid = vec![50];
        let result = run_sweep(&cfg).unwrap();
        assert_eq!(result.records[0].n, 0);
        assert_eq!(result.records[0].problem, "toy-1f");
        assert!(result.records[0].flags.is_empty());
    }
}

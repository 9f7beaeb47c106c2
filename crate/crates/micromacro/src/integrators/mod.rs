//! Time steppers for the micro-macro system and for the stiff equation
//! integrated directly.
//!
//! Four one-step schemes are provided.  The point schemes sample the
//! oscillatory coefficients at nodes (explicit Euler) or at nodes and
//! midpoints (a midpoint second-order scheme).  Their exact-window variants
//! replace every sampled coefficient by the exact integral of the coefficient
//! over the step, computed in closed form from the antiderivative; those are
//! the schemes whose order survives `dt >> eps` resonances.
//!
//! Applied to the micro-macro pair
//!
//! ```text
//! dv/dt = A(eps) v,          v(0) = Phi(0)^{-1} u(0),
//! dw/dt = a(t/eps) w - delta(t/eps) v,   w(0) = u(0) - Phi(0) v(0),
//! ```
//!
//! each scheme keeps its classical order uniformly in `eps`, because the
//! stiff right-hand side only enters multiplied by the `O(eps^n)` defect or
//! by the small micro variable `w`.  The original unknown is recovered as
//! `u = Phi(t/eps) v + w`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{vec_norm_inf, vec_norm_l1, AlgebraError, Antiderivative, ExpTrigPoly};
use crate::averaging::MicroMacroDecomposition;

/// States larger than this (componentwise) stop the integration and mark the
/// trajectory as blown up.
const BLOWUP_GUARD: f64 = 1e12;
/// Largest condition number accepted when inverting `Phi(0)`.
const CONDITION_GUARD: f64 = 1e12;

/// Errors from the integration layer.
#[derive(Debug, thiserror::Error)]
pub enum IntegratorError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("initial change of variables is singular")]
    SingularChangeOfVariables,
    #[error("initial change of variables has condition number {cond:e}, beyond the guard {guard:e}")]
    IllConditioned { cond: f64, guard: f64 },
    #[error("state dimension {got} does not match the problem dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("scale parameter must be positive for time stepping, got {0}")]
    NonPositiveEps(f64),
}

/// The four one-step schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum SchemeKind {
    /// Explicit Euler with point-sampled coefficients.
    #[serde(rename = "ee")]
    #[value(name = "ee")]
    ExplicitEuler,
    /// Explicit Euler with exact coefficient integrals over each step.
    #[serde(rename = "eeint")]
    #[value(name = "eeint")]
    IntegralEuler,
    /// Midpoint scheme with point-sampled coefficients.
    #[serde(rename = "rk2")]
    #[value(name = "rk2")]
    Rk2,
    /// Midpoint scheme with exact coefficient integrals over half and full
    /// steps.
    #[serde(rename = "rk2int")]
    #[value(name = "rk2int")]
    IntegralRk2,
}

impl SchemeKind {
    /// All schemes, in presentation order.
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::ExplicitEuler,
        SchemeKind::IntegralEuler,
        SchemeKind::Rk2,
        SchemeKind::IntegralRk2,
    ];

    /// Classical order of the scheme.
    pub fn order(self) -> usize {
        match self {
            SchemeKind::ExplicitEuler | SchemeKind::IntegralEuler => 1,
            SchemeKind::Rk2 | SchemeKind::IntegralRk2 => 2,
        }
    }

    /// True for the exact-window variants.
    pub fn is_integral(self) -> bool {
        matches!(self, SchemeKind::IntegralEuler | SchemeKind::IntegralRk2)
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SchemeKind::ExplicitEuler => "ee",
            SchemeKind::IntegralEuler => "eeint",
            SchemeKind::Rk2 => "rk2",
            SchemeKind::IntegralRk2 => "rk2int",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ee" => Ok(SchemeKind::ExplicitEuler),
            "eeint" => Ok(SchemeKind::IntegralEuler),
            "rk2" => Ok(SchemeKind::Rk2),
            "rk2int" => Ok(SchemeKind::IntegralRk2),
            other => Err(format!("unknown scheme `{other}`")),
        }
    }
}

/// Whether a trajectory came from the micro-macro pair or from integrating
/// the stiff equation directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum SolveMode {
    #[serde(rename = "micromacro")]
    #[value(name = "micromacro")]
    MicroMacro,
    #[serde(rename = "direct")]
    #[value(name = "direct")]
    Direct,
}

impl std::fmt::Display for SolveMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveMode::MicroMacro => "micromacro",
            SolveMode::Direct => "direct",
        })
    }
}

/// A polynomial flattened for fast repeated evaluation.
struct CompiledPoly {
    terms: Vec<(C64, DMatrix<C64>)>,
}

impl CompiledPoly {
    fn new(p: &ExpTrigPoly) -> Self {
        let freq = p.freq().clone();
        let terms = p
            .terms()
            .map(|(alpha, lambda, coeff)| {
                let z = C64::new(0.0, freq.dot(alpha)) + lambda;
                (z, coeff.clone())
            })
            .collect();
        Self { terms }
    }

    fn eval_into(&self, tau: f64, out: &mut DMatrix<C64>) {
        out.fill(C64::new(0.0, 0.0));
        let slice = out.as_mut_slice();
        for (z, coeff) in &self.terms {
            let factor = (z * tau).exp();
            for (o, c) in slice.iter_mut().zip(coeff.as_slice()) {
                *o += c * factor;
            }
        }
    }
}

/// Sampled states of one integration run.
///
/// States are stored every `stride` steps, always including the initial and
/// final times.  The micro norm and the smallest real component are tracked
/// so sweeps can report them without re-walking the trajectory.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub mode: SolveMode,
    pub scheme: SchemeKind,
    pub eps: f64,
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
    pub times: Vec<f64>,
    pub u: Vec<DVector<C64>>,
    /// Macro states; empty for direct solves.
    pub v: Vec<DVector<C64>>,
    /// Micro states; empty for direct solves.
    pub w: Vec<DVector<C64>>,
    /// Largest `l1` norm of the micro state over every step taken.
    pub max_w_norm: f64,
    /// Smallest real part over stored components of `u`.
    pub min_real_component: f64,
    /// True when the blow-up guard tripped; stored states stop there.
    pub blew_up: bool,
}

impl Trajectory {
    fn new(mode: SolveMode, scheme: SchemeKind, eps: f64, dt: f64, steps: usize, stride: usize) -> Self {
        Self {
            mode,
            scheme,
            eps,
            dt,
            steps,
            stride,
            times: Vec::new(),
            u: Vec::new(),
            v: Vec::new(),
            w: Vec::new(),
            max_w_norm: 0.0,
            min_real_component: f64::INFINITY,
            blew_up: false,
        }
    }

    fn record(&mut self, t: f64, u: DVector<C64>, vw: Option<(DVector<C64>, DVector<C64>)>) {
        self.min_real_component = u
            .iter()
            .map(|z| z.re)
            .fold(self.min_real_component, f64::min);
        self.times.push(t);
        self.u.push(u);
        if let Some((v, w)) = vw {
            self.v.push(v);
            self.w.push(w);
        }
    }

    /// Number of stored samples.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// True when nothing was stored (possible only after an immediate blow-up).
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The last stored state.
    pub fn final_state(&self) -> Option<(&f64, &DVector<C64>)> {
        self.times.last().zip(self.u.last())
    }

    /// Writes the trajectory as CSV with a `#`-prefixed metadata block.
    ///
    /// Columns are `t`, then `u{i}_re, u{i}_im` per component, then the same
    /// for `v` and `w` when present.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# mode={}", self.mode)?;
        writeln!(out, "# scheme={}", self.scheme)?;
        writeln!(out, "# eps={}", self.eps)?;
        writeln!(out, "# dt={}", self.dt)?;
        writeln!(out, "# steps={}", self.steps)?;
        writeln!(out, "# stride={}", self.stride)?;
        writeln!(out, "# blew_up={}", self.blew_up)?;
        let d = self.u.first().map_or(0, DVector::len);
        let mut header = vec!["t".to_string()];
        for name in ["u", "v", "w"] {
            if name == "u" || !self.v.is_empty() {
                for i in 0..d {
                    header.push(format!("{name}{i}_re"));
                    header.push(format!("{name}{i}_im"));
                }
            }
        }
        writeln!(out, "{}", header.join(","))?;
        for (k, t) in self.times.iter().enumerate() {
            let mut row = vec![format!("{t}")];
            let push_vec = |row: &mut Vec<String>, v: &DVector<C64>| {
                for z in v.iter() {
                    row.push(format!("{}", z.re));
                    row.push(format!("{}", z.im));
                }
            };
            push_vec(&mut row, &self.u[k]);
            if !self.v.is_empty() {
                push_vec(&mut row, &self.v[k]);
                push_vec(&mut row, &self.w[k]);
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn check_grid(t_end: f64, steps: usize, stride: usize) -> Result<(), IntegratorError> {
    if !(t_end > 0.0) {
        return Err(IntegratorError::InvalidGrid(format!(
            "final time must be positive, got {t_end}"
        )));
    }
    if steps == 0 {
        return Err(IntegratorError::InvalidGrid("need at least one step".into()));
    }
    if stride == 0 {
        return Err(IntegratorError::InvalidGrid("stride must be positive".into()));
    }
    Ok(())
}

/// The micro-macro system for one concrete `eps`, ready to integrate.
///
/// Built from a symbolic decomposition by collapsing the `eps` series once;
/// the same [`MicroMacroDecomposition`] can therefore be reused across a
/// whole sweep.
pub struct MicroMacroProblem {
    eps: f64,
    dim: usize,
    a_mat: DMatrix<C64>,
    phi: ExpTrigPoly,
    phi_compiled: CompiledPoly,
    forcing_compiled: CompiledPoly,
    delta_compiled: CompiledPoly,
    forcing_anti: Antiderivative,
    delta_anti: Antiderivative,
    phi0: DMatrix<C64>,
    phi0_inv: DMatrix<C64>,
}

impl MicroMacroProblem {
    /// Collapses a decomposition at `eps`.
    ///
    /// `eps` may be zero (the limit model, useful for initial data); time
    /// stepping then requires `eps > 0`.
    pub fn new(decomp: &MicroMacroDecomposition, eps: f64) -> Result<Self, IntegratorError> {
        if eps > decomp.eps_threshold() {
            log::warn!(
                "collapsing a decomposition at eps = {eps:e} above its threshold {:e}; \
                 uniform error bounds are not guaranteed there",
                decomp.eps_threshold()
            );
        }
        let phi = decomp.phi_at(eps)?;
        let delta = decomp.defect_at(eps)?;
        let forcing = decomp.field().forcing().clone();
        let a_mat = decomp.averaged_at(eps);
        let dim = decomp.field().dim();

        let phi0 = phi.evaluate(0.0);
        let phi0_inv = phi0
            .clone()
            .try_inverse()
            .ok_or(IntegratorError::SingularChangeOfVariables)?;
        let cond = crate::algebra::op_norm_l1(&phi0) * crate::algebra::op_norm_l1(&phi0_inv);
        if cond > CONDITION_GUARD {
            return Err(IntegratorError::IllConditioned {
                cond,
                guard: CONDITION_GUARD,
            });
        }
        Ok(Self {
            eps,
            dim,
            a_mat,
            phi_compiled: CompiledPoly::new(&phi),
            forcing_compiled: CompiledPoly::new(&forcing),
            delta_compiled: CompiledPoly::new(&delta),
            forcing_anti: Antiderivative::new(&forcing),
            delta_anti: Antiderivative::new(&delta),
            phi,
            phi0,
            phi0_inv,
        })
    }

    /// The concrete `eps` the problem was collapsed at.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Problem dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The averaged matrix `A(eps)` driving the macro equation.
    pub fn averaged_matrix(&self) -> &DMatrix<C64> {
        &self.a_mat
    }

    /// The collapsed change of variables.
    pub fn phi(&self) -> &ExpTrigPoly {
        &self.phi
    }

    /// Splits an initial value into macro and micro parts:
    /// `v0 = Phi(0)^{-1} u0`, `w0 = u0 - Phi(0) v0`.
    pub fn initial_state(
        &self,
        u0: &DVector<C64>,
    ) -> Result<(DVector<C64>, DVector<C64>), IntegratorError> {
        if u0.len() != self.dim {
            return Err(IntegratorError::DimensionMismatch {
                expected: self.dim,
                got: u0.len(),
            });
        }
        let v0 = &self.phi0_inv * u0;
        let w0 = u0 - &self.phi0 * &v0;
        Ok((v0, w0))
    }

    /// Recovers the original unknown `u = Phi(t/eps) v + w`.
    pub fn reconstruct(&self, t: f64, v: &DVector<C64>, w: &DVector<C64>) -> DVector<C64> {
        let mut phi_tau = DMatrix::zeros(self.dim, self.dim);
        self.phi_compiled.eval_into(t / self.eps, &mut phi_tau);
        phi_tau * v + w
    }

    /// Takes one step of `scheme` from `(v, w)` at time `t`.
    pub fn step(
        &self,
        scheme: SchemeKind,
        t: f64,
        dt: f64,
        v: &DVector<C64>,
        w: &DVector<C64>,
    ) -> Result<(DVector<C64>, DVector<C64>), IntegratorError> {
        if !(self.eps > 0.0) {
            return Err(IntegratorError::NonPositiveEps(self.eps));
        }
        let mut stepper = MicroMacroStepper::new(self, scheme, t / self.eps);
        let mut v = v.clone();
        let mut w = w.clone();
        stepper.advance(t, dt, &mut v, &mut w);
        Ok((v, w))
    }

    /// Integrates over `[0, t_end]` with `steps` uniform steps, storing every
    /// `stride`-th state (and always the last).
    pub fn solve(
        &self,
        scheme: SchemeKind,
        u0: &DVector<C64>,
        t_end: f64,
        steps: usize,
        stride: usize,
    ) -> Result<Trajectory, IntegratorError> {
        check_grid(t_end, steps, stride)?;
        if !(self.eps > 0.0) {
            return Err(IntegratorError::NonPositiveEps(self.eps));
        }
        let (mut v, mut w) = self.initial_state(u0)?;
        let dt = t_end / steps as f64;
        let mut traj = Trajectory::new(
            SolveMode::MicroMacro,
            scheme,
            self.eps,
            dt,
            steps,
            stride,
        );
        traj.record(0.0, u0.clone(), Some((v.clone(), w.clone())));

        let mut stepper = MicroMacroStepper::new(self, scheme, 0.0);
        for ell in 0..steps {
            let t = ell as f64 * dt;
            stepper.advance(t, dt, &mut v, &mut w);
            let w_norm = vec_norm_l1(&w);
            traj.max_w_norm = traj.max_w_norm.max(w_norm);
            if vec_norm_inf(&v) > BLOWUP_GUARD || w_norm > BLOWUP_GUARD {
                traj.blew_up = true;
                break;
            }
            if (ell + 1) % stride == 0 || ell + 1 == steps {
                let t1 = (ell + 1) as f64 * dt;
                let u = self.reconstruct(t1, &v, &w);
                traj.record(t1, u, Some((v.clone(), w.clone())));
            }
        }
        Ok(traj)
    }
}

/// Working buffers and cursors for stepping the micro-macro pair.
struct MicroMacroStepper<'a> {
    prob: &'a MicroMacroProblem,
    scheme: SchemeKind,
    a_buf: DMatrix<C64>,
    d_buf: DMatrix<C64>,
    wa: DMatrix<C64>,
    wd: DMatrix<C64>,
    vt: DVector<C64>,
    wt: DVector<C64>,
    v_new: DVector<C64>,
    w_new: DVector<C64>,
    forcing_cursor: crate::algebra::WindowCursor<'a>,
    delta_cursor: crate::algebra::WindowCursor<'a>,
}

impl<'a> MicroMacroStepper<'a> {
    fn new(prob: &'a MicroMacroProblem, scheme: SchemeKind, base_tau: f64) -> Self {
        let d = prob.dim;
        Self {
            prob,
            scheme,
            a_buf: DMatrix::zeros(d, d),
            d_buf: DMatrix::zeros(d, d),
            wa: DMatrix::zeros(d, d),
            wd: DMatrix::zeros(d, d),
            vt: DVector::zeros(d),
            wt: DVector::zeros(d),
            v_new: DVector::zeros(d),
            w_new: DVector::zeros(d),
            forcing_cursor: prob.forcing_anti.cursor(base_tau),
            delta_cursor: prob.delta_anti.cursor(base_tau),
        }
    }

    /// Advances `(v, w)` from `t` to `t + dt` in place.
    fn advance(&mut self, t: f64, dt: f64, v: &mut DVector<C64>, w: &mut DVector<C64>) {
        let eps = self.prob.eps;
        let tau = t / eps;
        let tau1 = (t + dt) / eps;
        let h = C64::from(dt);
        let one = C64::from(1.0);
        let a_mat = &self.prob.a_mat;
        match self.scheme {
            SchemeKind::ExplicitEuler => {
                self.prob.forcing_compiled.eval_into(tau, &mut self.a_buf);
                self.prob.delta_compiled.eval_into(tau, &mut self.d_buf);
                // v1 = v + dt A v
                self.v_new.copy_from(v);
                self.v_new.gemv(h, a_mat, v, one);
                // w1 = w + dt (a w - delta v)
                self.w_new.copy_from(w);
                self.w_new.gemv(h, &self.a_buf, w, one);
                self.w_new.gemv(-h, &self.d_buf, v, one);
            }
            SchemeKind::IntegralEuler => {
                // Exact windows: int_t^{t+dt} phi(s/eps) ds = eps * (phase window).
                self.wa.copy_from(&self.forcing_cursor.step_to(tau1));
                self.wa *= C64::from(eps);
                self.wd.copy_from(&self.delta_cursor.step_to(tau1));
                self.wd *= C64::from(eps);
                self.v_new.copy_from(v);
                self.v_new.gemv(h, a_mat, v, one);
                self.w_new.copy_from(w);
                self.w_new.gemv(one, &self.wa, w, one);
                self.w_new.gemv(-one, &self.wd, v, one);
            }
            SchemeKind::Rk2 => {
                let tau_mid = (t + 0.5 * dt) / eps;
                self.prob.forcing_compiled.eval_into(tau, &mut self.a_buf);
                self.prob.delta_compiled.eval_into(tau, &mut self.d_buf);
                let half = C64::from(0.5 * dt);
                // Stage values from the left node.
                self.vt.copy_from(v);
                self.vt.gemv(half, a_mat, v, one);
                self.wt.copy_from(w);
                self.wt.gemv(half, &self.a_buf, w, one);
                self.wt.gemv(-half, &self.d_buf, v, one);
                // Full step with midpoint-sampled coefficients.
                self.prob.forcing_compiled.eval_into(tau_mid, &mut self.a_buf);
                self.prob.delta_compiled.eval_into(tau_mid, &mut self.d_buf);
                self.v_new.copy_from(v);
                self.v_new.gemv(h, a_mat, &self.vt, one);
                self.w_new.copy_from(w);
                self.w_new.gemv(h, &self.a_buf, &self.wt, one);
                self.w_new.gemv(-h, &self.d_buf, &self.vt, one);
            }
            SchemeKind::IntegralRk2 => {
                let tau_mid = (t + 0.5 * dt) / eps;
                let half = C64::from(0.5 * dt);
                // Half-window integrals for the stage.
                self.wa.copy_from(&self.forcing_cursor.window_to(tau_mid));
                self.wa *= C64::from(eps);
                self.wd.copy_from(&self.delta_cursor.window_to(tau_mid));
                self.wd *= C64::from(eps);
                self.vt.copy_from(v);
                self.vt.gemv(half, a_mat, v, one);
                self.wt.copy_from(w);
                self.wt.gemv(one, &self.wa, w, one);
                self.wt.gemv(-one, &self.wd, v, one);
                // Full-window integrals for the update.
                self.wa.copy_from(&self.forcing_cursor.step_to(tau1));
                self.wa *= C64::from(eps);
                self.wd.copy_from(&self.delta_cursor.step_to(tau1));
                self.wd *= C64::from(eps);
                self.v_new.copy_from(v);
                self.v_new.gemv(h, a_mat, &self.vt, one);
                self.w_new.copy_from(w);
                self.w_new.gemv(one, &self.wa, &self.wt, one);
                self.w_new.gemv(-one, &self.wd, &self.vt, one);
            }
        }
        v.copy_from(&self.v_new);
        w.copy_from(&self.w_new);
    }
}

/// The stiff equation `du/dt = a(t/eps) u`, integrated as-is.
///
/// Useful as a reference at very small steps and to expose the order
/// reduction the micro-macro split avoids.
pub struct DirectProblem {
    eps: f64,
    dim: usize,
    forcing_compiled: CompiledPoly,
    anti: Antiderivative,
}

impl DirectProblem {
    /// Wraps a forcing field at a concrete `eps > 0`.
    pub fn new(forcing: &ExpTrigPoly, eps: f64) -> Result<Self, IntegratorError> {
        if !(eps > 0.0) {
            return Err(IntegratorError::NonPositiveEps(eps));
        }
        Ok(Self {
            eps,
            dim: forcing.dim(),
            forcing_compiled: CompiledPoly::new(forcing),
            anti: Antiderivative::new(forcing),
        })
    }

    /// The concrete `eps`.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Problem dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Takes one step of `scheme` from `u` at time `t`.
    pub fn step(
        &self,
        scheme: SchemeKind,
        t: f64,
        dt: f64,
        u: &DVector<C64>,
    ) -> Result<DVector<C64>, IntegratorError> {
        let mut stepper = DirectStepper::new(self, scheme, t / self.eps);
        let mut u = u.clone();
        stepper.advance(t, dt, &mut u);
        Ok(u)
    }

    /// Integrates over `[0, t_end]` with `steps` uniform steps, storing every
    /// `stride`-th state (and always the last).
    pub fn solve(
        &self,
        scheme: SchemeKind,
        u0: &DVector<C64>,
        t_end: f64,
        steps: usize,
        stride: usize,
    ) -> Result<Trajectory, IntegratorError> {
        check_grid(t_end, steps, stride)?;
        if u0.len() != self.dim {
            return Err(IntegratorError::DimensionMismatch {
                expected: self.dim,
                got: u0.len(),
            });
        }
        let dt = t_end / steps as f64;
        let mut u = u0.clone();
        let mut traj = Trajectory::new(SolveMode::Direct, scheme, self.eps, dt, steps, stride);
        traj.record(0.0, u.clone(), None);
        let mut stepper = DirectStepper::new(self, scheme, 0.0);
        for ell in 0..steps {
            let t = ell as f64 * dt;
            stepper.advance(t, dt, &mut u);
            if vec_norm_inf(&u) > BLOWUP_GUARD {
                traj.blew_up = true;
                break;
            }
            if (ell + 1) % stride == 0 || ell + 1 == steps {
                traj.record((ell + 1) as f64 * dt, u.clone(), None);
            }
        }
        Ok(traj)
    }
}

/// Working buffers and cursor for stepping the stiff equation directly.
struct DirectStepper<'a> {
    prob: &'a DirectProblem,
    scheme: SchemeKind,
    a_buf: DMatrix<C64>,
    wa: DMatrix<C64>,
    ut: DVector<C64>,
    u_new: DVector<C64>,
    cursor: crate::algebra::WindowCursor<'a>,
}

impl<'a> DirectStepper<'a> {
    fn new(prob: &'a DirectProblem, scheme: SchemeKind, base_tau: f64) -> Self {
        let d = prob.dim;
        Self {
            prob,
            scheme,
            a_buf: DMatrix::zeros(d, d),
            wa: DMatrix::zeros(d, d),
            ut: DVector::zeros(d),
            u_new: DVector::zeros(d),
            cursor: prob.anti.cursor(base_tau),
        }
    }

    fn advance(&mut self, t: f64, dt: f64, u: &mut DVector<C64>) {
        let eps = self.prob.eps;
        let tau = t / eps;
        let tau1 = (t + dt) / eps;
        let h = C64::from(dt);
        let one = C64::from(1.0);
        match self.scheme {
            SchemeKind::ExplicitEuler => {
                self.prob.forcing_compiled.eval_into(tau, &mut self.a_buf);
                self.u_new.copy_from(u);
                self.u_new.gemv(h, &self.a_buf, u, one);
            }
            SchemeKind::IntegralEuler => {
                self.wa.copy_from(&self.cursor.step_to(tau1));
                self.wa *= C64::from(eps);
                self.u_new.copy_from(u);
                self.u_new.gemv(one, &self.wa, u, one);
            }
            SchemeKind::Rk2 => {
                let tau_mid = (t + 0.5 * dt) / eps;
                self.prob.forcing_compiled.eval_into(tau, &mut self.a_buf);
                self.ut.copy_from(u);
                self.ut.gemv(C64::from(0.5 * dt), &self.a_buf, u, one);
                self.prob.forcing_compiled.eval_into(tau_mid, &mut self.a_buf);
                self.u_new.copy_from(u);
                self.u_new.gemv(h, &self.a_buf, &self.ut, one);
            }
            SchemeKind::IntegralRk2 => {
                let tau_mid = (t + 0.5 * dt) / eps;
                self.wa.copy_from(&self.cursor.window_to(tau_mid));
                self.wa *= C64::from(eps);
                self.ut.copy_from(u);
                self.ut.gemv(one, &self.wa, u, one);
                self.wa.copy_from(&self.cursor.step_to(tau1));
                self.wa *= C64::from(eps);
                self.u_new.copy_from(u);
                self.u_new.gemv(one, &self.wa, &self.ut, one);
            }
        }
        u.copy_from(&self.u_new);
    }
}

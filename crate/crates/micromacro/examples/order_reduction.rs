//! Order reduction of direct integration, and how the micro-macro pair
//! avoids it.
//!
//! Integrating the stiff equation `u' = a(t/eps) u` directly works fine
//! while `dt` is small compared to `eps`, but the moment the step stops
//! resolving the oscillation the error jumps — and at resonant ratios
//! (`dt` a near-multiple of the period `2 pi eps / omega`) the scheme
//! samples the coefficient in lockstep with the oscillation and converges
//! to the wrong equation entirely. The micro-macro pair integrates only
//! smooth quantities and keeps its order at every `(dt, eps)`.
//!
//! Run with: `cargo run --example order_reduction`

use micromacro::averaging::MicroMacroDecomposition;
use micromacro::harness::{build_reference, compute_error, ReferencePolicy};
use micromacro::harness::Problem;
use micromacro::integrators::{DirectProblem, MicroMacroProblem, SchemeKind};
use micromacro::models::ToyConfig;
use nalgebra::DVector;
use num_complex::Complex64 as C64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ToyConfig::multi().with_gamma(0.0);
    let problem = Problem::Toy(config.clone());
    let u0 = DVector::from_element(1, C64::from(config.u0));
    let horizon = config.horizon;

    let field = config.field()?;
    let decomp = MicroMacroDecomposition::build(field.clone(), 2, 0.5)?;

    // dt = 0.04 with eps = 0.01: the frequency-pi component advances by
    // 4 pi per step and 2 pi per half step, so both stages of a midpoint
    // scheme sample cos(pi tau) = 1 at every single evaluation. One third
    // of the oscillation masquerades as a constant shift of the mean.
    let eps = 0.01;
    let steps = 250;
    let dt = horizon / steps as f64;
    println!("resonant configuration: eps = {eps}, dt = {dt} (4 pi phase advance per step)\n");

    let reference = build_reference(&problem, &ReferencePolicy::Exact, eps)?;

    let direct = DirectProblem::new(field.forcing(), eps)?;
    let micro = MicroMacroProblem::new(&decomp, eps)?;

    println!(
        "{:<28} {:>12} {:>12}",
        "integrator", "error", "vs exact"
    );
    let mut rows = Vec::new();
    for (label, traj) in [
        (
            "direct rk2",
            direct.solve(SchemeKind::Rk2, &u0, horizon, steps, 1)?,
        ),
        (
            "direct eeint",
            direct.solve(SchemeKind::IntegralEuler, &u0, horizon, steps, 1)?,
        ),
        (
            "micro-macro n=2, rk2",
            micro.solve(SchemeKind::Rk2, &u0, horizon, steps, 1)?,
        ),
    ] {
        let error = compute_error(&traj, &reference)?;
        let verdict = if error > 0.1 {
            "wrong answer"
        } else if error > 1e-2 {
            "degraded"
        } else {
            "accurate"
        };
        println!("{label:<28} {error:>12.3e} {verdict:>12}");
        rows.push((label, error));
    }

    println!();
    println!("the direct midpoint scheme lands on an O(1) error: it resolves");
    println!("nothing of the oscillation and converges to a wrong averaged");
    println!("equation. The same scheme applied to the micro-macro pair at the");
    println!("same cost is accurate, because it never sees a stiff quantity.");

    assert!(rows[0].1 > 0.1, "direct rk2 should fail at resonance");
    assert!(rows[2].1 < 1e-2, "micro-macro rk2 should stay accurate");
    Ok(())
}

//! Transition rates of the driven three-level system.
//!
//! The flagship application: populations `rho_j` of a three-level quantum
//! system driven by an oscillatory field evolve, after second-order
//! perturbation in the field amplitude, by a linear rate equation
//!
//! ```text
//! rho' = (1/eps) Psi(t/eps) rho,   Psi = sharp + flat,
//! ```
//!
//! whose transition rates `Psi_lj(tau)` carry a memory integral of the
//! driving field. This example prints the rates, their long-time means
//! (which reproduce the textbook Lorentzian line shape), the rate matrix
//! structure, and the relaxation of the populations to the uniform
//! stationary state.
//!
//! Run with: `cargo run --example bloch_transition_rates`

use micromacro::algebra::vec_norm_l1;
use micromacro::integrators::{DirectProblem, SchemeKind};
use micromacro::models::{s_lorentzian, BlochConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = BlochConfig::three_level_mono();
    println!(
        "three-level system, energies {:?}, driving frequency {:.4}",
        config.energies, config.omega[0]
    );

    // --- transition rates and their switch-on transient ---
    println!("\ntransition rate Psi_21(tau) (switches on from zero):");
    let freq = config.frequency()?;
    let poly = config.transition_poly(&freq, 1, 0)?;
    for tau in [0.0, 0.3, 0.8, 2.1, 5.2, 20.1] {
        let full = poly.evaluate_real(tau)?[(0, 0)];
        let sharp_only = poly.sharp_part().evaluate_real(tau)?[(0, 0)];
        println!(
            "  tau = {tau:>5.1}:  Psi = {full:>9.5}   (permanent part {sharp_only:>9.5})"
        );
    }

    // --- long-time means against the Lorentzian line shape ---
    println!("\nmean transition rates vs the Lorentzian line shape:");
    let e0 = config.field_amplitude;
    let r = config.omega.len() as f64;
    for (l, j) in [(1usize, 0usize), (2, 0), (2, 1)] {
        let mean = config.mean_rate(l, j);
        let delta_e = config.energies[l] - config.energies[j];
        let gamma = config.damping[l][j];
        let p2 = config.dipole[l][j] * config.dipole[l][j];
        let lorentz: f64 = config
            .omega
            .iter()
            .map(|&om| (e0 * e0 / (r * r)) * p2 * s_lorentzian(om, delta_e, gamma))
            .sum();
        println!(
            "  <Psi_{}{}> = {mean:.12}   Lorentzian form {lorentz:.12}   diff {:.1e}",
            l, j,
            (mean - lorentz).abs()
        );
    }

    // --- rate matrix: columns sum to zero, so mass is conserved ---
    let field = config.rate_field()?;
    let forcing = field.forcing();
    println!("\nrate matrix column sums at a few tau (exact zeros by construction):");
    for tau in [0.3, 1.7, 4.0] {
        let m = forcing.evaluate_real(tau)?;
        let sums: Vec<f64> = (0..3).map(|j| (0..3).map(|l| m[(l, j)]).sum()).collect();
        println!("  tau = {tau:>4.1}: {sums:?}");
    }

    // --- populations relax to the uniform stationary state ---
    let eps = 0.1; // physical scale; the rate equation lives on t/eps^2
    let direct = DirectProblem::new(forcing, eps * eps)?;
    let traj = direct.solve(
        SchemeKind::IntegralEuler,
        &config.initial_vector(),
        config.horizon,
        200_000,
        40_000,
    )?;
    println!("\npopulations from rho(0) = {:?}, eps = {eps}:", config.initial);
    for (t, u) in traj.times.iter().zip(&traj.u) {
        println!(
            "  t = {t:>5.1}:  rho = ({:.4}, {:.4}, {:.4})   sum - 1 = {:+.1e}",
            u[0].re,
            u[1].re,
            u[2].re,
            u.iter().map(|z| z.re).sum::<f64>() - 1.0
        );
    }
    let last = &traj.u[traj.u.len() - 1];
    let uniform = vec_norm_l1(&(last - nalgebra::DVector::from_element(3, (1.0 / 3.0).into())));
    println!("\ndistance to the uniform state (1/3, 1/3, 1/3): {uniform:.3e}");
    println!("every column of the rate matrix sums to zero, so the total");
    println!("population is conserved exactly and detailed balance drives the");
    println!("system to equipartition.");
    Ok(())
}

//! One extra order for free: exact coefficient windows.
//!
//! The point-sampled schemes evaluate the oscillatory coefficients at the
//! step endpoints (or midpoints); the "integral" variants instead use the
//! exact window integrals of the coefficient polynomials over each step,
//! which the exponential-trigonometric representation supplies in closed
//! form. For the micro-macro pair this lifts the uniform order by one:
//! an order-1 decomposition stepped by the integral midpoint scheme
//! converges at second order, matching the order-2 decomposition with a
//! point-sampled midpoint scheme at a fraction of the symbolic work.
//!
//! Run with: `cargo run --example integral_scheme_order_lift`

use micromacro::harness::{fit_records, geometric_grid, run_sweep, Problem, SweepConfig};
use micromacro::integrators::{SchemeKind, SolveMode};
use micromacro::models::ToyConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = Problem::Toy(ToyConfig::multi().with_gamma(0.0));
    let eps_grid = geometric_grid(0.5, 1e-4, 7);

    println!("order n = 1 decomposition, point-sampled vs integral midpoint:\n");
    println!(
        "{:>10} {:>14} {:>14}",
        "eps", "rk2 slope", "rk2int slope"
    );

    let mut slopes = Vec::new();
    for scheme in [SchemeKind::Rk2, SchemeKind::IntegralRk2] {
        let mut config =
            SweepConfig::standard(problem.clone(), SolveMode::MicroMacro, scheme, 1);
        config.eps_grid = eps_grid.clone();
        let result = run_sweep(&config)?;
        let per_eps: Vec<f64> = eps_grid
            .iter()
            .map(|&eps| fit_records(&result.records, eps, 1e-13).map(|f| f.slope))
            .collect::<Result<_, _>>()?;
        slopes.push(per_eps);
    }

    for (k, &eps) in eps_grid.iter().enumerate() {
        println!("{eps:>10.1e} {:>14.2} {:>14.2}", slopes[0][k], slopes[1][k]);
    }

    let worst = |s: &[f64]| {
        s.iter()
            .map(|x| (x - 2.0).abs())
            .fold(0.0_f64, f64::max)
    };
    println!();
    println!(
        "largest deviation from order 2: rk2 {:.2}, rk2int {:.2}",
        worst(&slopes[0]),
        worst(&slopes[1])
    );
    println!();
    println!("with exact windows the order-1 decomposition holds second order");
    println!("for every eps; the point-sampled midpoint scheme sags in the");
    println!("transition regime where dt stops resolving the oscillation.");
    Ok(())
}

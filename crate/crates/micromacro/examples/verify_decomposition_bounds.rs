//! Certified a-priori bounds of a decomposition.
//!
//! Building a decomposition also computes every constant of its error
//! theory: the norm bound `M` of the forcing, the small-divisor constant,
//! and the threshold `eps_n` below which the construction is a contraction.
//! `verify_bounds` then checks, for a concrete `eps`, the five structural
//! bounds the theory promises:
//!
//! 1. the change of variables stays within `c eps / eps_n` of the identity,
//! 2. the averaged matrix stays within `(1+c) M`,
//! 3. the defect is `O(M (eps/eps_n)^n)`,
//! 4. the running defect integral is `O((eps/eps_n)^{n+1})`,
//! 5. defect derivatives up to the configured order stay bounded.
//!
//! Each bound is certified two ways: a rigorous coefficient-sum estimate
//! and a dense grid supremum. Passing either certifies the check; the grid
//! value shows how much slack the rigorous route leaves.
//!
//! Run with: `cargo run --example verify_decomposition_bounds`

use micromacro::averaging::{verify_bounds, MicroMacroDecomposition};
use micromacro::harness::Problem;
use micromacro::models::{BlochConfig, ToyConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problems = [
        ("scalar, one frequency", Problem::Toy(ToyConfig::mono())),
        ("scalar, three frequencies", Problem::Toy(ToyConfig::multi())),
        ("three-level rate model", Problem::Bloch(BlochConfig::three_level_mono())),
    ];

    for (label, problem) in problems {
        for order in [1usize, 2] {
            let decomp = MicroMacroDecomposition::build(problem.field()?, order, 0.5)?;
            let eps = 0.5 * decomp.eps_threshold();
            let report = verify_bounds(&decomp, eps)?;

            println!(
                "{label}, n = {order}: eps = {:.3e} (half the threshold {:.3e})",
                eps,
                decomp.eps_threshold()
            );
            for check in &report.checks {
                println!(
                    "  [{}] {:<40} min({:.3e}, {:.3e}) vs bound {:.3e}",
                    if check.passed { "pass" } else { "FAIL" },
                    check.name,
                    check.coefficient_bound,
                    check.grid_sup,
                    check.bound
                );
            }
            println!(
                "  measured derivative constant {:.3e}; overall {}\n",
                report.deriv_constant,
                if report.passed { "pass" } else { "FAIL" }
            );
            assert!(report.passed);
        }
    }

    println!("all bounds certified at half the threshold for both problems.");
    Ok(())
}

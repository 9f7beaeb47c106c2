//! Integration tests for the sweep harness: error measurement, reference
//! handling, order fitting, and the CSV emit/read cycle.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use micromacro::algebra::{ExpTrigPoly, FrequencyVector};
use micromacro::harness::{
    build_reference, compute_error, fit_order, geometric_grid, read_records_csv, run_sweep,
    run_sweep_cached, write_records_csv, write_series_by_dt, write_series_by_eps, HarnessError,
    Problem, ReferenceCache, ReferencePolicy, SweepConfig,
};
use micromacro::integrators::{DirectProblem, SchemeKind, SolveMode};
use micromacro::models::{BlochConfig, ToyConfig};

fn toy_problem() -> Problem {
    Problem::Toy(ToyConfig::mono())
}

fn bloch_problem() -> Problem {
    Problem::Bloch(BlochConfig::three_level_mono())
}

/// A small sampled-reference policy for fast tests.
fn small_fine(steps: usize) -> ReferencePolicy {
    ReferencePolicy::FineIntegralEuler {
        steps,
        store: 200,
        accuracy: 1e-3,
    }
}

#[test]
fn error_is_the_max_stored_distance() {
    let problem = toy_problem();
    let config = ToyConfig::mono();
    let eps = 0.08;
    let reference = build_reference(&problem, &ReferencePolicy::Exact, eps).unwrap();

    let field = config.field().unwrap();
    let direct = DirectProblem::new(field.forcing(), eps).unwrap();
    let u0 = problem.initial_vector();
    let traj = direct
        .solve(SchemeKind::ExplicitEuler, &u0, config.horizon, 500, 50)
        .unwrap();

    let got = compute_error(&traj, &reference).unwrap();
    let want = traj
        .times
        .iter()
        .zip(&traj.u)
        .map(|(&t, u)| (u[0] - C64::from(config.exact(eps, t))).norm())
        .fold(0.0, f64::max);
    assert!(want > 0.0);
    assert_eq!(got, want);
}

#[test]
fn blown_up_trajectory_reports_infinite_error() {
    let freq = FrequencyVector::mono(PI).unwrap();
    let growing = ExpTrigPoly::scalar(&freq, C64::from(3.0));
    let prob = DirectProblem::new(&growing, 1.0).unwrap();
    let u0 = DVector::from_element(1, C64::from(1.0));
    let traj = prob
        .solve(SchemeKind::ExplicitEuler, &u0, 200.0, 200, 1)
        .unwrap();
    assert!(traj.blew_up);

    let reference = build_reference(&toy_problem(), &ReferencePolicy::Exact, 0.1).unwrap();
    assert_eq!(compute_error(&traj, &reference).unwrap(), f64::INFINITY);
}

#[test]
fn sampled_reference_enforces_grid_alignment() {
    let problem = bloch_problem();
    let eps = 0.3;
    let reference = build_reference(&problem, &small_fine(20_000), eps).unwrap();

    // t = 0 lies on every grid and returns the initial populations.
    let at0 = reference.value_at(0.0).unwrap();
    let u0 = problem.initial_vector();
    assert!((&at0 - &u0).iter().all(|z| z.norm() <= 1e-12));

    let field = problem.field().unwrap();
    let direct = DirectProblem::new(field.forcing(), problem.averaging_eps(eps)).unwrap();

    // 400 steps stored every 2nd land exactly on the 200-interval grid.
    let aligned = direct
        .solve(SchemeKind::Rk2, &u0, problem.horizon(), 400, 2)
        .unwrap();
    let err = compute_error(&aligned, &reference).unwrap();
    assert!(err.is_finite() && err > 0.0);

    // 73 steps cannot be compared against that grid.
    let misaligned = direct
        .solve(SchemeKind::Rk2, &u0, problem.horizon(), 73, 1)
        .unwrap();
    match compute_error(&misaligned, &reference) {
        Err(HarnessError::MisalignedGrid { .. }) => {}
        other => panic!("expected a misaligned-grid error, got {other:?}"),
    }
}

#[test]
fn reference_cache_reuses_instances() {
    let problem = toy_problem();
    let policy = ReferencePolicy::Exact;
    let mut cache = ReferenceCache::new();
    assert!(cache.is_empty());

    let a = cache.get_or_build(&problem, &policy, 0.1).unwrap();
    let b = cache.get_or_build(&problem, &policy, 0.1).unwrap();
    assert!(Arc::ptr_eq(&a, &b), "same key must reuse the instance");
    assert_eq!(cache.len(), 1);

    let c = cache.get_or_build(&problem, &policy, 0.2).unwrap();
    assert!(!Arc::ptr_eq(&a, &c));
    assert_eq!(cache.len(), 2);
}

#[test]
fn fit_excludes_blowups_and_floor_points() {
    // Exact slope-one data plus one blown-up point and one at the noise floor.
    let pairs = [
        (0.2, f64::INFINITY),
        (0.1, 1e-2),
        (0.05, 5e-3),
        (0.025, 2.5e-3),
        (0.0125, 1e-16),
    ];
    let fit = fit_order(&pairs, 1e-15).unwrap();
    assert!((fit.slope - 1.0).abs() <= 1e-12, "slope {}", fit.slope);
    assert_eq!(fit.used, 3);
    assert_eq!(fit.excluded_blowup, 1);
    assert_eq!(fit.excluded_floor, 1);
    // predict() reproduces the data it was fitted on
    assert!((fit.predict(0.1) - 1e-2).abs() <= 1e-15);

    // A single usable point is not enough for a slope.
    let too_few = [(0.1, 1e-2), (0.05, f64::INFINITY)];
    match fit_order(&too_few, 1e-15) {
        Err(HarnessError::InsufficientData { usable }) => assert_eq!(usable, 1),
        other => panic!("expected insufficient data, got {other:?}"),
    }
}

/// A four-point toy sweep used by the round-trip and determinism tests.
fn tiny_sweep_config() -> SweepConfig {
    SweepConfig {
        problem: toy_problem(),
        mode: SolveMode::MicroMacro,
        scheme: SchemeKind::ExplicitEuler,
        order: 1,
        contraction: 0.5,
        eps_grid: vec![0.1, 0.01],
        steps_grid: vec![40, 80],
        reference: ReferencePolicy::Exact,
    }
}

#[test]
fn records_csv_round_trips_through_files() {
    let result = run_sweep(&tiny_sweep_config()).unwrap();
    assert_eq!(result.records.len(), 4);

    let mut buf = Vec::new();
    write_records_csv(&mut buf, &result.records).unwrap();
    let back = read_records_csv(buf.as_slice()).unwrap();
    // Shortest round-trip float formatting makes the cycle lossless.
    assert_eq!(result.records, back);

    // The pivoted views exist for both orientations and carry every error.
    let mut by_eps = Vec::new();
    write_series_by_eps(&mut by_eps, &result.records).unwrap();
    let mut by_dt = Vec::new();
    write_series_by_dt(&mut by_dt, &result.records).unwrap();
    let by_eps = String::from_utf8(by_eps).unwrap();
    let by_dt = String::from_utf8(by_dt).unwrap();
    for record in &result.records {
        let cell = format!("{}", record.error);
        assert!(by_eps.contains(&cell), "missing {cell} in by-eps pivot");
        assert!(by_dt.contains(&cell), "missing {cell} in by-dt pivot");
    }
    // rows = dt in one view, rows = eps in the other
    assert!(by_eps.starts_with("dt"));
    assert!(by_dt.starts_with("eps"));
}

#[test]
fn sweeps_are_deterministic_modulo_runtime() {
    let config = tiny_sweep_config();
    let first = run_sweep(&config).unwrap();
    let second = run_sweep(&config).unwrap();
    assert_eq!(first.records.len(), second.records.len());
    for (a, b) in first.records.iter().zip(&second.records) {
        assert_eq!(a.problem, b.problem);
        assert_eq!(a.scheme, b.scheme);
        assert_eq!(a.n, b.n);
        assert_eq!(a.eps.to_bits(), b.eps.to_bits());
        assert_eq!(a.dt.to_bits(), b.dt.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits(), "errors must be bit-equal");
        assert_eq!(a.flags, b.flags);
    }

    // Records come out sorted by (eps, dt), both ascending.
    let mut sorted = first.records.clone();
    sorted.sort_by(|a, b| {
        a.eps
            .total_cmp(&b.eps)
            .then(a.dt.total_cmp(&b.dt))
    });
    assert_eq!(first.records, sorted);
    assert_eq!(first.records_for_eps(0.1).len(), 2);
}

#[test]
fn sweep_rejects_invalid_configs() {
    let mut config = tiny_sweep_config();
    config.eps_grid.clear();
    assert!(run_sweep(&config).is_err());

    let mut config = tiny_sweep_config();
    config.contraction = 0.0;
    assert!(config.validate().is_err());

    // The rate model has no closed form, so an exact reference is refused.
    let mut config = tiny_sweep_config();
    config.problem = bloch_problem();
    config.reference = ReferencePolicy::Exact;
    assert!(config.validate().is_err());

    // Step counts must divide the stored reference grid.
    let mut config = tiny_sweep_config();
    config.problem = bloch_problem();
    config.reference = small_fine(20_000);
    config.steps_grid = vec![30];
    assert!(config.validate().is_err());
    config.steps_grid = vec![50, 100];
    assert!(config.validate().is_ok());
}

#[test]
fn standard_sweeps_pass_validation() {
    for problem in [toy_problem(), bloch_problem()] {
        for mode in [SolveMode::MicroMacro, SolveMode::Direct] {
            let config = SweepConfig::standard(problem.clone(), mode, SchemeKind::Rk2, 2);
            config.validate().unwrap_or_else(|e| {
                panic!("standard config for {} invalid: {e}", problem.label())
            });
        }
    }
}

#[test]
fn geometric_grid_spans_endpoints() {
    let grid = geometric_grid(0.5, 1e-4, 13);
    assert_eq!(grid.len(), 13);
    assert_eq!(grid[0], 0.5);
    assert!((grid[12] - 1e-4).abs() <= 1e-12 * 1e-4);
    for pair in grid.windows(2) {
        assert!(pair[1] < pair[0]);
    }
    // constant ratio
    let r = grid[1] / grid[0];
    for pair in grid.windows(2) {
        assert!((pair[1] / pair[0] - r).abs() <= 1e-12);
    }
}

#[test]
fn fine_references_are_grid_converged() {
    // Two fine runs with a 2x step gap must agree to first order; that gap
    // bounds the error of the finer one by Richardson's argument.
    let problem = bloch_problem();
    let eps = 0.05;
    let coarse = build_reference(&problem, &small_fine(500_000), eps).unwrap();
    let fine = build_reference(&problem, &small_fine(1_000_000), eps).unwrap();
    let horizon = problem.horizon();
    let mut worst = 0.0_f64;
    for k in 0..=200 {
        let t = horizon * k as f64 / 200.0;
        let a = coarse.value_at(t).unwrap();
        let b = fine.value_at(t).unwrap();
        worst = worst.max((a - b).iter().map(|z| z.norm()).sum());
    }
    assert!(
        worst <= 5e-5,
        "references with a 2x step gap differ by {worst}"
    );
}

#[test]
fn cached_sweep_shares_references_across_schemes() {
    let mut cache = ReferenceCache::new();
    let base = SweepConfig {
        problem: bloch_problem(),
        mode: SolveMode::MicroMacro,
        scheme: SchemeKind::ExplicitEuler,
        order: 1,
        contraction: 0.5,
        eps_grid: vec![0.2, 0.1],
        steps_grid: vec![50, 100],
        reference: small_fine(20_000),
    };
    run_sweep_cached(&base, &mut cache).unwrap();
    assert_eq!(cache.len(), 2, "one reference per eps");
    let rk2 = SweepConfig {
        scheme: SchemeKind::IntegralRk2,
        ..base
    };
    run_sweep_cached(&rk2, &mut cache).unwrap();
    assert_eq!(cache.len(), 2, "second scheme must not rebuild references");
}

//! Thin command-line front end over the library.
//!
//! The guided demonstrations live in `examples/`; this binary exposes the
//! same capabilities in scriptable form: build and serialize decompositions,
//! integrate single runs, sweep error grids, check the a-priori bounds, and
//! fit convergence orders from recorded sweeps.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use micromacro::averaging::{verify_bounds, BoundReport, MicroMacroDecomposition};
use micromacro::harness::{
    fit_records, read_records_csv, run_sweep, write_records_csv, write_series_by_dt,
    write_series_by_eps, Problem, SweepConfig,
};
use micromacro::integrators::{DirectProblem, MicroMacroProblem, SchemeKind, SolveMode};
use micromacro::models::{BlochConfig, ToyConfig};

#[derive(Parser)]
#[command(
    name = "micromacro",
    version,
    about = "Micro-macro decomposition of linear systems with oscillatory and decaying forcing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Problem selection shared by most subcommands.
#[derive(Args)]
struct ProblemArgs {
    /// Preset (`toy-1f`, `toy-3f`, `bloch-1f`, `bloch-3f`) or a path to a
    /// problem JSON file.
    #[arg(long)]
    problem: String,
    /// Overrides the decay amplitude of toy presets.
    #[arg(long)]
    gamma: Option<f64>,
}

impl ProblemArgs {
    fn resolve(&self) -> Result<Problem, String> {
        let mut problem = match self.problem.as_str() {
            "toy-1f" => Problem::Toy(ToyConfig::mono()),
            "toy-3f" => Problem::Toy(ToyConfig::multi()),
            "bloch-1f" => Problem::Bloch(BlochConfig::three_level_mono()),
            "bloch-3f" => Problem::Bloch(BlochConfig::three_level_multi()),
            path => {
                let text = fs::read_to_string(path).map_err(|e| {
                    format!(
                        "`{path}` is not a preset (toy-1f, toy-3f, bloch-1f, bloch-3f) \
                         and could not be read as a problem file: {e}"
                    )
                })?;
                serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?
            }
        };
        if let Some(gamma) = self.gamma {
            match &mut problem {
                Problem::Toy(c) => c.gamma = gamma,
                Problem::Bloch(_) => {
                    return Err("--gamma only applies to toy problems".into());
                }
            }
        }
        Ok(problem)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a decomposition of a given order and write it as JSON.
    Decompose {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Defect order `n`: the defect scales like `(eps / eps_n)^n`.
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Contraction factor `c` entering the threshold `eps_n`.
        #[arg(long, default_value_t = 0.5)]
        contraction: f64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Integrate one run and write the trajectory as CSV.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value_t = SolveMode::MicroMacro)]
        mode: SolveMode,
        #[arg(long, value_enum, default_value_t = SchemeKind::Rk2)]
        scheme: SchemeKind,
        /// Decomposition order (micro-macro mode only).
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, default_value_t = 0.5)]
        contraction: f64,
        /// Physical scale parameter.
        #[arg(long)]
        eps: f64,
        /// Number of time steps over the problem horizon.
        #[arg(long)]
        steps: usize,
        /// Store every `stride`-th step.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Reuse a decomposition written by `decompose` instead of
        /// rebuilding one.
        #[arg(long)]
        decomposition: Option<PathBuf>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Measure errors over an `(eps, dt)` grid and write sweep records.
    Sweep {
        /// Full sweep configuration as JSON; overrides all other flags.
        #[arg(long, conflicts_with_all = ["problem", "gamma"])]
        config: Option<PathBuf>,
        #[command(flatten)]
        problem: Option<ProblemArgs>,
        #[arg(long, value_enum, default_value_t = SolveMode::MicroMacro)]
        mode: SolveMode,
        #[arg(long, value_enum, default_value_t = SchemeKind::ExplicitEuler)]
        scheme: SchemeKind,
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Overrides the default geometric `eps` grid.
        #[arg(long, value_delimiter = ',')]
        eps_grid: Vec<f64>,
        /// Overrides the default step-count grid.
        #[arg(long, value_delimiter = ',')]
        steps_grid: Vec<usize>,
        /// Records output path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also writes error-versus-dt series, one column per eps.
        #[arg(long)]
        series_by_eps: Option<PathBuf>,
        /// Also writes error-versus-eps series, one column per dt.
        #[arg(long)]
        series_by_dt: Option<PathBuf>,
    },
    /// Check the a-priori bounds of a decomposition at a given `eps`.
    ///
    /// Exits nonzero when any check fails.
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, default_value_t = 0.5)]
        contraction: f64,
        /// Scale parameter to check at; half the threshold when omitted.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Fit convergence orders from a records file.
    Fit {
        /// Records CSV written by `sweep`.
        #[arg(long)]
        records: PathBuf,
        /// Fit only this `eps`; all present values when omitted.
        #[arg(long)]
        eps: Option<f64>,
        /// Errors at or below this level are excluded from the fit.
        #[arg(long, default_value_t = 0.0)]
        noise_floor: f64,
    },
}

fn write_out(path: Option<&Path>, body: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, body),
        None => io::stdout().write_all(body),
    }
}

fn print_report(report: &BoundReport) {
    println!(
        "order n = {}, eps = {:e}, threshold eps_n = {:e}",
        report.order, report.eps, report.eps_threshold
    );
    for check in &report.checks {
        println!(
            "  [{}] {:<42} coeff {:>12.5e}  grid {:>12.5e}  bound {:>12.5e}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.coefficient_bound,
            check.grid_sup,
            check.bound,
        );
    }
    println!(
        "  measured derivative constant: {:.5e}",
        report.deriv_constant
    );
    println!("overall: {}", if report.passed { "PASS" } else { "FAIL" });
}

fn run() -> Result<ExitCode, Box<dyn std::error::Error>> {
    let cli = Cli::parse();
    match cli.command {
        Command::Decompose {
            problem,
            order,
            contraction,
            output,
        } => {
            let problem = problem.resolve()?;
            let field = problem.field()?;
            let decomp = MicroMacroDecomposition::build(field, order, contraction)?;
            log::info!(
                "decomposition of order {order} built; eps threshold {:e}",
                decomp.eps_threshold()
            );
            let json = decomp.to_json()?;
            write_out(output.as_deref(), json.as_bytes())?;
        }
        Command::Solve {
            problem,
            mode,
            scheme,
            order,
            contraction,
            eps,
            steps,
            stride,
            decomposition,
            output,
        } => {
            let problem = problem.resolve()?;
            let u0 = problem.initial_vector();
            let horizon = problem.horizon();
            let avg_eps = problem.averaging_eps(eps);
            let traj = match mode {
                SolveMode::MicroMacro => {
                    let decomp = match decomposition {
                        Some(path) => {
                            MicroMacroDecomposition::from_json(&fs::read_to_string(path)?)?
                        }
                        None => {
                            MicroMacroDecomposition::build(problem.field()?, order, contraction)?
                        }
                    };
                    MicroMacroProblem::new(&decomp, avg_eps)?
                        .solve(scheme, &u0, horizon, steps, stride)?
                }
                SolveMode::Direct => DirectProblem::new(problem.field()?.forcing(), avg_eps)?
                    .solve(scheme, &u0, horizon, steps, stride)?,
            };
            if traj.blew_up {
                log::warn!("run blew up; the trajectory is truncated");
            }
            let mut body = Vec::new();
            traj.write_csv(&mut body)?;
            write_out(output.as_deref(), &body)?;
        }
        Command::Sweep {
            config,
            problem,
            mode,
            scheme,
            order,
            eps_grid,
            steps_grid,
            output,
            series_by_eps,
            series_by_dt,
        } => {
            let sweep_config = match config {
                Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
                None => {
                    let problem = problem
                        .ok_or("either --config or --problem is required")?
                        .resolve()?;
                    let mut c = SweepConfig::standard(problem, mode, scheme, order);
                    if !eps_grid.is_empty() {
                        c.eps_grid = eps_grid;
                    }
                    if !steps_grid.is_empty() {
                        c.steps_grid = steps_grid;
                    }
                    c
                }
            };
            let result = run_sweep(&sweep_config)?;
            let mut body = Vec::new();
            write_records_csv(&mut body, &result.records)?;
            write_out(output.as_deref(), &body)?;
            if let Some(path) = series_by_eps {
                let mut body = Vec::new();
                write_series_by_eps(&mut body, &result.records)?;
                fs::write(path, body)?;
            }
            if let Some(path) = series_by_dt {
                let mut body = Vec::new();
                write_series_by_dt(&mut body, &result.records)?;
                fs::write(path, body)?;
            }
        }
        Command::Verify {
            problem,
            order,
            contraction,
            eps,
        } => {
            let problem = problem.resolve()?;
            let field = problem.field()?;
            let decomp = MicroMacroDecomposition::build(field, order, contraction)?;
            let eps = eps.unwrap_or(0.5 * decomp.eps_threshold());
            let report = verify_bounds(&decomp, eps)?;
            print_report(&report);
            if !report.passed {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Fit {
            records,
            eps,
            noise_floor,
        } => {
            let records = read_records_csv(fs::File::open(records)?)?;
            let mut eps_values: Vec<f64> = match eps {
                Some(e) => vec![e],
                None => {
                    let mut v: Vec<f64> = records.iter().map(|r| r.eps).collect();
                    v.sort_by(f64::total_cmp);
                    v.dedup_by(|a, b| a.to_bits() == b.to_bits());
                    v
                }
            };
            if eps_values.is_empty() {
                return Err("no records to fit".into());
            }
            eps_values.sort_by(f64::total_cmp);
            println!("{:>12}  {:>8}  {:>5}  {:>7}  {:>7}", "eps", "slope", "used", "blowup", "floor");
            for e in eps_values {
                match fit_records(&records, e, noise_floor) {
                    Ok(fit) => println!(
                        "{:>12.5e}  {:>8.4}  {:>5}  {:>7}  {:>7}",
                        e, fit.slope, fit.used, fit.excluded_blowup, fit.excluded_floor
                    ),
                    Err(err) => println!("{e:>12.5e}  unusable ({err})"),
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

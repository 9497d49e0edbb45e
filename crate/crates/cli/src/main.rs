//! `mtrl`: deterministic half-space experiment harness.
//!
//! Subcommands drive the sweep library: `sweep-mtl` and `sweep-ltl` compare
//! per-task training against joint and transferred dictionaries, and
//! `phase-diagram`, `verify-bounds`, `lower-bound-sim` evaluate the
//! closed-form side. Settings resolve in order: defaults, `--config` file,
//! `MTRL_OUT_DIR`, then flags.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use mtrl_core::sweeps::{
    run_ltl_sweep, run_mtl_sweep, run_phase_diagram, simulate_lower_bound, verify_complexity,
    SweepConfig, SweepOutcome,
};

#[derive(Parser)]
#[command(name = "mtrl", version, about = "Multitask subspace learning experiments")]
struct Cli {
    #[command(flatten)]
    options: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare per-task baselines against a jointly learned dictionary.
    SweepMtl,
    /// Adapt a learned dictionary to fresh tasks and compare per-task training.
    SweepLtl,
    /// Evaluate the closed-form transfer-advantage grid.
    PhaseDiagram,
    /// Monte-Carlo checks of the Gaussian-average bounds.
    VerifyBounds,
    /// Simulate the data-scarcity lower bound for equivariant learners.
    LowerBoundSim,
}

/// Every configuration key is also a flag; flags override the config file.
#[derive(Args)]
struct Options {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed (config key `master_seed`).
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
    /// Output directory; also settable through `MTRL_OUT_DIR`.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Worker threads; 0 uses the default parallelism.
    #[arg(long, global = true, value_name = "COUNT")]
    workers: Option<usize>,
    /// Repetitions per grid cell.
    #[arg(long, global = true, value_name = "COUNT")]
    trials: Option<usize>,
    /// Write real per-row seconds into the CSV (breaks byte-identity).
    #[arg(long, global = true)]
    timing: bool,
    /// Ambient input dimension.
    #[arg(long, global = true, value_name = "COUNT")]
    d: Option<String>,
    /// Width of the generating dictionary.
    #[arg(long, global = true, value_name = "COUNT")]
    k_true: Option<String>,
    /// Width of the learned dictionary.
    #[arg(long, global = true, value_name = "COUNT")]
    k_model: Option<String>,
    /// Comma-separated per-task sample sizes.
    #[arg(long, global = true, value_name = "LIST")]
    n_grid: Option<String>,
    /// Comma-separated task counts.
    #[arg(long, global = true, value_name = "LIST")]
    t_grid: Option<String>,
    /// Training-label noise scale.
    #[arg(long, global = true, value_name = "STD")]
    noise_std: Option<String>,
    /// Input sphere radius, or `auto` for sqrt(d).
    #[arg(long, global = true, value_name = "RADIUS")]
    input_radius: Option<String>,
    /// Fresh inputs per task for test error.
    #[arg(long, global = true, value_name = "COUNT")]
    test_size: Option<String>,
    /// Unseen tasks evaluated by sweep-ltl.
    #[arg(long, global = true, value_name = "COUNT")]
    new_task_count: Option<String>,
    /// Subgradient iteration budget.
    #[arg(long, global = true, value_name = "COUNT")]
    max_iters: Option<String>,
    /// Initial step size of the 1/sqrt(i) schedule.
    #[arg(long, global = true, value_name = "STEP")]
    step0: Option<String>,
    /// Optimizer restarts; the best objective wins.
    #[arg(long, global = true, value_name = "COUNT")]
    restarts: Option<String>,
    /// Early-stop threshold on objective improvement.
    #[arg(long, global = true, value_name = "TOL")]
    tolerance: Option<String>,
    /// Iterations per early-stop comparison window.
    #[arg(long, global = true, value_name = "COUNT")]
    tolerance_window: Option<String>,
    /// Ambient dimension of the phase grid.
    #[arg(long, global = true, value_name = "DIM")]
    phase_d: Option<String>,
    /// Subspace width of the phase grid.
    #[arg(long, global = true, value_name = "WIDTH")]
    phase_k: Option<String>,
    /// Confidence parameter of the phase grid.
    #[arg(long, global = true, value_name = "DELTA")]
    phase_delta: Option<String>,
    /// Log-spaced sample-size grid points.
    #[arg(long, global = true, value_name = "COUNT")]
    phase_n_points: Option<String>,
    /// Log-spaced task-count grid points.
    #[arg(long, global = true, value_name = "COUNT")]
    phase_t_points: Option<String>,
    /// Largest per-task sample size on the grid.
    #[arg(long, global = true, value_name = "MAX")]
    phase_n_max: Option<String>,
    /// Largest task count on the grid.
    #[arg(long, global = true, value_name = "MAX")]
    phase_t_max: Option<String>,
    /// Charge delta/2 to each side of the advantage instead of delta.
    #[arg(long, global = true, value_name = "BOOL")]
    phase_delta_split: Option<String>,
    /// Ambient dimension of the lower-bound simulation.
    #[arg(long, global = true, value_name = "DIM")]
    lower_d: Option<String>,
    /// Samples per trial in the lower-bound simulation.
    #[arg(long, global = true, value_name = "COUNT")]
    lower_n: Option<String>,
    /// Confidence parameter of the lower bound.
    #[arg(long, global = true, value_name = "DELTA")]
    lower_delta: Option<String>,
    /// Repetitions of the lower-bound simulation.
    #[arg(long, global = true, value_name = "COUNT")]
    lower_trials: Option<String>,
    /// Random problem instances checked by verify-bounds.
    #[arg(long, global = true, value_name = "COUNT")]
    complexity_instances: Option<String>,
    /// Monte-Carlo draws per instance.
    #[arg(long, global = true, value_name = "COUNT")]
    complexity_draws: Option<String>,
}

impl Options {
    fn resolve(&self) -> anyhow::Result<SweepConfig> {
        let mut config = match &self.config {
            Some(path) => SweepConfig::from_file(path)
                .with_context(|| format!("reading config {}", path.display()))?,
            None => SweepConfig::default(),
        };
        if let Ok(dir) = std::env::var("MTRL_OUT_DIR") {
            if !dir.is_empty() {
                config.out_dir = PathBuf::from(dir);
            }
        }
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(dir) = &self.out_dir {
            config.out_dir = dir.clone();
        }
        if let Some(workers) = self.workers {
            config.workers = workers;
        }
        if let Some(trials) = self.trials {
            config.trials = trials;
        }
        if self.timing {
            config.timing = true;
        }
        let keyed = [
            ("d", &self.d),
            ("k_true", &self.k_true),
            ("k_model", &self.k_model),
            ("n_grid", &self.n_grid),
            ("t_grid", &self.t_grid),
            ("noise_std", &self.noise_std),
            ("input_radius", &self.input_radius),
            ("test_size", &self.test_size),
            ("new_task_count", &self.new_task_count),
            ("max_iters", &self.max_iters),
            ("step0", &self.step0),
            ("restarts", &self.restarts),
            ("tolerance", &self.tolerance),
            ("tolerance_window", &self.tolerance_window),
            ("phase_d", &self.phase_d),
            ("phase_k", &self.phase_k),
            ("phase_delta", &self.phase_delta),
            ("phase_n_points", &self.phase_n_points),
            ("phase_t_points", &self.phase_t_points),
            ("phase_n_max", &self.phase_n_max),
            ("phase_t_max", &self.phase_t_max),
            ("phase_delta_split", &self.phase_delta_split),
            ("lower_d", &self.lower_d),
            ("lower_n", &self.lower_n),
            ("lower_delta", &self.lower_delta),
            ("lower_trials", &self.lower_trials),
            ("complexity_instances", &self.complexity_instances),
            ("complexity_draws", &self.complexity_draws),
        ];
        for (key, value) in keyed {
            if let Some(value) = value {
                config.apply(key, value)?;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

fn print_sweep(outcome: &SweepOutcome) {
    for cell in &outcome.cells {
        let similarity = cell
            .similarity_mean
            .map(|s| format!(" similarity={s:.3}"))
            .unwrap_or_default();
        println!(
            "n={:<4} T={:<4} itl={:.4} vs={:.4} difference={:+.4}{similarity} ({} trials)",
            cell.n, cell.t, cell.itl_mean, cell.method_mean, cell.difference, cell.trials
        );
    }
    if !outcome.failures.is_empty() {
        println!("failed cells: {}", outcome.failures.len());
        for failure in &outcome.failures {
            println!(
                "  n={} T={} trial={}: {}",
                failure.n, failure.t, failure.trial, failure.message
            );
        }
    }
    println!(
        "wrote {} ({} rows) and {} in {:.1}s",
        outcome.csv_path.display(),
        outcome.rows.len(),
        outcome.summary_path.display(),
        outcome.total_seconds
    );
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let config = cli.options.resolve()?;
    match cli.command {
        Command::SweepMtl => print_sweep(&run_mtl_sweep(&config)?),
        Command::SweepLtl => print_sweep(&run_ltl_sweep(&config)?),
        Command::PhaseDiagram => {
            let outcome = run_phase_diagram(&config)?;
            println!(
                "{} of {} cells have positive transfer advantage",
                outcome.positive_cells,
                outcome.diagram.cells.len()
            );
            println!(
                "wrote {} and {} in {:.1}s",
                outcome.csv_path.display(),
                outcome.summary_path.display(),
                outcome.total_seconds
            );
        }
        Command::VerifyBounds => {
            let outcome = verify_complexity(&config)?;
            for check in &outcome.checks {
                println!(
                    "instance {:<2} d={:<2} k={} m={:<2} estimate={:.4} bound={:.4} slack={:+.4} {}",
                    check.instance,
                    check.d,
                    check.k,
                    check.sample_size,
                    check.estimate,
                    check.bound,
                    check.slack,
                    if check.pass { "pass" } else { "FAIL" }
                );
            }
            println!(
                "all pass: {}; wrote {} in {:.1}s",
                outcome.all_pass,
                outcome.summary_path.display(),
                outcome.total_seconds
            );
        }
        Command::LowerBoundSim => {
            let outcome = simulate_lower_bound(&config)?;
            println!(
                "lower value {:.6}{} violated in {:.1}% of {} trials",
                outcome.lower_value,
                if outcome.lower_vacuous { " (vacuous)" } else { "" },
                100.0 * outcome.violation_fraction,
                outcome.trials.len()
            );
            println!(
                "wrote {} in {:.1}s",
                outcome.summary_path.display(),
                outcome.total_seconds
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

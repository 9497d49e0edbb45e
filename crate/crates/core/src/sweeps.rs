//! Deterministic experiment harness over half-space task grids.
//!
//! Five drivers share one flat `key = value` configuration: the joint-training
//! sweep (per-task baselines against a jointly learned dictionary on the same
//! `(n, T)` grid), the transfer sweep (adapting a learned dictionary to fresh
//! tasks), the closed-form transfer-advantage phase diagram, Monte-Carlo
//! verification of the Gaussian-average bounds, and a simulation of the
//! data-scarce lower bound for equivariant single-task learners.
//!
//! Every random draw comes from a ChaCha8 stream keyed by the master seed and
//! a `(purpose, n, T, trial)` tuple, so the result tables do not depend on the
//! worker count or on scheduling. The CSV seconds column is written as zero
//! unless `timing = true`; real wall-clock totals always go to the JSON
//! summary next to the table.

use std::fs::{self, File};
use std::io::{BufWriter, Write as IoWrite};
use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{equivariant_lower, log_grid, phase_diagram, PhaseDiagram, PhaseDiagramParams};
use crate::complexity::{empirical_covariance_norms, gaussian_average_linear, sup_representation_norm};
use crate::hypothesis::Dictionary;
use crate::linalg::lambda_max_power_iteration;
use crate::metrics::{analytic_err, dictionary_similarity, test_error, Method};
use crate::seeding::{self, tag};
use crate::synthgen::{
    generate_environment, sample_halfspace_dataset, sample_sphere, sample_task_dataset, TaskDataset,
};
use crate::trainers::{
    adapt_new_task, default_margin, train_itl, train_mtl, zero_one_risk, OptimizerParams,
};
use crate::{invalid, Error, Real, Result, Scalar};

/// Flat configuration shared by all harness drivers.
///
/// Parsed from `key = value` lines; unknown keys are rejected by name. Grid
/// values are comma-separated integers, `input_radius` is a number or `auto`
/// (the `sqrt(d)` sphere that makes unit-predictor scores roughly standard
/// normal).
#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    /// Ambient input dimension.
    pub d: usize,
    /// Width of the generating dictionary.
    pub k_true: usize,
    /// Width of the learned dictionary.
    pub k_model: usize,
    /// Per-task sample sizes, outer sweep loop.
    pub n_grid: Vec<usize>,
    /// Task counts, inner sweep loop.
    pub t_grid: Vec<usize>,
    /// Independent repetitions per `(n, T)` cell.
    pub trials: usize,
    /// Pre-sign label noise level.
    pub noise_std: f64,
    /// Input sphere radius; `None` means `sqrt(d)`.
    pub input_radius: Option<f64>,
    /// Test points per evaluated task.
    pub test_size: usize,
    /// Fresh tasks drawn per cell by the transfer sweep.
    pub new_task_count: usize,
    /// Root seed every stream is derived from.
    pub master_seed: u64,
    /// Directory the tables and summaries are written to.
    pub out_dir: PathBuf,
    /// Worker threads; 0 uses the default parallelism.
    pub workers: usize,
    /// Write real per-row seconds into the CSV (breaks byte-identity).
    pub timing: bool,
    pub max_iters: usize,
    pub step0: f64,
    pub restarts: usize,
    pub tolerance: f64,
    pub tolerance_window: usize,
    pub phase_d: f64,
    pub phase_k: f64,
    pub phase_delta: f64,
    pub phase_n_points: usize,
    pub phase_t_points: usize,
    pub phase_n_max: f64,
    pub phase_t_max: f64,
    /// Charge `delta/2` to each side of the advantage instead of `delta`.
    pub phase_delta_split: bool,
    pub lower_d: usize,
    pub lower_n: usize,
    pub lower_delta: f64,
    pub lower_trials: usize,
    pub complexity_instances: usize,
    pub complexity_draws: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            d: 50,
            k_true: 2,
            k_model: 2,
            n_grid: vec![5, 15, 30, 60],
            t_grid: vec![10, 40, 100],
            trials: 5,
            noise_std: 0.0,
            input_radius: None,
            test_size: 1000,
            new_task_count: 50,
            master_seed: 0,
            out_dir: PathBuf::from("out"),
            workers: 0,
            timing: false,
            max_iters: 2000,
            step0: 1.0,
            restarts: 3,
            tolerance: 1e-6,
            tolerance_window: 100,
            phase_d: 1e5,
            phase_k: 2.0,
            phase_delta: 1e-4,
            phase_n_points: 100,
            phase_t_points: 100,
            phase_n_max: 1e5,
            phase_t_max: 1e11,
            phase_delta_split: false,
            lower_d: 200,
            lower_n: 50,
            lower_delta: 0.05,
            lower_trials: 500,
            complexity_instances: 20,
            complexity_draws: 2000,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("key `{key}`: cannot parse value {value:?}")))
}

fn parse_grid(key: &str, value: &str) -> Result<Vec<usize>> {
    value.split(',').map(|part| parse_num(key, part)).collect()
}

impl SweepConfig {
    /// Defaults overridden by the `key = value` lines of a file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut config = Self::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected `key = value`, got {line:?}")))?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Sets one configuration key from its textual value.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "d" => self.d = parse_num(key, value)?,
            "k_true" => self.k_true = parse_num(key, value)?,
            "k_model" => self.k_model = parse_num(key, value)?,
            "n_grid" => self.n_grid = parse_grid(key, value)?,
            "t_grid" => self.t_grid = parse_grid(key, value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "noise_std" => self.noise_std = parse_num(key, value)?,
            "input_radius" => {
                self.input_radius = if value == "auto" {
                    None
                } else {
                    Some(parse_num(key, value)?)
                }
            }
            "test_size" => self.test_size = parse_num(key, value)?,
            "new_task_count" => self.new_task_count = parse_num(key, value)?,
            "master_seed" => self.master_seed = parse_num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "workers" => self.workers = parse_num(key, value)?,
            "timing" => self.timing = parse_num(key, value)?,
            "max_iters" => self.max_iters = parse_num(key, value)?,
            "step0" => self.step0 = parse_num(key, value)?,
            "restarts" => self.restarts = parse_num(key, value)?,
            "tolerance" => self.tolerance = parse_num(key, value)?,
            "tolerance_window" => self.tolerance_window = parse_num(key, value)?,
            "phase_d" => self.phase_d = parse_num(key, value)?,
            "phase_k" => self.phase_k = parse_num(key, value)?,
            "phase_delta" => self.phase_delta = parse_num(key, value)?,
            "phase_n_points" => self.phase_n_points = parse_num(key, value)?,
            "phase_t_points" => self.phase_t_points = parse_num(key, value)?,
            "phase_n_max" => self.phase_n_max = parse_num(key, value)?,
            "phase_t_max" => self.phase_t_max = parse_num(key, value)?,
            "phase_delta_split" => self.phase_delta_split = parse_num(key, value)?,
            "lower_d" => self.lower_d = parse_num(key, value)?,
            "lower_n" => self.lower_n = parse_num(key, value)?,
            "lower_delta" => self.lower_delta = parse_num(key, value)?,
            "lower_trials" => self.lower_trials = parse_num(key, value)?,
            "complexity_instances" => self.complexity_instances = parse_num(key, value)?,
            "complexity_draws" => self.complexity_draws = parse_num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("d", "need d >= 1"));
        }
        if self.k_true == 0 || self.k_true > self.d {
            return Err(invalid("k_true", format!("need 1 <= k_true <= d, got {}", self.k_true)));
        }
        if self.k_model == 0 || self.k_model > self.d {
            return Err(invalid(
                "k_model",
                format!("need 1 <= k_model <= d, got {}", self.k_model),
            ));
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(invalid("n_grid", "need a non-empty grid of sizes >= 1"));
        }
        if self.t_grid.is_empty() || self.t_grid.contains(&0) {
            return Err(invalid("t_grid", "need a non-empty grid of counts >= 1"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "need trials >= 1"));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(invalid("noise_std", format!("must be finite and >= 0, got {}", self.noise_std)));
        }
        if let Some(r) = self.input_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(invalid("input_radius", format!("must be finite and > 0, got {r}")));
            }
        }
        if self.test_size == 0 {
            return Err(invalid("test_size", "need test_size >= 1"));
        }
        if self.new_task_count == 0 {
            return Err(invalid("new_task_count", "need new_task_count >= 1"));
        }
        if !(self.step0 > 0.0 && self.step0.is_finite()) {
            return Err(invalid("step0", format!("must be finite and > 0, got {}", self.step0)));
        }
        if self.restarts == 0 {
            return Err(invalid("restarts", "need restarts >= 1"));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(invalid("tolerance", format!("must be finite and >= 0, got {}", self.tolerance)));
        }
        if self.tolerance_window == 0 {
            return Err(invalid("tolerance_window", "need tolerance_window >= 1"));
        }
        if !(self.phase_d >= 1.0) || !(self.phase_k >= 1.0) || self.phase_k > self.phase_d {
            return Err(invalid("phase_d", "need 1 <= phase_k <= phase_d"));
        }
        if !(self.phase_delta > 0.0 && self.phase_delta < 1.0) {
            return Err(invalid("phase_delta", format!("must lie in (0, 1), got {}", self.phase_delta)));
        }
        if self.phase_n_points < 2 || self.phase_t_points < 2 {
            return Err(invalid("phase_n_points", "need at least 2 grid points per axis"));
        }
        if !(self.phase_n_max >= 1.0) || !(self.phase_t_max >= 1.0) {
            return Err(invalid("phase_n_max", "need grid maxima >= 1"));
        }
        if self.lower_d == 0 || self.lower_n == 0 {
            return Err(invalid("lower_d", "need lower_d >= 1 and lower_n >= 1"));
        }
        if !(self.lower_delta > 0.0 && self.lower_delta < 1.0) {
            return Err(invalid("lower_delta", format!("must lie in (0, 1), got {}", self.lower_delta)));
        }
        if self.lower_trials == 0 {
            return Err(invalid("lower_trials", "need lower_trials >= 1"));
        }
        if self.complexity_instances == 0 {
            return Err(invalid("complexity_instances", "need at least one instance"));
        }
        if self.complexity_draws < 2 {
            return Err(invalid("complexity_draws", "need at least 2 draws for a standard error"));
        }
        Ok(())
    }

    /// Input sphere radius with the `sqrt(d)` default resolved.
    pub fn input_radius_value(&self) -> f64 {
        self.input_radius.unwrap_or((self.d as f64).sqrt())
    }

    pub fn optimizer_params(&self) -> OptimizerParams<Real> {
        OptimizerParams {
            max_iters: self.max_iters,
            step0: self.step0,
            restarts: self.restarts,
            tolerance: self.tolerance,
            tolerance_window: self.tolerance_window,
        }
    }
}

/// One method's averaged result on one `(n, T, trial)` cell.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub method: Method,
    pub n: usize,
    pub t: usize,
    pub trial: usize,
    /// Mean disagreement with the true half-spaces on fresh test inputs.
    pub test_error: f64,
    /// Mean 0-1 error on the training sample.
    pub training_error: f64,
    /// Dictionary similarity to the generating subspace, joint methods only.
    pub similarity: Option<f64>,
    pub seconds: f64,
}

/// Trial-averaged comparison of the baseline against one method in a cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub n: usize,
    pub t: usize,
    pub itl_mean: f64,
    pub method_mean: f64,
    /// `itl_mean - method_mean`; positive favors the joint or transfer method.
    pub difference: f64,
    pub itl_std_error: f64,
    pub method_std_error: f64,
    pub similarity_mean: Option<f64>,
    pub trials: usize,
}

/// A cell trial that returned an error instead of rows.
#[derive(Debug, Clone, Serialize)]
pub struct CellFailure {
    pub n: usize,
    pub t: usize,
    pub trial: usize,
    pub message: String,
}

/// In-memory result of a sweep, with the paths of its on-disk tables.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<ResultRow>,
    pub cells: Vec<CellSummary>,
    pub failures: Vec<CellFailure>,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub total_seconds: f64,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    version: &'a str,
    method: Method,
    config: &'a SweepConfig,
    cells: &'a [CellSummary],
    failures: &'a [CellFailure],
    /// Sum of real per-row seconds, also when the CSV column is zeroed.
    row_seconds_sum: f64,
    total_seconds: f64,
}

/// Compares per-task training against joint dictionary learning on the
/// `(n, T)` grid, writing `mtl_sweep.csv` and `mtl_sweep_summary.json`.
pub fn run_mtl_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    run_sweep(config, Method::Mtl, run_mtl_cell, "mtl_sweep.csv", "mtl_sweep_summary.json")
}

/// Compares per-task training against adaptation in a learned dictionary on
/// fresh tasks, writing `ltl_sweep.csv` and `ltl_sweep_summary.json`.
pub fn run_ltl_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    run_sweep(config, Method::Ltl, run_ltl_cell, "ltl_sweep.csv", "ltl_sweep_summary.json")
}

type CellRunner = fn(&SweepConfig, usize, usize, usize) -> Result<(ResultRow, ResultRow)>;

fn run_sweep(
    config: &SweepConfig,
    method: Method,
    cell: CellRunner,
    csv_name: &str,
    summary_name: &str,
) -> Result<SweepOutcome> {
    config.validate()?;
    let start = Instant::now();
    let mut keys = Vec::with_capacity(config.n_grid.len() * config.t_grid.len() * config.trials);
    for &n in &config.n_grid {
        for &t in &config.t_grid {
            for trial in 0..config.trials {
                keys.push((n, t, trial));
            }
        }
    }
    let pool = build_pool(config.workers)?;
    // Indexed parallel collect keeps cell order; every stream is derived from
    // the cell key, so worker count cannot influence the rows.
    let results: Vec<Result<(ResultRow, ResultRow)>> = pool.install(|| {
        keys.par_iter()
            .map(|&(n, t, trial)| cell(config, n, t, trial))
            .collect()
    });
    let mut rows = Vec::with_capacity(keys.len() * 2);
    let mut failures = Vec::new();
    for (&(n, t, trial), result) in keys.iter().zip(results) {
        match result {
            Ok((baseline, compared)) => {
                rows.push(baseline);
                rows.push(compared);
            }
            Err(e) => failures.push(CellFailure { n, t, trial, message: e.to_string() }),
        }
    }
    let cells = summarize(config, &rows, method);
    fs::create_dir_all(&config.out_dir)?;
    let csv_path = config.out_dir.join(csv_name);
    write_rows_csv(&csv_path, &rows, config.timing)?;
    let row_seconds_sum = rows.iter().map(|r| r.seconds).sum();
    let total_seconds = start.elapsed().as_secs_f64();
    let summary_path = config.out_dir.join(summary_name);
    write_json(
        &summary_path,
        &SweepSummary {
            version: env!("CARGO_PKG_VERSION"),
            method,
            config,
            cells: &cells,
            failures: &failures,
            row_seconds_sum,
            total_seconds,
        },
    )?;
    Ok(SweepOutcome { rows, cells, failures, csv_path, summary_path, total_seconds })
}

fn cell_parts(purpose: u64, n: usize, t: usize, trial: usize) -> [u64; 4] {
    [purpose, n as u64, t as u64, trial as u64]
}

fn sample_inputs<R: Rng + ?Sized>(
    d: usize,
    count: usize,
    radius: f64,
    rng: &mut R,
) -> Result<Array2<Real>> {
    let mut out = Array2::zeros((count, d));
    for mut row in out.rows_mut() {
        row.assign(&sample_sphere::<Real, _>(d, radius, rng)?);
    }
    Ok(out)
}

fn run_mtl_cell(
    config: &SweepConfig,
    n: usize,
    t: usize,
    trial: usize,
) -> Result<(ResultRow, ResultRow)> {
    let radius = config.input_radius_value();
    let seed = config.master_seed;
    let mut env_rng = seeding::stream(seed, &cell_parts(tag::ENVIRONMENT, n, t, trial));
    let env = generate_environment::<Real, _>(
        config.d,
        config.k_true,
        t,
        config.noise_std,
        radius,
        &mut env_rng,
    )?;
    let mut train_rng = seeding::stream(seed, &cell_parts(tag::TRAIN, n, t, trial));
    let datasets: Vec<TaskDataset<Real>> = (0..t)
        .map(|ti| sample_task_dataset(&env, ti, n, &mut train_rng))
        .collect::<Result<_>>()?;
    let margin = default_margin::<Real>(config.k_model, n)?;
    let params = config.optimizer_params();

    let clock = Instant::now();
    let itl_weights = datasets
        .iter()
        .map(|data| train_itl(data, 1.0, margin, &params))
        .collect::<Result<Vec<_>>>()?;
    let mut itl_seconds = clock.elapsed().as_secs_f64();

    let mut opt_rng = seeding::stream(seed, &cell_parts(tag::OPTIMIZER, n, t, trial));
    let clock = Instant::now();
    let model = train_mtl(&datasets, config.k_model, margin, &params, &mut opt_rng)?;
    let mut mtl_seconds = clock.elapsed().as_secs_f64();

    let mut test_rng = seeding::stream(seed, &cell_parts(tag::TEST, n, t, trial));
    let mut itl_test_sum = 0.0;
    let mut mtl_test_sum = 0.0;
    let mut itl_train_sum = 0.0;
    for ti in 0..t {
        // One test set per task, shared by both methods.
        let test_inputs = sample_inputs(config.d, config.test_size, radius, &mut test_rng)?;
        let truth = env.task_vector(ti)?;
        let data = &datasets[ti];
        let clock = Instant::now();
        itl_test_sum += test_error(truth.view(), itl_weights[ti].coeffs().view(), test_inputs.view())?;
        itl_train_sum +=
            zero_one_risk(data.inputs.view(), data.labels.view(), itl_weights[ti].coeffs().view())?;
        itl_seconds += clock.elapsed().as_secs_f64();
        let clock = Instant::now();
        let task_vector = model.task_vector(ti)?;
        mtl_test_sum += test_error(truth.view(), task_vector.view(), test_inputs.view())?;
        mtl_seconds += clock.elapsed().as_secs_f64();
    }
    let tasks = t as f64;
    let similarity = cross_similarity(config, &model.dictionary, env.dictionary())?;
    Ok((
        ResultRow {
            method: Method::Itl,
            n,
            t,
            trial,
            test_error: itl_test_sum / tasks,
            training_error: itl_train_sum / tasks,
            similarity: None,
            seconds: itl_seconds,
        },
        ResultRow {
            method: Method::Mtl,
            n,
            t,
            trial,
            test_error: mtl_test_sum / tasks,
            training_error: model.training_error,
            similarity,
            seconds: mtl_seconds,
        },
    ))
}

/// Similarity to the generating dictionary, or `None` when the widths differ
/// (the score compares same-shape dictionaries only).
fn cross_similarity(
    config: &SweepConfig,
    learned: &Dictionary<Real>,
    truth: &Dictionary<Real>,
) -> Result<Option<f64>> {
    if config.k_model != truth.width() {
        return Ok(None);
    }
    Ok(Some(dictionary_similarity(learned, truth)?.value))
}

fn run_ltl_cell(
    config: &SweepConfig,
    n: usize,
    t: usize,
    trial: usize,
) -> Result<(ResultRow, ResultRow)> {
    let radius = config.input_radius_value();
    let seed = config.master_seed;
    let mut env_rng = seeding::stream(seed, &cell_parts(tag::ENVIRONMENT, n, t, trial));
    let env = generate_environment::<Real, _>(
        config.d,
        config.k_true,
        t,
        config.noise_std,
        radius,
        &mut env_rng,
    )?;
    let mut train_rng = seeding::stream(seed, &cell_parts(tag::TRAIN, n, t, trial));
    let datasets: Vec<TaskDataset<Real>> = (0..t)
        .map(|ti| sample_task_dataset(&env, ti, n, &mut train_rng))
        .collect::<Result<_>>()?;
    let margin = default_margin::<Real>(config.k_model, n)?;
    let params = config.optimizer_params();

    // The transfer cost includes learning the dictionary on the seen tasks.
    let mut opt_rng = seeding::stream(seed, &cell_parts(tag::OPTIMIZER, n, t, trial));
    let clock = Instant::now();
    let model = train_mtl(&datasets, config.k_model, margin, &params, &mut opt_rng)?;
    let mut ltl_seconds = clock.elapsed().as_secs_f64();

    let mut task_rng = seeding::stream(seed, &cell_parts(tag::NEW_TASK, n, t, trial));
    let fresh = env.with_fresh_tasks(config.new_task_count, &mut task_rng)?;
    let fresh_data: Vec<TaskDataset<Real>> = (0..config.new_task_count)
        .map(|ti| sample_task_dataset(&fresh, ti, n, &mut task_rng))
        .collect::<Result<_>>()?;

    let clock = Instant::now();
    let itl_weights = fresh_data
        .iter()
        .map(|data| train_itl(data, 1.0, margin, &params))
        .collect::<Result<Vec<_>>>()?;
    let mut itl_seconds = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let adapted = fresh_data
        .iter()
        .map(|data| adapt_new_task(&model.dictionary, data, margin, &params))
        .collect::<Result<Vec<_>>>()?;
    ltl_seconds += clock.elapsed().as_secs_f64();

    let mut test_rng = seeding::stream(seed, &cell_parts(tag::TEST, n, t, trial));
    let mut itl_test_sum = 0.0;
    let mut ltl_test_sum = 0.0;
    let mut itl_train_sum = 0.0;
    let mut ltl_train_sum = 0.0;
    for ti in 0..config.new_task_count {
        let test_inputs = sample_inputs(config.d, config.test_size, radius, &mut test_rng)?;
        let truth = fresh.task_vector(ti)?;
        let data = &fresh_data[ti];
        let clock = Instant::now();
        itl_test_sum += test_error(truth.view(), itl_weights[ti].coeffs().view(), test_inputs.view())?;
        itl_train_sum +=
            zero_one_risk(data.inputs.view(), data.labels.view(), itl_weights[ti].coeffs().view())?;
        itl_seconds += clock.elapsed().as_secs_f64();
        let clock = Instant::now();
        let task_vector = model.dictionary.task_vector(adapted[ti].coeffs().view())?;
        ltl_test_sum += test_error(truth.view(), task_vector.view(), test_inputs.view())?;
        ltl_train_sum += zero_one_risk(data.inputs.view(), data.labels.view(), task_vector.view())?;
        ltl_seconds += clock.elapsed().as_secs_f64();
    }
    let tasks = config.new_task_count as f64;
    let similarity = cross_similarity(config, &model.dictionary, env.dictionary())?;
    Ok((
        ResultRow {
            method: Method::Itl,
            n,
            t,
            trial,
            test_error: itl_test_sum / tasks,
            training_error: itl_train_sum / tasks,
            similarity: None,
            seconds: itl_seconds,
        },
        ResultRow {
            method: Method::Ltl,
            n,
            t,
            trial,
            test_error: ltl_test_sum / tasks,
            training_error: ltl_train_sum / tasks,
            similarity,
            seconds: ltl_seconds,
        },
    ))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_error(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    (var / xs.len() as f64).sqrt()
}

fn summarize(config: &SweepConfig, rows: &[ResultRow], method: Method) -> Vec<CellSummary> {
    let mut cells = Vec::new();
    for &n in &config.n_grid {
        for &t in &config.t_grid {
            let in_cell = |r: &&ResultRow| r.n == n && r.t == t;
            let itl: Vec<f64> = rows
                .iter()
                .filter(in_cell)
                .filter(|r| r.method == Method::Itl)
                .map(|r| r.test_error)
                .collect();
            let compared: Vec<f64> = rows
                .iter()
                .filter(in_cell)
                .filter(|r| r.method == method)
                .map(|r| r.test_error)
                .collect();
            if itl.is_empty() || compared.is_empty() {
                // All trials of this cell failed.
                continue;
            }
            let similarities: Vec<f64> = rows
                .iter()
                .filter(in_cell)
                .filter(|r| r.method == method)
                .filter_map(|r| r.similarity)
                .collect();
            let itl_mean = mean(&itl);
            let method_mean = mean(&compared);
            cells.push(CellSummary {
                n,
                t,
                itl_mean,
                method_mean,
                difference: itl_mean - method_mean,
                itl_std_error: std_error(&itl),
                method_std_error: std_error(&compared),
                similarity_mean: if similarities.is_empty() { None } else { Some(mean(&similarities)) },
                trials: compared.len(),
            });
        }
    }
    cells
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        builder = builder.num_threads(workers);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

fn write_rows_csv(path: &Path, rows: &[ResultRow], timing: bool) -> Result<()> {
    let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    writer.write_record(["method", "n", "T", "trial", "test_error", "training_error", "similarity", "seconds"])?;
    for row in rows {
        let similarity = row.similarity.map(|s| format!("{s:.6}")).unwrap_or_default();
        let seconds = if timing { format!("{:.6}", row.seconds) } else { "0.000000".to_string() };
        writer.write_record([
            row.method.to_string(),
            row.n.to_string(),
            row.t.to_string(),
            row.trial.to_string(),
            format!("{:.6}", row.test_error),
            format!("{:.6}", row.training_error),
            similarity,
            seconds,
        ])?;
    }
    writer.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    Ok(())
}

/// First grid `T` with positive advantage for one sample size.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseBoundaryPoint {
    pub n: f64,
    pub first_positive_t: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PhaseOutcome {
    pub diagram: PhaseDiagram<Real>,
    pub positive_cells: usize,
    pub boundary: Vec<PhaseBoundaryPoint>,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub total_seconds: f64,
}

#[derive(Serialize)]
struct PhaseSummary<'a> {
    version: &'a str,
    config: &'a SweepConfig,
    cell_count: usize,
    positive_cells: usize,
    boundary: &'a [PhaseBoundaryPoint],
    total_seconds: f64,
}

/// Evaluates the closed-form advantage grid and writes `phase_diagram.csv`
/// plus `phase_diagram_summary.json`.
pub fn run_phase_diagram(config: &SweepConfig) -> Result<PhaseOutcome> {
    config.validate()?;
    let start = Instant::now();
    let params = PhaseDiagramParams {
        d: config.phase_d,
        k: config.phase_k,
        delta: config.phase_delta,
        n_grid: log_grid(1.0, config.phase_n_max, config.phase_n_points)?,
        t_grid: log_grid(1.0, config.phase_t_max, config.phase_t_points)?,
        delta_split: config.phase_delta_split,
    };
    let diagram = phase_diagram(params)?;
    fs::create_dir_all(&config.out_dir)?;
    let csv_path = config.out_dir.join("phase_diagram.csv");
    diagram.write_csv(BufWriter::new(File::create(&csv_path)?))?;
    let positive_cells = diagram.positive_cells();
    let boundary: Vec<PhaseBoundaryPoint> = diagram
        .boundary()
        .into_iter()
        .map(|(n, first_positive_t)| PhaseBoundaryPoint { n, first_positive_t })
        .collect();
    let total_seconds = start.elapsed().as_secs_f64();
    let summary_path = config.out_dir.join("phase_diagram_summary.json");
    write_json(
        &summary_path,
        &PhaseSummary {
            version: env!("CARGO_PKG_VERSION"),
            config,
            cell_count: diagram.cells.len(),
            positive_cells,
            boundary: &boundary,
            total_seconds,
        },
    )?;
    Ok(PhaseOutcome { diagram, positive_cells, boundary, csv_path, summary_path, total_seconds })
}

/// One Monte-Carlo check of the Gaussian-average bound on a random instance.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexityCheck {
    pub instance: usize,
    pub d: usize,
    pub k: usize,
    /// Pooled rows `m = n * T` of the instance.
    pub sample_size: usize,
    pub estimate: f64,
    pub std_error: f64,
    /// Closed-form `K sqrt(m tr(C_hat))`.
    pub bound: f64,
    /// `bound + 3 std_error - estimate`; negative means the check failed.
    pub slack: f64,
    pub sup_norm: f64,
    /// Same quantity through power iteration instead of the Jacobi solver.
    pub sup_norm_independent: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ComplexityOutcome {
    pub checks: Vec<ComplexityCheck>,
    pub all_pass: bool,
    pub summary_path: PathBuf,
    pub total_seconds: f64,
}

#[derive(Serialize)]
struct ComplexitySummary<'a> {
    version: &'a str,
    master_seed: u64,
    instances: usize,
    draws: usize,
    all_pass: bool,
    checks: &'a [ComplexityCheck],
    total_seconds: f64,
}

const SUP_NORM_CROSS_TOL: f64 = 1e-8;

/// Estimates the Gaussian average of the pooled linear class on random
/// Gaussian instances and compares it to the closed-form trace bound with a
/// three-sigma margin; cross-checks the supremum norm against an independent
/// eigensolver. Writes `complexity_checks.json`.
pub fn verify_complexity(config: &SweepConfig) -> Result<ComplexityOutcome> {
    config.validate()?;
    let start = Instant::now();
    let checks: Vec<ComplexityCheck> = (0..config.complexity_instances)
        .map(|instance| {
            let mut rng = seeding::stream(config.master_seed, &[tag::COMPLEXITY, instance as u64]);
            let d = rng.random_range(3..=20usize);
            let k = rng.random_range(1..=3usize);
            let n = rng.random_range(2..=8usize);
            let t = rng.random_range(1..=8usize);
            let m = n * t;
            let mut data = Array2::<Real>::zeros((m, d));
            for v in data.iter_mut() {
                *v = Real::standard_normal(&mut rng);
            }
            let estimate =
                gaussian_average_linear(data.view(), k, config.complexity_draws, &mut rng)?;
            let trace = empirical_covariance_norms(data.view())?.trace_norm;
            let bound = k as f64 * (m as f64 * trace).sqrt();
            let slack = bound + 3.0 * estimate.std_error - estimate.mean;
            let sup_norm = sup_representation_norm(data.view(), k)?;
            let cov = data.t().dot(&data) / m as f64;
            let lambda = lambda_max_power_iteration(cov.view(), 10_000, 1e-14)?;
            let sup_norm_independent = (k as f64 * m as f64 * lambda).sqrt();
            let cross_ok =
                (sup_norm - sup_norm_independent).abs() <= SUP_NORM_CROSS_TOL * sup_norm.max(1.0);
            Ok(ComplexityCheck {
                instance,
                d,
                k,
                sample_size: m,
                estimate: estimate.mean,
                std_error: estimate.std_error,
                bound,
                slack,
                sup_norm,
                sup_norm_independent,
                pass: slack >= 0.0 && cross_ok,
            })
        })
        .collect::<Result<_>>()?;
    let all_pass = checks.iter().all(|c| c.pass);
    fs::create_dir_all(&config.out_dir)?;
    let total_seconds = start.elapsed().as_secs_f64();
    let summary_path = config.out_dir.join("complexity_checks.json");
    write_json(
        &summary_path,
        &ComplexitySummary {
            version: env!("CARGO_PKG_VERSION"),
            master_seed: config.master_seed,
            instances: config.complexity_instances,
            draws: config.complexity_draws,
            all_pass,
            checks: &checks,
            total_seconds,
        },
    )?;
    Ok(ComplexityOutcome { checks, all_pass, summary_path, total_seconds })
}

/// One task drawn for the lower-bound simulation.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundTrial {
    pub trial: usize,
    /// Angular disagreement of the learned and true half-spaces.
    pub risk: f64,
    /// Risk fell below the certified lower value.
    pub violated: bool,
}

#[derive(Debug, Clone)]
pub struct LowerBoundOutcome {
    pub trials: Vec<LowerBoundTrial>,
    pub lower_value: f64,
    pub lower_vacuous: bool,
    pub violation_fraction: f64,
    pub summary_path: PathBuf,
    pub total_seconds: f64,
}

#[derive(Serialize)]
struct LowerBoundSummary<'a> {
    version: &'a str,
    master_seed: u64,
    d: usize,
    n: usize,
    delta: f64,
    trial_count: usize,
    lower_value: f64,
    lower_vacuous: bool,
    violation_fraction: f64,
    trials: &'a [LowerBoundTrial],
    total_seconds: f64,
}

/// Trains an equivariant single-task learner on fresh random half-spaces and
/// counts how often its exact risk falls below the data-scarcity lower value.
/// Writes `lower_bound_sim.json`.
pub fn simulate_lower_bound(config: &SweepConfig) -> Result<LowerBoundOutcome> {
    config.validate()?;
    let start = Instant::now();
    let d = config.lower_d;
    let n = config.lower_n;
    let lower = equivariant_lower(d as f64, n as f64, config.lower_delta)?;
    let radius = (d as f64).sqrt();
    // Raw single-task learning: width-one feature space, unit norm budget.
    let margin = default_margin::<Real>(1, n)?;
    let params = config.optimizer_params();
    let pool = build_pool(config.workers)?;
    let risks: Vec<Result<f64>> = pool.install(|| {
        (0..config.lower_trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = seeding::stream(config.master_seed, &[tag::LOWER_BOUND, trial as u64]);
                let u = sample_sphere::<Real, _>(d, 1.0, &mut rng)?;
                let data = sample_halfspace_dataset(u.view(), n, radius, 0.0, &mut rng)?;
                let weights = train_itl(&data, 1.0, margin, &params)?;
                let norm = weights.norm();
                if norm == 0.0 {
                    // sign(0) = +1 everywhere disagrees on a half-sphere.
                    return Ok(0.5);
                }
                let unit = weights.into_coeffs().mapv(|x| x / norm);
                analytic_err(u.view(), unit.view())
            })
            .collect()
    });
    let mut trials = Vec::with_capacity(config.lower_trials);
    let mut violations = 0usize;
    for (trial, risk) in risks.into_iter().enumerate() {
        let risk = risk?;
        let violated = risk < lower.value;
        if violated {
            violations += 1;
        }
        trials.push(LowerBoundTrial { trial, risk, violated });
    }
    let violation_fraction = violations as f64 / trials.len() as f64;
    fs::create_dir_all(&config.out_dir)?;
    let total_seconds = start.elapsed().as_secs_f64();
    let summary_path = config.out_dir.join("lower_bound_sim.json");
    write_json(
        &summary_path,
        &LowerBoundSummary {
            version: env!("CARGO_PKG_VERSION"),
            master_seed: config.master_seed,
            d,
            n,
            delta: config.lower_delta,
            trial_count: trials.len(),
            lower_value: lower.value,
            lower_vacuous: lower.vacuous,
            violation_fraction,
            trials: &trials,
            total_seconds,
        },
    )?;
    Ok(LowerBoundOutcome {
        trials,
        lower_value: lower.value,
        lower_vacuous: lower.vacuous,
        violation_fraction,
        summary_path,
        total_seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn tiny_config(out: &Path) -> SweepConfig {
        let mut config = SweepConfig::default();
        config.d = 6;
        config.k_true = 2;
        config.k_model = 2;
        config.n_grid = vec![4];
        config.t_grid = vec![3];
        config.trials = 2;
        config.test_size = 40;
        config.new_task_count = 3;
        config.max_iters = 40;
        config.restarts = 1;
        config.tolerance_window = 10;
        config.out_dir = out.to_path_buf();
        config
    }

    #[test]
    fn default_config_passes_validation() {
        SweepConfig::default().validate().unwrap();
    }

    #[test]
    fn validation_rejects_inconsistent_settings() {
        let mut config = SweepConfig::default();
        config.n_grid.clear();
        assert!(config.validate().is_err());

        let mut config = SweepConfig::default();
        config.k_model = config.d + 1;
        assert!(config.validate().is_err());

        let mut config = SweepConfig::default();
        config.trials = 0;
        assert!(config.validate().is_err());

        let mut config = SweepConfig::default();
        config.phase_delta = 1.5;
        assert!(config.validate().is_err());

        let mut config = SweepConfig::default();
        config.step0 = 0.0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn config_keys_parse_and_override_defaults() {
        let mut config = SweepConfig::default();
        config
            .apply_text(
                "# comment line\n\
                 d = 12\n\
                 n_grid = 3,5\n\
                 t_grid = 2\n\
                 \n\
                 input_radius = auto\n\
                 timing = true\n\
                 out_dir = results/run1\n\
                 step0 = 0.5\n\
                 master_seed = 99\n",
            )
            .unwrap();
        assert_eq!(config.d, 12);
        assert_eq!(config.n_grid, vec![3, 5]);
        assert_eq!(config.t_grid, vec![2]);
        assert_eq!(config.input_radius, None);
        assert!(config.timing);
        assert_eq!(config.out_dir, PathBuf::from("results/run1"));
        assert_eq!(config.step0, 0.5f64);
        assert_eq!(config.master_seed, 99);
    }

    #[test]
    fn unknown_config_keys_are_rejected_by_name() {
        let mut config = SweepConfig::default();
        let err = config.apply("n_gird", "3").unwrap_err();
        assert!(err.to_string().contains("n_gird"), "{err}");
    }

    #[test]
    fn malformed_config_values_are_rejected() {
        let mut config = SweepConfig::default();
        assert!(config.apply("d", "banana").is_err());
        assert!(config.apply_text("just a line without an equals sign").is_err());
    }

    #[test]
    fn config_file_round_trip() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("sweep.conf");
        fs::write(&path, "d = 9\nk_true = 3\nn_grid = 2,4,8\nlower_trials = 7\n").unwrap();
        let config = SweepConfig::from_file(&path).unwrap();
        assert_eq!(config.d, 9);
        assert_eq!(config.k_true, 3);
        assert_eq!(config.n_grid, vec![2, 4, 8]);
        assert_eq!(config.lower_trials, 7);
        assert_eq!(config.t_grid, SweepConfig::default().t_grid);
    }

    #[test]
    fn input_radius_defaults_to_sqrt_d() {
        let mut config = SweepConfig::default();
        config.d = 49;
        assert_eq!(config.input_radius_value(), 7.0f64);
        config.input_radius = Some(2.5);
        assert_eq!(config.input_radius_value(), 2.5f64);
    }

    #[test]
    fn mtl_sweep_rows_cover_the_grid_and_stay_in_range() {
        let dir = TempDir::new().unwrap();
        let config = tiny_config(dir.path());
        let outcome = run_mtl_sweep(&config).unwrap();
        assert!(outcome.failures.is_empty(), "{:?}", outcome.failures);
        assert_eq!(outcome.rows.len(), 4);
        for row in &outcome.rows {
            assert_eq!(row.n, 4);
            assert_eq!(row.t, 3);
            assert!((0.0..=1.0).contains(&row.test_error));
            assert!((0.0..=1.0).contains(&row.training_error));
            match row.method {
                Method::Itl => assert!(row.similarity.is_none()),
                Method::Mtl => {
                    let s = row.similarity.unwrap();
                    assert!((0.0..=1.0).contains(&s));
                }
                Method::Ltl => panic!("no transfer rows in a joint sweep"),
            }
        }
        assert_eq!(outcome.cells.len(), 1);
        let cell = &outcome.cells[0];
        assert_eq!(cell.trials, 2);
        let itl: Vec<f64> = outcome
            .rows
            .iter()
            .filter(|r| r.method == Method::Itl)
            .map(|r| r.test_error)
            .collect();
        let mtl: Vec<f64> = outcome
            .rows
            .iter()
            .filter(|r| r.method == Method::Mtl)
            .map(|r| r.test_error)
            .collect();
        assert_eq!(cell.itl_mean, mean(&itl));
        assert_eq!(cell.method_mean, mean(&mtl));
        assert_eq!(cell.difference, cell.itl_mean - cell.method_mean);
        assert!(outcome.csv_path.exists());
        assert!(outcome.summary_path.exists());
    }

    #[test]
    fn sweep_csv_is_byte_identical_across_worker_counts() {
        let dir = TempDir::new().unwrap();
        let mut first = tiny_config(&dir.path().join("w1"));
        first.workers = 1;
        let mut second = tiny_config(&dir.path().join("w4"));
        second.workers = 4;
        let mut repeat = tiny_config(&dir.path().join("w1b"));
        repeat.workers = 1;
        let a = run_mtl_sweep(&first).unwrap();
        let b = run_mtl_sweep(&second).unwrap();
        let c = run_mtl_sweep(&repeat).unwrap();
        let bytes_a = fs::read(&a.csv_path).unwrap();
        let bytes_b = fs::read(&b.csv_path).unwrap();
        let bytes_c = fs::read(&c.csv_path).unwrap();
        assert_eq!(bytes_a, bytes_b);
        assert_eq!(bytes_a, bytes_c);
    }

    #[test]
    fn sweep_csv_has_fixed_header_and_zeroed_seconds() {
        let dir = TempDir::new().unwrap();
        let config = tiny_config(dir.path());
        let outcome = run_mtl_sweep(&config).unwrap();
        let text = fs::read_to_string(&outcome.csv_path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "method,n,T,trial,test_error,training_error,similarity,seconds"
        );
        for line in lines {
            assert!(line.ends_with(",0.000000"), "{line}");
        }
        // Real timings still reach the summary.
        let summary = fs::read_to_string(&outcome.summary_path).unwrap();
        assert!(summary.contains("row_seconds_sum"));
    }

    #[test]
    fn timing_flag_writes_real_seconds() {
        let dir = TempDir::new().unwrap();
        let mut config = tiny_config(dir.path());
        config.timing = true;
        let outcome = run_mtl_sweep(&config).unwrap();
        let text = fs::read_to_string(&outcome.csv_path).unwrap();
        for line in text.lines().skip(1) {
            let seconds: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!(seconds >= 0.0);
        }
    }

    #[test]
    fn ltl_sweep_reports_similarity_on_transfer_rows() {
        let dir = TempDir::new().unwrap();
        let config = tiny_config(dir.path());
        let outcome = run_ltl_sweep(&config).unwrap();
        assert!(outcome.failures.is_empty(), "{:?}", outcome.failures);
        assert_eq!(outcome.rows.len(), 4);
        for row in &outcome.rows {
            match row.method {
                Method::Itl => assert!(row.similarity.is_none()),
                Method::Ltl => assert!(row.similarity.is_some()),
                Method::Mtl => panic!("no joint rows in a transfer sweep"),
            }
        }
        assert_eq!(outcome.cells.len(), 1);
        assert!(outcome.csv_path.ends_with("ltl_sweep.csv"));
    }

    #[test]
    fn phase_diagram_outputs_expected_cell_count() {
        let dir = TempDir::new().unwrap();
        let mut config = SweepConfig::default();
        config.out_dir = dir.path().to_path_buf();
        config.phase_n_points = 12;
        config.phase_t_points = 9;
        let outcome = run_phase_diagram(&config).unwrap();
        assert_eq!(outcome.diagram.cells.len(), 108);
        assert!(outcome.positive_cells > 0);
        assert_eq!(outcome.boundary.len(), 12);
        let text = fs::read_to_string(&outcome.csv_path).unwrap();
        assert_eq!(text.lines().count(), 109);
        assert!(outcome.summary_path.exists());
    }

    #[test]
    fn complexity_checks_pass_on_small_instances() {
        let dir = TempDir::new().unwrap();
        let mut config = SweepConfig::default();
        config.out_dir = dir.path().to_path_buf();
        config.complexity_instances = 5;
        config.complexity_draws = 400;
        let outcome = verify_complexity(&config).unwrap();
        assert_eq!(outcome.checks.len(), 5);
        assert!(outcome.all_pass, "{:?}", outcome.checks);
        for check in &outcome.checks {
            assert!(check.estimate <= check.bound + 3.0 * check.std_error);
            assert!(
                (check.sup_norm - check.sup_norm_independent).abs()
                    <= SUP_NORM_CROSS_TOL * check.sup_norm.max(1.0)
            );
        }
        assert!(outcome.summary_path.exists());
    }

    #[test]
    fn complexity_checks_are_deterministic() {
        let dir = TempDir::new().unwrap();
        let mut config = SweepConfig::default();
        config.out_dir = dir.path().to_path_buf();
        config.complexity_instances = 2;
        config.complexity_draws = 200;
        let first = verify_complexity(&config).unwrap();
        let second = verify_complexity(&config).unwrap();
        for (a, b) in first.checks.iter().zip(&second.checks) {
            assert_eq!(a.estimate, b.estimate);
            assert_eq!(a.bound, b.bound);
        }
    }

    #[test]
    fn lower_bound_sim_rarely_sees_violations() {
        let dir = TempDir::new().unwrap();
        let mut config = SweepConfig::default();
        config.out_dir = dir.path().to_path_buf();
        config.lower_d = 40;
        config.lower_n = 10;
        config.lower_trials = 15;
        let outcome = simulate_lower_bound(&config).unwrap();
        assert!(outcome.lower_value > 0.0);
        assert!(!outcome.lower_vacuous);
        assert_eq!(outcome.trials.len(), 15);
        // The bound certifies violations with probability <= 0.05 per trial.
        assert!(outcome.violation_fraction <= 1.0 / 3.0, "{}", outcome.violation_fraction);
        assert!(outcome.summary_path.exists());
    }

    #[test]
    fn lower_bound_sim_is_vacuous_without_data_scarcity() {
        let dir = TempDir::new().unwrap();
        let mut config = SweepConfig::default();
        config.out_dir = dir.path().to_path_buf();
        config.lower_d = 8;
        config.lower_n = 10;
        config.lower_trials = 5;
        let outcome = simulate_lower_bound(&config).unwrap();
        assert!(outcome.lower_vacuous);
        assert_eq!(outcome.lower_value, 0.0f64);
        assert_eq!(outcome.violation_fraction, 0.0f64);
    }
}

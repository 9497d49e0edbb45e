//! Projected subgradient trainers.
//!
//! Three learners share one primitive, hinge risk minimization over a norm
//! ball with decaying steps `step0 / sqrt(i+1)` and best-iterate tracking:
//!
//! * `train_itl`: one weight vector per task in input space, l2 ball.
//! * `train_mtl`: joint dictionary plus per-task coefficients, alternating
//!   one projected step on all coefficient blocks then one on the dictionary
//!   per iteration; the dictionary lives in the unit Frobenius ball, each
//!   coefficient vector in the unit l2 ball. Non-convexity is handled by
//!   seeded Gaussian restarts keeping the best joint objective.
//! * `adapt_new_task`: coefficients only, dictionary frozen.
//!
//! Weight blocks start at zero, which keeps `train_itl` equivariant under
//! orthogonal maps of the inputs.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;
use serde::Serialize;

use crate::hypothesis::{
    project_frobenius_ball, project_l2_ball, sign_pm, training_hinge, Dictionary, TaskWeights,
};
use crate::synthgen::TaskDataset;
use crate::{invalid, mismatch, Result, Scalar};

/// Step budget, restart count, and early-stop rule shared by the trainers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimizerParams<S> {
    /// Full passes; 0 returns the feasible initialization.
    pub max_iters: usize,
    /// Initial step size for the `step0 / sqrt(i+1)` schedule.
    pub step0: S,
    /// Independent restarts (fresh dictionary init); best objective kept.
    pub restarts: usize,
    /// Stop once the best objective improves less than this per window.
    pub tolerance: S,
    /// Iterations per early-stop check.
    pub tolerance_window: usize,
}

impl<S: Scalar> Default for OptimizerParams<S> {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            step0: S::one(),
            restarts: 3,
            tolerance: S::real(1e-6),
            tolerance_window: 100,
        }
    }
}

impl<S: Scalar> OptimizerParams<S> {
    fn validate(&self) -> Result<()> {
        if !(self.step0 > S::zero()) || !self.step0.is_finite() {
            return Err(invalid("step0", format!("must be positive, got {}", self.step0)));
        }
        if self.restarts == 0 {
            return Err(invalid("restarts", "need at least one restart"));
        }
        if !(self.tolerance >= S::zero()) {
            return Err(invalid("tolerance", format!("must be >= 0, got {}", self.tolerance)));
        }
        if self.tolerance_window == 0 {
            return Err(invalid("tolerance_window", "need a window of at least one iteration"));
        }
        Ok(())
    }
}

/// Jointly trained dictionary and per-task coefficients.
#[derive(Debug, Clone)]
pub struct MtlModel<S> {
    pub dictionary: Dictionary<S>,
    pub task_weights: Vec<TaskWeights<S>>,
    pub margin: S,
    /// Average 0-1 error on the training sample.
    pub training_error: S,
    /// Average hinge objective of the best joint iterate.
    pub training_objective: S,
}

impl<S: Scalar> MtlModel<S> {
    /// Task vector `D c_t` of a trained task.
    pub fn task_vector(&self, task_index: usize) -> Result<Array1<S>> {
        let w = self
            .task_weights
            .get(task_index)
            .ok_or_else(|| invalid("task_index", format!("{} tasks available", self.task_weights.len())))?;
        self.dictionary.task_vector(w.coeffs().view())
    }
}

/// Ceiling for `default_margin`, in score units.
///
/// Feasible predictors have `|Dc| <= 1`, and inputs on the radius `sqrt(d)`
/// sphere make scores roughly standard normal, so a margin much above 1 is
/// unreachable: every sample stays on the linear side of the hinge and the
/// minimizer degenerates to the mean direction, which classifies training
/// data poorly when few tasks are available. Capping at one score standard
/// deviation keeps the kink active.
pub const MARGIN_CAP: f64 = 1.0;

/// Margin used by the experiments: `c = 2 sqrt(n/k_model)` capped at
/// [`MARGIN_CAP`].
pub fn default_margin<S: Scalar>(k_model: usize, n: usize) -> Result<S> {
    if k_model == 0 || n == 0 {
        return Err(invalid("k_model", "margin needs k_model >= 1 and n >= 1"));
    }
    let uncapped = S::real(2.0) * S::real(n as f64 / k_model as f64).sqrt();
    Ok(uncapped.min(S::real(MARGIN_CAP)))
}

/// Mean training hinge `max(0, 1 - y <w, x> / c)` of a weight vector.
pub fn hinge_risk<S: Scalar>(
    inputs: ArrayView2<'_, S>,
    labels: ArrayView1<'_, S>,
    weights: ArrayView1<'_, S>,
    margin: S,
) -> Result<S> {
    check_sample(inputs, labels)?;
    if weights.len() != inputs.ncols() {
        return Err(mismatch(format!(
            "{} weights against dimension {}",
            weights.len(),
            inputs.ncols()
        )));
    }
    let scores = inputs.dot(&weights);
    let mut total = S::zero();
    for i in 0..inputs.nrows() {
        let (value, _) = training_hinge(labels[i] * scores[i], margin)?;
        total = total + value;
    }
    Ok(total / S::real(inputs.nrows() as f64))
}

/// Mean 0-1 error of the sign predictor of a weight vector.
pub fn zero_one_risk<S: Scalar>(
    inputs: ArrayView2<'_, S>,
    labels: ArrayView1<'_, S>,
    weights: ArrayView1<'_, S>,
) -> Result<S> {
    check_sample(inputs, labels)?;
    if weights.len() != inputs.ncols() {
        return Err(mismatch(format!(
            "{} weights against dimension {}",
            weights.len(),
            inputs.ncols()
        )));
    }
    let scores = inputs.dot(&weights);
    let wrong = (0..inputs.nrows())
        .filter(|&i| sign_pm(scores[i]) != labels[i])
        .count();
    Ok(S::real(wrong as f64 / inputs.nrows() as f64))
}

fn check_sample<S: Scalar>(inputs: ArrayView2<'_, S>, labels: ArrayView1<'_, S>) -> Result<()> {
    if inputs.nrows() == 0 {
        return Err(invalid("dataset", "need at least one sample"));
    }
    if labels.len() != inputs.nrows() {
        return Err(mismatch(format!(
            "{} labels against {} inputs",
            labels.len(),
            inputs.nrows()
        )));
    }
    Ok(())
}

struct Descent<S> {
    weights: Array1<S>,
    objective: S,
}

// best-iterate projected subgradient on mean hinge risk over an l2 ball,
// started at zero
fn projected_hinge_descent<S: Scalar>(
    features: ArrayView2<'_, S>,
    labels: ArrayView1<'_, S>,
    radius: S,
    margin: S,
    params: &OptimizerParams<S>,
) -> Result<Descent<S>> {
    let (n, p) = features.dim();
    let n_scale = S::real(n as f64);
    let mut w: Array1<S> = Array1::zeros(p);
    let mut best = Descent {
        weights: w.clone(),
        objective: hinge_risk(features, labels, w.view(), margin)?,
    };
    let mut window_best = best.objective;
    for iter in 0..params.max_iters {
        let scores = features.dot(&w);
        let mut objective = S::zero();
        let mut grad: Array1<S> = Array1::zeros(p);
        for i in 0..n {
            let (value, slope) = training_hinge(labels[i] * scores[i], margin)?;
            objective = objective + value;
            if slope != S::zero() {
                grad.scaled_add(slope * labels[i] / n_scale, &features.row(i));
            }
        }
        objective = objective / n_scale;
        if objective < best.objective {
            best.objective = objective;
            best.weights.assign(&w);
        }
        let step = params.step0 / S::real((iter + 1) as f64).sqrt();
        w.scaled_add(-step, &grad);
        project_l2_ball(&mut w, radius)?;
        if (iter + 1) % params.tolerance_window == 0 {
            if window_best - best.objective < params.tolerance {
                break;
            }
            window_best = best.objective;
        }
    }
    let final_objective = hinge_risk(features, labels, w.view(), margin)?;
    if final_objective < best.objective {
        best.objective = final_objective;
        best.weights = w;
    }
    Ok(best)
}

/// Independent task learning: hinge minimization over the l2 ball of the
/// given radius in input space. Deterministic (zero initialization).
pub fn train_itl<S: Scalar>(
    dataset: &TaskDataset<S>,
    radius: S,
    margin: S,
    params: &OptimizerParams<S>,
) -> Result<TaskWeights<S>> {
    params.validate()?;
    if !(radius > S::zero()) {
        return Err(invalid("radius", format!("must be positive, got {radius}")));
    }
    let out = projected_hinge_descent(
        dataset.inputs.view(),
        dataset.labels.view(),
        radius,
        margin,
        params,
    )?;
    TaskWeights::new(out.weights, radius)
}

/// Coefficients for one fresh task in a frozen representation: hinge
/// minimization over the unit ball in feature space. Deterministic.
pub fn adapt_new_task<S: Scalar>(
    dictionary: &Dictionary<S>,
    dataset: &TaskDataset<S>,
    margin: S,
    params: &OptimizerParams<S>,
) -> Result<TaskWeights<S>> {
    params.validate()?;
    check_sample(dataset.inputs.view(), dataset.labels.view())?;
    if dataset.dim() != dictionary.input_dim() {
        return Err(mismatch(format!(
            "inputs of dimension {} against dictionary dimension {}",
            dataset.dim(),
            dictionary.input_dim()
        )));
    }
    let features = dataset.inputs.dot(dictionary.entries());
    let out = projected_hinge_descent(
        features.view(),
        dataset.labels.view(),
        S::one(),
        margin,
        params,
    )?;
    TaskWeights::new(out.weights, S::one())
}

fn joint_objective<S: Scalar>(
    dict: &Array2<S>,
    coeffs: &[Array1<S>],
    datasets: &[TaskDataset<S>],
    margin: S,
) -> Result<S> {
    let mut total = S::zero();
    for (c, data) in coeffs.iter().zip(datasets) {
        let u = dict.dot(c);
        total = total + hinge_risk(data.inputs.view(), data.labels.view(), u.view(), margin)?;
    }
    Ok(total / S::real(datasets.len() as f64))
}

/// Joint dictionary learning across tasks by alternating projected
/// subgradient steps; returns the best joint iterate over all restarts.
pub fn train_mtl<S: Scalar, R: Rng + ?Sized>(
    datasets: &[TaskDataset<S>],
    k_model: usize,
    margin: S,
    params: &OptimizerParams<S>,
    rng: &mut R,
) -> Result<MtlModel<S>> {
    params.validate()?;
    if datasets.is_empty() {
        return Err(invalid("datasets", "need at least one task"));
    }
    let d = datasets[0].dim();
    for (t, data) in datasets.iter().enumerate() {
        check_sample(data.inputs.view(), data.labels.view())
            .map_err(|_| invalid("datasets", format!("task {t} is empty or inconsistent")))?;
        if data.dim() != d {
            return Err(mismatch(format!(
                "task {t} has dimension {} against {}",
                data.dim(),
                d
            )));
        }
    }
    if k_model == 0 || k_model > d {
        return Err(invalid("k_model", format!("need 1 <= k_model <= d, got {k_model}")));
    }
    let t_count = datasets.len();
    let t_scale = S::real(t_count as f64);

    let mut overall: Option<(Array2<S>, Vec<Array1<S>>, S)> = None;
    for _restart in 0..params.restarts {
        let mut dict = Array2::from_shape_fn((d, k_model), |_| S::standard_normal(rng));
        project_frobenius_ball(&mut dict, S::one())?;
        let mut coeffs: Vec<Array1<S>> = vec![Array1::zeros(k_model); t_count];
        let mut best_obj = joint_objective(&dict, &coeffs, datasets, margin)?;
        let mut best_dict = dict.clone();
        let mut best_coeffs = coeffs.clone();
        let mut window_best = best_obj;

        for iter in 0..params.max_iters {
            let step = params.step0 / S::real((iter + 1) as f64).sqrt();

            // coefficient blocks: separable given the dictionary, so each
            // uses its own per-task averaged subgradient
            for (c, data) in coeffs.iter_mut().zip(datasets) {
                let feats = data.inputs.dot(&dict);
                let scores = feats.dot(&*c);
                let n_scale = S::real(data.len() as f64);
                let mut grad: Array1<S> = Array1::zeros(k_model);
                for i in 0..data.len() {
                    let (_, slope) = training_hinge(data.labels[i] * scores[i], margin)?;
                    if slope != S::zero() {
                        grad.scaled_add(slope * data.labels[i] / n_scale, &feats.row(i));
                    }
                }
                c.scaled_add(-step, &grad);
                project_l2_ball(c, S::one())?;
            }

            // dictionary block: joint averaged subgradient at the new coefficients
            let mut grad: Array2<S> = Array2::zeros((d, k_model));
            for (c, data) in coeffs.iter().zip(datasets) {
                let u = dict.dot(c);
                let scores = data.inputs.dot(&u);
                let n_scale = S::real(data.len() as f64);
                let mut pull: Array1<S> = Array1::zeros(d);
                let mut active = false;
                for i in 0..data.len() {
                    let (_, slope) = training_hinge(data.labels[i] * scores[i], margin)?;
                    if slope != S::zero() {
                        pull.scaled_add(slope * data.labels[i] / (n_scale * t_scale), &data.inputs.row(i));
                        active = true;
                    }
                }
                if active {
                    for a in 0..d {
                        for b in 0..k_model {
                            grad[[a, b]] = grad[[a, b]] + pull[a] * c[b];
                        }
                    }
                }
            }
            dict.scaled_add(-step, &grad);
            project_frobenius_ball(&mut dict, S::one())?;

            let objective = joint_objective(&dict, &coeffs, datasets, margin)?;
            if objective < best_obj {
                best_obj = objective;
                best_dict.assign(&dict);
                best_coeffs.clone_from(&coeffs);
            }
            if (iter + 1) % params.tolerance_window == 0 {
                if window_best - best_obj < params.tolerance {
                    break;
                }
                window_best = best_obj;
            }
        }

        if overall.as_ref().map(|(_, _, obj)| best_obj < *obj).unwrap_or(true) {
            overall = Some((best_dict, best_coeffs, best_obj));
        }
    }

    let (dict, coeffs, objective) = overall.expect("at least one restart ran");
    let mut wrong = S::zero();
    for (c, data) in coeffs.iter().zip(datasets) {
        let u = dict.dot(c);
        wrong = wrong + zero_one_risk(data.inputs.view(), data.labels.view(), u.view())?;
    }
    let training_error = wrong / t_scale;
    let task_weights = coeffs
        .into_iter()
        .map(|c| TaskWeights::new(c, S::one()))
        .collect::<Result<Vec<_>>>()?;
    Ok(MtlModel {
        dictionary: Dictionary::within_frobenius_ball(dict, S::one())?,
        task_weights,
        margin,
        training_error,
        training_objective: objective,
    })
}

//! Synthetic half-space environments.
//!
//! An environment is a Haar-random orthonormal dictionary `D` (`d x k_true`)
//! and unit coefficient vectors `c_t`, one per task; task `t` labels an input
//! `x` by `sign(<u_t, x> + eps)` with `u_t = D c_t` and optional Gaussian
//! pre-sign noise. Inputs are uniform on a sphere whose radius is a
//! parameter: the experiment sweeps use `sqrt(d)`, the bound comparisons the
//! unit sphere.

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;

use crate::hypothesis::{sign_pm, Dictionary};
use crate::linalg::orthonormalize_columns;
use crate::{invalid, Result, Scalar};

/// A task distribution family sharing one dictionary.
#[derive(Debug, Clone)]
pub struct Environment<S> {
    dictionary: Dictionary<S>,
    task_coeffs: Vec<Array1<S>>,
    noise_std: S,
    input_radius: S,
}

impl<S: Scalar> Environment<S> {
    pub fn dim(&self) -> usize {
        self.dictionary.input_dim()
    }

    pub fn k_true(&self) -> usize {
        self.dictionary.width()
    }

    pub fn task_count(&self) -> usize {
        self.task_coeffs.len()
    }

    pub fn dictionary(&self) -> &Dictionary<S> {
        &self.dictionary
    }

    pub fn task_coeffs(&self) -> &[Array1<S>] {
        &self.task_coeffs
    }

    pub fn noise_std(&self) -> S {
        self.noise_std
    }

    pub fn input_radius(&self) -> S {
        self.input_radius
    }

    /// Unit task vector `u_t = D c_t`.
    pub fn task_vector(&self, task_index: usize) -> Result<Array1<S>> {
        let coeffs = self
            .task_coeffs
            .get(task_index)
            .ok_or_else(|| invalid("task_index", format!("{} tasks available", self.task_count())))?;
        self.dictionary.task_vector(coeffs.view())
    }

    /// Same dictionary and noise model, freshly drawn task coefficients.
    pub fn with_fresh_tasks<R: Rng + ?Sized>(&self, t_count: usize, rng: &mut R) -> Result<Self> {
        if t_count == 0 {
            return Err(invalid("t_count", "need at least one task"));
        }
        let task_coeffs = (0..t_count)
            .map(|_| sample_sphere(self.k_true(), S::one(), rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dictionary: self.dictionary.clone(),
            task_coeffs,
            noise_std: self.noise_std,
            input_radius: self.input_radius,
        })
    }
}

/// Labelled sample of one task.
#[derive(Debug, Clone)]
pub struct TaskDataset<S> {
    /// `n x d`, each row on the input sphere.
    pub inputs: Array2<S>,
    /// Entries in `{-1, +1}`.
    pub labels: Array1<S>,
}

impl<S: Scalar> TaskDataset<S> {
    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.inputs.ncols()
    }
}

/// First `k` columns of a Haar-random `d x d` orthogonal matrix.
///
/// Gram-Schmidt on a standard Gaussian matrix yields the Q factor of the QR
/// decomposition with positive diagonal R, which is exactly Haar; the first
/// `k` columns only depend on the first `k` Gaussian columns.
pub fn sample_haar_dictionary<S: Scalar, R: Rng + ?Sized>(
    d: usize,
    k: usize,
    rng: &mut R,
) -> Result<Dictionary<S>> {
    if k == 0 || k > d {
        return Err(invalid("k", format!("need 1 <= k <= d, got k={k}, d={d}")));
    }
    let gaussian = Array2::from_shape_fn((d, k), |_| S::standard_normal(rng));
    let q = orthonormalize_columns(gaussian.view())?;
    Dictionary::orthonormal(q)
}

/// Uniform draw from the sphere of the given radius.
pub fn sample_sphere<S: Scalar, R: Rng + ?Sized>(
    dim: usize,
    radius: S,
    rng: &mut R,
) -> Result<Array1<S>> {
    if dim == 0 {
        return Err(invalid("dim", "need dim >= 1"));
    }
    if !(radius > S::zero()) {
        return Err(invalid("radius", format!("must be positive, got {radius}")));
    }
    loop {
        let v = Array1::from_shape_fn(dim, |_| S::standard_normal(rng));
        let norm = v.iter().map(|x| *x * *x).sum::<S>().sqrt();
        // norm underflow has probability ~0; resample keeps the law exact
        if norm > S::real(1e-30) {
            return Ok(v.mapv(|x| x * radius / norm));
        }
    }
}

/// Environment with a Haar dictionary and `t_count` uniform unit coefficients.
pub fn generate_environment<S: Scalar, R: Rng + ?Sized>(
    d: usize,
    k_true: usize,
    t_count: usize,
    noise_std: S,
    input_radius: S,
    rng: &mut R,
) -> Result<Environment<S>> {
    if t_count == 0 {
        return Err(invalid("t_count", "need at least one task"));
    }
    if !(noise_std >= S::zero()) {
        return Err(invalid("noise_std", format!("must be >= 0, got {noise_std}")));
    }
    if !(input_radius > S::zero()) {
        return Err(invalid("input_radius", format!("must be positive, got {input_radius}")));
    }
    let dictionary = sample_haar_dictionary(d, k_true, rng)?;
    let task_coeffs = (0..t_count)
        .map(|_| sample_sphere(k_true, S::one(), rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(Environment {
        dictionary,
        task_coeffs,
        noise_std,
        input_radius,
    })
}

/// Labelled sample for an arbitrary task vector `u`.
pub fn sample_halfspace_dataset<S: Scalar, R: Rng + ?Sized>(
    u: ArrayView1<'_, S>,
    n: usize,
    input_radius: S,
    noise_std: S,
    rng: &mut R,
) -> Result<TaskDataset<S>> {
    if n == 0 {
        return Err(invalid("n", "need at least one sample"));
    }
    let d = u.len();
    let mut inputs = Array2::zeros((n, d));
    let mut labels = Array1::zeros(n);
    for i in 0..n {
        let x = sample_sphere(d, input_radius, rng)?;
        let mut raw = u.dot(&x);
        if noise_std > S::zero() {
            raw = raw + noise_std * S::standard_normal(rng);
        }
        labels[i] = sign_pm(raw);
        inputs.row_mut(i).assign(&x);
    }
    Ok(TaskDataset { inputs, labels })
}

/// Labelled sample of task `task_index` of the environment.
pub fn sample_task_dataset<S: Scalar, R: Rng + ?Sized>(
    env: &Environment<S>,
    task_index: usize,
    n: usize,
    rng: &mut R,
) -> Result<TaskDataset<S>> {
    let u = env.task_vector(task_index)?;
    sample_halfspace_dataset(u.view(), n, env.input_radius, env.noise_std, rng)
}

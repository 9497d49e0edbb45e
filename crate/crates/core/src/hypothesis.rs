//! Hypothesis classes: linear dictionaries, bounded task weights, hinge
//! surrogates, and the norm-ball projections the trainers rely on.
//!
//! A predictor is a pair `(D, w)`: dictionary `D` of shape `d x K` and task
//! weights `w` of length `K`, scoring an input by `<w, D^T x>`. Constraints
//! are norm balls: columns of an environment dictionary are orthonormal,
//! learned dictionaries satisfy a Frobenius bound, task weights an l2 bound.

use ndarray::{Array1, Array2, ArrayView1};

use crate::{invalid, mismatch, Result, Scalar};

const ORTHONORMAL_TOL: f64 = 1e-10;
// slack for iterates that sit on a constraint boundary after projection
const FEASIBILITY_SLACK: f64 = 1e-9;

/// Sign with the convention `sign(0) = +1`.
pub fn sign_pm<S: Scalar>(x: S) -> S {
    if x >= S::zero() {
        S::one()
    } else {
        -S::one()
    }
}

/// A `d x K` linear representation; columns are atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary<S> {
    entries: Array2<S>,
}

impl<S: Scalar> Dictionary<S> {
    /// Wraps entries without constraint checks.
    pub fn new_unchecked(entries: Array2<S>) -> Self {
        Self { entries }
    }

    /// Requires the columns to be orthonormal within `1e-8`.
    pub fn orthonormal(entries: Array2<S>) -> Result<Self> {
        let dict = Self::new_unchecked(entries);
        if !dict.is_orthonormal(S::real(ORTHONORMAL_TOL)) {
            return Err(invalid("entries", "columns are not orthonormal"));
        }
        Ok(dict)
    }

    /// Requires `|D|_F <= radius` up to projection roundoff.
    pub fn within_frobenius_ball(entries: Array2<S>, radius: S) -> Result<Self> {
        if radius < S::zero() {
            return Err(invalid("radius", "norm radius must be >= 0"));
        }
        let dict = Self::new_unchecked(entries);
        if dict.frobenius_norm() > radius + S::real(FEASIBILITY_SLACK) {
            return Err(invalid("entries", "Frobenius norm exceeds the radius"));
        }
        Ok(dict)
    }

    pub fn input_dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn width(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &Array2<S> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<S> {
        self.entries
    }

    pub fn frobenius_norm(&self) -> S {
        self.entries.iter().map(|x| *x * *x).sum::<S>().sqrt()
    }

    pub fn is_orthonormal(&self, tol: S) -> bool {
        let gram = self.entries.t().dot(&self.entries);
        let k = self.width();
        for i in 0..k {
            for j in 0..k {
                let want = if i == j { S::one() } else { S::zero() };
                if (gram[[i, j]] - want).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Feature map `D^T x`.
    pub fn features(&self, x: ArrayView1<'_, S>) -> Result<Array1<S>> {
        if x.len() != self.input_dim() {
            return Err(mismatch(format!(
                "input of length {} against dictionary dimension {}",
                x.len(),
                self.input_dim()
            )));
        }
        Ok(self.entries.t().dot(&x))
    }

    /// Mixture `D c` of the atoms.
    pub fn task_vector(&self, coeffs: ArrayView1<'_, S>) -> Result<Array1<S>> {
        if coeffs.len() != self.width() {
            return Err(mismatch(format!(
                "{} coefficients against dictionary width {}",
                coeffs.len(),
                self.width()
            )));
        }
        Ok(self.entries.dot(&coeffs))
    }
}

/// Per-task weight vector constrained to an l2 ball.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskWeights<S> {
    coeffs: Array1<S>,
    norm_radius: S,
}

impl<S: Scalar> TaskWeights<S> {
    pub fn new(coeffs: Array1<S>, norm_radius: S) -> Result<Self> {
        if norm_radius < S::zero() {
            return Err(invalid("norm_radius", "must be >= 0"));
        }
        let norm = coeffs.iter().map(|x| *x * *x).sum::<S>().sqrt();
        if norm > norm_radius + S::real(FEASIBILITY_SLACK) {
            return Err(invalid("coeffs", "norm exceeds the radius"));
        }
        Ok(Self { coeffs, norm_radius })
    }

    pub fn coeffs(&self) -> &Array1<S> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Array1<S> {
        self.coeffs
    }

    pub fn norm_radius(&self) -> S {
        self.norm_radius
    }

    pub fn norm(&self) -> S {
        self.coeffs.iter().map(|x| *x * *x).sum::<S>().sqrt()
    }
}

/// Surrogate loss for evaluation: 1 for `t <= 0`, `1 - t` on `(0, 1]`, 0 past 1.
/// Dominates the 0-1 loss of the sign predictor.
pub fn truncated_hinge<S: Scalar>(t: S) -> S {
    if t <= S::zero() {
        S::one()
    } else if t <= S::one() {
        S::one() - t
    } else {
        S::zero()
    }
}

/// Training surrogate `max(0, 1 - z/c)` with margin `c > 0`.
///
/// Returns the value and a subgradient in `z`; the kink at `z = c` reports
/// subgradient 0.
pub fn training_hinge<S: Scalar>(z: S, margin: S) -> Result<(S, S)> {
    if !(margin > S::zero()) {
        return Err(invalid("margin", format!("must be positive, got {margin}")));
    }
    if z < margin {
        Ok((S::one() - z / margin, -S::one() / margin))
    } else {
        Ok((S::zero(), S::zero()))
    }
}

/// Score `<w, D^T x>` of a predictor on one input.
pub fn predict_score<S: Scalar>(
    dict: &Dictionary<S>,
    weights: &TaskWeights<S>,
    x: ArrayView1<'_, S>,
) -> Result<S> {
    if weights.coeffs().len() != dict.width() {
        return Err(mismatch(format!(
            "{} weights against dictionary width {}",
            weights.coeffs().len(),
            dict.width()
        )));
    }
    Ok(dict.features(x)?.dot(weights.coeffs()))
}

/// Euclidean projection onto the l2 ball of the given radius.
pub fn project_l2_ball<S: Scalar>(v: &mut Array1<S>, radius: S) -> Result<()> {
    if !(radius >= S::zero()) {
        return Err(invalid("radius", "must be >= 0"));
    }
    let norm = v.iter().map(|x| *x * *x).sum::<S>().sqrt();
    if norm > radius {
        if radius == S::zero() {
            v.fill(S::zero());
        } else {
            let scale = radius / norm;
            v.mapv_inplace(|x| x * scale);
        }
    }
    Ok(())
}

/// Euclidean projection onto the Frobenius ball of the given radius.
pub fn project_frobenius_ball<S: Scalar>(m: &mut Array2<S>, radius: S) -> Result<()> {
    if !(radius >= S::zero()) {
        return Err(invalid("radius", "must be >= 0"));
    }
    let norm = m.iter().map(|x| *x * *x).sum::<S>().sqrt();
    if norm > radius {
        if radius == S::zero() {
            m.fill(S::zero());
        } else {
            let scale = radius / norm;
            m.mapv_inplace(|x| x * scale);
        }
    }
    Ok(())
}

//! Empirical covariance norms and Gaussian-average estimates for the linear
//! subspace class.
//!
//! The class of interest maps `x` to `(<d_1,x>, ..., <d_K,x>)` subject to
//! `sum_k |d_k|^2 <= K`. Its Gaussian average over a pooled sample
//! `x_1, ..., x_m`,
//!
//! ```text
//! G = E_gamma sup_D sum_{k,i} gamma_{k,i} <d_k, x_i>,
//! ```
//!
//! has an exact inner supremum per Gaussian draw: with `v_k = sum_i
//! gamma_{k,i} x_i`, Cauchy-Schwarz over the joint atom constraint gives
//! `sup = sqrt(K sum_k |v_k|^2)`, attained at `d_k` proportional to `v_k`.
//! Monte-Carlo averaging is therefore free of inner optimization error.

use ndarray::{Array2, ArrayView2};
use rand::Rng;

use crate::linalg::sym_eigenvalues;
use crate::{invalid, mismatch, Result, Scalar};

/// Trace norm, spectral norm, and their ratio for an empirical covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceSummary<S> {
    pub trace_norm: S,
    pub spectral_norm: S,
    /// `trace_norm / spectral_norm`; 0 for all-zero data.
    pub effective_dimension: S,
}

/// Norms of `C_hat = (1/m) sum_i x_i x_i^T` for the `m x d` row sample.
///
/// The top eigenvalue comes from the `d x d` form when `d <= m` and from the
/// `m x m` dual Gram otherwise; the nonzero spectra coincide.
pub fn empirical_covariance_norms<S: Scalar>(data: ArrayView2<'_, S>) -> Result<CovarianceSummary<S>> {
    let (m, d) = data.dim();
    if m == 0 || d == 0 {
        return Err(invalid("data", "need at least one vector of dimension >= 1"));
    }
    let m_scale = S::real(m as f64);
    let trace_norm = data.iter().map(|x| *x * *x).sum::<S>() / m_scale;
    if trace_norm == S::zero() {
        return Ok(CovarianceSummary {
            trace_norm: S::zero(),
            spectral_norm: S::zero(),
            effective_dimension: S::zero(),
        });
    }
    let gram = if d <= m {
        data.t().dot(&data)
    } else {
        data.dot(&data.t())
    };
    let top = sym_eigenvalues(gram.view())?[0] / m_scale;
    let spectral_norm = top.max(S::zero());
    Ok(CovarianceSummary {
        trace_norm,
        spectral_norm,
        effective_dimension: trace_norm / spectral_norm,
    })
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct GaussianAverageEstimate<S> {
    pub mean: S,
    pub std_error: S,
    pub draws: usize,
}

/// Exact supremum of `sum_{k,i} gamma_{k,i} <d_k, x_i>` over the joint atom
/// constraint, for one `k x m` Gaussian draw against `m x d` data.
pub fn per_draw_supremum<S: Scalar>(
    gamma: ArrayView2<'_, S>,
    data: ArrayView2<'_, S>,
) -> Result<S> {
    let (k, m) = gamma.dim();
    if k == 0 {
        return Err(invalid("gamma", "need at least one feature row"));
    }
    if m != data.nrows() {
        return Err(mismatch(format!(
            "{} gamma columns against {} data rows",
            m,
            data.nrows()
        )));
    }
    let v = gamma.dot(&data);
    let sum_sq = v.iter().map(|x| *x * *x).sum::<S>();
    Ok((S::real(k as f64) * sum_sq).sqrt())
}

/// Monte-Carlo Gaussian average of the rank-`k` linear class on pooled data
/// (`m x d`, rows are all per-task inputs stacked).
pub fn gaussian_average_linear<S: Scalar, R: Rng + ?Sized>(
    data: ArrayView2<'_, S>,
    k: usize,
    mc_samples: usize,
    rng: &mut R,
) -> Result<GaussianAverageEstimate<S>> {
    let (m, d) = data.dim();
    if m == 0 || d == 0 {
        return Err(invalid("data", "need at least one vector of dimension >= 1"));
    }
    if k == 0 {
        return Err(invalid("k", "need k >= 1"));
    }
    if mc_samples == 0 {
        return Err(invalid("mc_samples", "need at least one draw"));
    }
    let mut sum = S::zero();
    let mut sum_sq = S::zero();
    for _ in 0..mc_samples {
        let gamma = Array2::from_shape_fn((k, m), |_| S::standard_normal(rng));
        let sup = per_draw_supremum(gamma.view(), data)?;
        sum = sum + sup;
        sum_sq = sum_sq + sup * sup;
    }
    let count = S::real(mc_samples as f64);
    let mean = sum / count;
    let std_error = if mc_samples > 1 {
        let var = (sum_sq - sum * sum / count) / (count - S::one());
        (var.max(S::zero()) / count).sqrt()
    } else {
        S::zero()
    };
    Ok(GaussianAverageEstimate {
        mean,
        std_error,
        draws: mc_samples,
    })
}

/// Exact value of `sup_D |(<d_k, x_i>)_{k,i}|` over the joint atom
/// constraint: `sqrt(k m lambda_max(C_hat))`, attained by concentrating all
/// atom mass on the top eigenvector.
pub fn sup_representation_norm<S: Scalar>(data: ArrayView2<'_, S>, k: usize) -> Result<S> {
    if k == 0 {
        return Err(invalid("k", "need k >= 1"));
    }
    let summary = empirical_covariance_norms(data)?;
    let m = S::real(data.nrows() as f64);
    Ok((S::real(k as f64) * m * summary.spectral_norm).sqrt())
}

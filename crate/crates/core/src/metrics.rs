//! Evaluation measures: half-space disagreement rates and dictionary
//! similarity.
//!
//! Test error compares sign predictions of the learned and true task vectors
//! on a held-out sample; for unit vectors under the uniform sphere marginal
//! the population value is the angle over pi, which `analytic_err` returns in
//! closed form. Dictionary similarity scores the learned span against the
//! true one: the learned dictionary is replaced by its orthonormal polar
//! factor (Frobenius-constrained training keeps raw norms below 1, which
//! would cap the raw score), then `s = |D_true^T W|_tr / K`, which is 1
//! exactly when the spans coincide and is invariant to permutations and sign
//! flips of the atoms.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::Serialize;

use crate::hypothesis::{sign_pm, Dictionary};
use crate::linalg::{complete_basis, nuclear_norm, sym_eigen};
use crate::{invalid, mismatch, Result, Scalar};

const UNIT_TOL: f64 = 1e-8;

/// Which learner produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Itl,
    Mtl,
    Ltl,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self {
            Method::Itl => "itl",
            Method::Mtl => "mtl",
            Method::Ltl => "ltl",
        };
        f.write_str(tag)
    }
}

/// Where an evaluation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReportMetadata {
    pub n: usize,
    pub t_count: usize,
    pub k: usize,
    pub trial: usize,
    pub method: Method,
}

/// Per-task evaluation of one trained model.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport<S> {
    pub per_task_errors: Vec<S>,
    pub mean_error: S,
    pub similarity: Option<S>,
    pub similarity_rank_deficient: bool,
    pub metadata: ReportMetadata,
}

impl<S: Scalar> EvaluationReport<S> {
    pub fn new(
        per_task_errors: Vec<S>,
        similarity: Option<DictionarySimilarity<S>>,
        metadata: ReportMetadata,
    ) -> Result<Self> {
        if per_task_errors.is_empty() {
            return Err(invalid("per_task_errors", "need at least one task"));
        }
        for &e in &per_task_errors {
            if !(S::zero()..=S::one()).contains(&e) {
                return Err(invalid("per_task_errors", format!("rate {e} outside [0, 1]")));
            }
        }
        let mean_error =
            per_task_errors.iter().copied().sum::<S>() / S::real(per_task_errors.len() as f64);
        Ok(Self {
            per_task_errors,
            mean_error,
            similarity: similarity.map(|s| s.value),
            similarity_rank_deficient: similarity.map(|s| s.rank_deficient).unwrap_or(false),
            metadata,
        })
    }
}

/// Fraction of test points where the sign predictions of `true_u` and
/// `learned_u` disagree, with `sign(0) = +1`. A zero learned vector scores
/// every point `+1`.
pub fn test_error<S: Scalar>(
    true_u: ArrayView1<'_, S>,
    learned_u: ArrayView1<'_, S>,
    test_inputs: ArrayView2<'_, S>,
) -> Result<S> {
    if test_inputs.nrows() == 0 {
        return Err(invalid("test_inputs", "need at least one test point"));
    }
    let d = test_inputs.ncols();
    if true_u.len() != d || learned_u.len() != d {
        return Err(mismatch(format!(
            "task vectors of length {}/{} against inputs of dimension {}",
            true_u.len(),
            learned_u.len(),
            d
        )));
    }
    let mut disagreements = 0usize;
    for row in test_inputs.rows() {
        if sign_pm(true_u.dot(&row)) != sign_pm(learned_u.dot(&row)) {
            disagreements += 1;
        }
    }
    Ok(S::real(disagreements as f64 / test_inputs.nrows() as f64))
}

/// Exact disagreement probability of two unit half-spaces under the uniform
/// sphere marginal: `arccos(<u, v>) / pi`.
pub fn analytic_err<S: Scalar>(u: ArrayView1<'_, S>, v: ArrayView1<'_, S>) -> Result<S> {
    if u.len() != v.len() {
        return Err(mismatch(format!(
            "vectors of length {} and {}",
            u.len(),
            v.len()
        )));
    }
    let tol = S::real(UNIT_TOL);
    let nu = u.dot(&u).sqrt();
    if (nu - S::one()).abs() > tol {
        return Err(invalid("u", format!("must be unit norm, got {nu}")));
    }
    let nv = v.dot(&v).sqrt();
    if (nv - S::one()).abs() > tol {
        return Err(invalid("v", format!("must be unit norm, got {nv}")));
    }
    let cosine = u.dot(&v).max(-S::one()).min(S::one());
    Ok(cosine.acos() / S::real(std::f64::consts::PI))
}

/// Similarity score plus a flag marking learned dictionaries whose columns
/// did not span a full-rank subspace (the span is orthonormalized and padded
/// with arbitrary orthogonal directions before scoring).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DictionarySimilarity<S> {
    pub value: S,
    pub rank_deficient: bool,
}

/// `s = |D_true^T W|_tr / K` for `W` the orthonormal polar factor of the
/// learned dictionary.
pub fn dictionary_similarity<S: Scalar>(
    learned: &Dictionary<S>,
    truth: &Dictionary<S>,
) -> Result<DictionarySimilarity<S>> {
    let (d, k) = (truth.input_dim(), truth.width());
    if learned.input_dim() != d || learned.width() != k {
        return Err(mismatch(format!(
            "learned {}x{} against true {}x{}",
            learned.input_dim(),
            learned.width(),
            d,
            k
        )));
    }
    if !truth.is_orthonormal(S::real(UNIT_TOL)) {
        return Err(invalid("truth", "true dictionary must be orthonormal"));
    }
    let (w, rank_deficient) = orthonormal_polar_factor(learned.entries().view())?;
    let product = truth.entries().t().dot(&w);
    let raw = nuclear_norm(product.view())? / S::real(k as f64);
    Ok(DictionarySimilarity {
        value: raw.min(S::one()).max(S::zero()),
        rank_deficient,
    })
}

// Polar factor via the eigendecomposition of the k x k Gram matrix; columns
// below the rank threshold are dropped and the basis completed canonically.
fn orthonormal_polar_factor<S: Scalar>(entries: ArrayView2<'_, S>) -> Result<(Array2<S>, bool)> {
    let (d, k) = entries.dim();
    let gram = entries.t().dot(&entries);
    let (values, vectors) = sym_eigen(gram.view())?;
    let sigma: Vec<S> = values.iter().map(|&l| l.max(S::zero()).sqrt()).collect();
    let threshold = S::real(1e-7) * sigma[0].max(S::one());
    let rank = sigma.iter().take_while(|&&s| s > threshold).count();
    let mut basis = Array2::zeros((d, rank));
    for j in 0..rank {
        let dir = entries.dot(&vectors.column(j));
        let scale = S::one() / sigma[j];
        for i in 0..d {
            basis[[i, j]] = dir[i] * scale;
        }
    }
    if rank == k {
        // full rank: rotate back so W = U V^T is the closest orthonormal matrix
        let w = basis.dot(&vectors.t());
        Ok((w, false))
    } else {
        Ok((complete_basis(basis.view(), k)?, true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding;
    use crate::synthgen::{sample_haar_dictionary, sample_sphere};
    use ndarray::{arr1, Array2};

    fn rng(parts: &[u64]) -> rand_chacha::ChaCha8Rng {
        seeding::stream(13, parts)
    }

    fn sphere_points(count: usize, d: usize, seed: u64) -> Array2<f64> {
        let mut r = rng(&[seed]);
        let mut m = Array2::zeros((count, d));
        for i in 0..count {
            m.row_mut(i).assign(&sample_sphere(d, 1.0, &mut r).unwrap());
        }
        m
    }

    #[test]
    fn identical_vectors_have_zero_error() {
        let u = arr1(&[0.6, 0.8, 0.0]);
        let points = sphere_points(100, 3, 1);
        assert_eq!(test_error(u.view(), u.view(), points.view()).unwrap(), 0.0);
    }

    #[test]
    fn negated_vector_disagrees_everywhere() {
        let u = arr1(&[0.6, 0.8, 0.0]);
        let v = u.mapv(|x| -x);
        let points = sphere_points(100, 3, 2);
        assert_eq!(test_error(u.view(), v.view(), points.view()).unwrap(), 1.0);
    }

    #[test]
    fn orthogonal_vectors_disagree_half_the_time() {
        let u = arr1(&[1.0, 0.0, 0.0, 0.0]);
        let v = arr1(&[0.0, 1.0, 0.0, 0.0]);
        let points = sphere_points(10_000, 4, 3);
        let rate = test_error(u.view(), v.view(), points.view()).unwrap();
        assert!((rate - 0.5).abs() < 0.02, "rate {rate}");
    }

    #[test]
    fn zero_learned_vector_predicts_all_positive() {
        let u = arr1(&[1.0, 0.0]);
        let zero = arr1(&[0.0, 0.0]);
        let points = sphere_points(2000, 2, 4);
        let rate = test_error(u.view(), zero.view(), points.view()).unwrap();
        let negative_fraction = points
            .rows()
            .into_iter()
            .filter(|x| u.dot(x) < 0.0)
            .count() as f64
            / 2000.0;
        assert!((rate - negative_fraction).abs() < 1e-12);
    }

    #[test]
    fn analytic_error_endpoints() {
        let u = arr1(&[0.0f64, 1.0]);
        assert_eq!(analytic_err(u.view(), u.view()).unwrap(), 0.0);
        let neg = u.mapv(|x| -x);
        assert!((analytic_err(u.view(), neg.view()).unwrap() - 1.0).abs() < 1e-15);
        let v = arr1(&[1.0, 0.0]);
        assert!((analytic_err(u.view(), v.view()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn analytic_error_rejects_non_unit_inputs() {
        let u = arr1(&[1.0, 0.0]);
        let long = arr1(&[2.0, 0.0]);
        assert!(analytic_err(u.view(), long.view()).is_err());
        assert!(analytic_err(long.view(), u.view()).is_err());
    }

    #[test]
    fn analytic_error_is_symmetric_and_monotone_in_angle() {
        for i in 0..50 {
            let theta = std::f64::consts::PI * i as f64 / 49.0;
            let u = arr1(&[1.0, 0.0]);
            let v = arr1(&[theta.cos(), theta.sin()]);
            let ab = analytic_err(u.view(), v.view()).unwrap();
            let ba = analytic_err(v.view(), u.view()).unwrap();
            assert!((ab - ba).abs() < 1e-14);
            assert!((ab - theta / std::f64::consts::PI).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_error_matches_monte_carlo() {
        let theta = 40f64.to_radians();
        let u = arr1(&[1.0, 0.0, 0.0]);
        let v = arr1(&[theta.cos(), theta.sin(), 0.0]);
        let p = analytic_err(u.view(), v.view()).unwrap();
        let count = 10_000;
        let points = sphere_points(count, 3, 5);
        let hat = test_error(u.view(), v.view(), points.view()).unwrap();
        let sigma = (p * (1.0 - p) / count as f64).sqrt();
        assert!((hat - p).abs() <= 3.0 * sigma, "{hat} vs {p}");
    }

    #[test]
    fn similarity_of_dictionary_with_itself_is_one() {
        let dict: Dictionary<f64> = sample_haar_dictionary(10, 3, &mut rng(&[6])).unwrap();
        let s = dictionary_similarity(&dict, &dict).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!(!s.rank_deficient);
    }

    #[test]
    fn similarity_ignores_permutations_and_sign_flips() {
        let dict: Dictionary<f64> = sample_haar_dictionary(8, 3, &mut rng(&[7])).unwrap();
        let e = dict.entries();
        let mut permuted = Array2::zeros((8, 3));
        permuted.column_mut(0).assign(&e.column(2).mapv(|x| -x));
        permuted.column_mut(1).assign(&e.column(0));
        permuted.column_mut(2).assign(&e.column(1).mapv(|x| -x));
        let s = dictionary_similarity(&Dictionary::new_unchecked(permuted), &dict).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn similarity_is_invariant_under_right_orthogonal_maps() {
        let dict: Dictionary<f64> = sample_haar_dictionary(12, 3, &mut rng(&[8])).unwrap();
        let learned: Dictionary<f64> = sample_haar_dictionary(12, 3, &mut rng(&[9])).unwrap();
        let base = dictionary_similarity(&learned, &dict).unwrap().value;
        for seed in 0..5 {
            let q: Dictionary<f64> = sample_haar_dictionary(3, 3, &mut rng(&[10, seed])).unwrap();
            let rotated = Dictionary::new_unchecked(learned.entries().dot(q.entries()));
            let s = dictionary_similarity(&rotated, &dict).unwrap().value;
            assert!((s - base).abs() < 1e-9, "seed {seed}: {s} vs {base}");
        }
    }

    #[test]
    fn polar_factor_undoes_frobenius_shrinkage() {
        let dict: Dictionary<f64> = sample_haar_dictionary(9, 2, &mut rng(&[11])).unwrap();
        let shrunk = Dictionary::new_unchecked(dict.entries().mapv(|x| 0.3 * x));
        let s = dictionary_similarity(&shrunk, &dict).unwrap();
        assert!((s.value - 1.0).abs() < 1e-10);
        assert!(!s.rank_deficient);
    }

    #[test]
    fn unrelated_subspaces_score_low_on_average() {
        let mut sum = 0.0;
        for seed in 0..200 {
            let a: Dictionary<f64> = sample_haar_dictionary(50, 2, &mut rng(&[12, seed])).unwrap();
            let b: Dictionary<f64> = sample_haar_dictionary(50, 2, &mut rng(&[13, seed])).unwrap();
            sum += dictionary_similarity(&a, &b).unwrap().value;
        }
        let mean = sum / 200.0;
        assert!(mean < 0.3, "mean similarity {mean}");
    }

    #[test]
    fn rank_deficient_dictionaries_are_flagged_and_scored() {
        let dict: Dictionary<f64> = sample_haar_dictionary(6, 2, &mut rng(&[14])).unwrap();
        let mut broken = dict.entries().clone();
        broken.column_mut(1).fill(0.0);
        let s = dictionary_similarity(&Dictionary::new_unchecked(broken), &dict).unwrap();
        assert!(s.rank_deficient);
        assert!((0.0..=1.0).contains(&s.value));
        // the surviving atom still contributes half of a perfect score
        assert!(s.value >= 0.5 - 1e-9);
    }

    #[test]
    fn similarity_stays_in_unit_interval() {
        for seed in 0..20 {
            let truth: Dictionary<f64> = sample_haar_dictionary(7, 3, &mut rng(&[15, seed])).unwrap();
            let mut r = rng(&[16, seed]);
            let learned =
                Dictionary::new_unchecked(Array2::from_shape_fn((7, 3), |_| f64::standard_normal(&mut r)));
            let s = dictionary_similarity(&learned, &truth).unwrap();
            assert!((0.0..=1.0).contains(&s.value));
        }
    }

    #[test]
    fn report_validates_rates_and_averages() {
        let meta = ReportMetadata {
            n: 10,
            t_count: 2,
            k: 2,
            trial: 0,
            method: Method::Mtl,
        };
        let report = EvaluationReport::new(vec![0.1f64, 0.3], None, meta).unwrap();
        assert!((report.mean_error - 0.2).abs() < 1e-15);
        assert!(EvaluationReport::<f64>::new(vec![1.2], None, meta).is_err());
        assert!(EvaluationReport::<f64>::new(vec![], None, meta).is_err());
    }

    #[test]
    fn method_tags_render_lowercase() {
        assert_eq!(Method::Itl.to_string(), "itl");
        assert_eq!(Method::Mtl.to_string(), "mtl");
        assert_eq!(Method::Ltl.to_string(), "ltl");
    }
}

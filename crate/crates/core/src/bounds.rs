//! Closed-form excess-risk bounds for subspace multitask learning and the
//! transfer-advantage phase diagram they induce.
//!
//! Conventions shared by every bound here: `K` is the subspace dimension, `n`
//! the per-task sample count, `T` the number of tasks, `delta` the confidence
//! parameter, `B` the task-weight norm radius, `l_phi` the Lipschitz constant
//! of the feature nonlinearity (1 for the linear representations used
//! elsewhere in the crate), and `cov_trace` / `cov_spectral` the trace and
//! spectral norms of the input covariance. Counts are accepted as reals so
//! log-spaced grids can be evaluated off the integers.
//!
//! Upper bounds on a [0,1] loss are flagged vacuous once they reach 1; the
//! lower bound is floored at 0 and flagged vacuous when the floor engages.

use std::io::Write as IoWrite;

use serde::Serialize;

use crate::{invalid, mismatch, Result, Scalar};

/// Shared parameter block for the risk bounds.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs<S> {
    pub k: S,
    pub n: S,
    pub t: S,
    pub delta: S,
    pub b: S,
    pub l_phi: S,
    pub c1: S,
    pub c2: S,
    pub cov_trace: S,
    pub cov_spectral: S,
}

impl<S: Scalar> BoundInputs<S> {
    /// Inputs with unit constants: `B = l_phi = c1 = c2 = 1`.
    pub fn with_unit_constants(k: S, n: S, t: S, delta: S, cov_trace: S, cov_spectral: S) -> Self {
        Self {
            k,
            n,
            t,
            delta,
            b: S::one(),
            l_phi: S::one(),
            c1: S::one(),
            c2: S::one(),
            cov_trace,
            cov_spectral,
        }
    }

    fn validate(&self) -> Result<()> {
        check_count("k", self.k)?;
        check_count("n", self.n)?;
        check_count("t", self.t)?;
        check_delta(self.delta)?;
        check_positive("b", self.b)?;
        check_positive("l_phi", self.l_phi)?;
        check_nonnegative("c1", self.c1)?;
        check_nonnegative("c2", self.c2)?;
        check_positive("cov_trace", self.cov_trace)?;
        check_nonnegative("cov_spectral", self.cov_spectral)?;
        if self.cov_spectral > self.cov_trace {
            return Err(invalid(
                "cov_spectral",
                "spectral norm cannot exceed the trace norm",
            ));
        }
        Ok(())
    }
}

/// A bound value together with a flag marking it uninformative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue<S> {
    pub value: S,
    pub vacuous: bool,
}

fn upper<S: Scalar>(value: S) -> BoundValue<S> {
    BoundValue {
        value,
        vacuous: value >= S::one(),
    }
}

fn check_count<S: Scalar>(name: &'static str, v: S) -> Result<()> {
    if !v.is_finite() || v < S::one() {
        return Err(invalid(name, format!("must be a finite count >= 1, got {v}")));
    }
    Ok(())
}

fn check_delta<S: Scalar>(v: S) -> Result<()> {
    if !v.is_finite() || v <= S::zero() || v >= S::one() {
        return Err(invalid("delta", format!("must lie in (0, 1), got {v}")));
    }
    Ok(())
}

fn check_positive<S: Scalar>(name: &'static str, v: S) -> Result<()> {
    if !v.is_finite() || v <= S::zero() {
        return Err(invalid(name, format!("must be finite and positive, got {v}")));
    }
    Ok(())
}

fn check_nonnegative<S: Scalar>(name: &'static str, v: S) -> Result<()> {
    if !v.is_finite() || v < S::zero() {
        return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
    }
    Ok(())
}

fn sqrt_2pi<S: Scalar>() -> S {
    S::real((2.0 * std::f64::consts::PI).sqrt())
}

/// Excess-risk bound for joint training of a rank-`K` subspace representation
/// across `T` tasks:
///
/// ```text
/// c1 L B K sqrt(tr/(nT)) + c2 L B sqrt(K s / n) + sqrt(8 ln(2/delta) / (nT))
/// ```
///
/// with `tr = cov_trace` and `s = cov_spectral`.
pub fn mtl_bound<S: Scalar>(inp: &BoundInputs<S>) -> Result<BoundValue<S>> {
    inp.validate()?;
    let nt = inp.n * inp.t;
    let term1 = inp.c1 * inp.l_phi * inp.b * inp.k * (inp.cov_trace / nt).sqrt();
    let term2 = inp.c2 * inp.l_phi * inp.b * (inp.k * inp.cov_spectral / inp.n).sqrt();
    let term3 = (S::real(8.0) * (S::real(2.0) / inp.delta).ln() / nt).sqrt();
    Ok(upper(term1 + term2 + term3))
}

/// Comparator bound for trace-norm-regularized multitask learning:
///
/// ```text
/// 2 B sqrt(K tr ln(Tn)/(nT)) + B sqrt(8 K s / n) + sqrt(8 ln(2/delta)/(nT))
/// ```
///
/// With `c1 = c2 = 1` the subspace bound is strictly smaller whenever
/// `K < ln(Tn)`.
pub fn mtl_tracenorm_bound<S: Scalar>(inp: &BoundInputs<S>) -> Result<BoundValue<S>> {
    inp.validate()?;
    let nt = inp.n * inp.t;
    let term1 = S::real(2.0) * inp.b * (inp.k * inp.cov_trace * nt.ln() / nt).sqrt();
    let term2 = inp.b * (S::real(8.0) * inp.k * inp.cov_spectral / inp.n).sqrt();
    let term3 = (S::real(8.0) * (S::real(2.0) / inp.delta).ln() / nt).sqrt();
    Ok(upper(term1 + term2 + term3))
}

/// Which tail the transfer bound charges for the unseen-task risk.
#[derive(Debug, Clone, Copy)]
pub enum LtlVariant<'a, S> {
    /// Everything in expectation over the input distribution.
    Distribution,
    /// Per-task empirical sup norms of the representation, one per training
    /// task: `sup_norm_t = sqrt(K n |C_hat(X_t)|_inf)`.
    Empirical { per_task_sup_norms: &'a [S] },
}

/// Risk bound for a fresh task solved in a representation learned from `T`
/// training tasks.
///
/// Distribution variant:
///
/// ```text
/// sqrt(2 pi) L B (K sqrt(tr)/sqrt(T) + sqrt(K s / n)) + sqrt(8 ln(4/delta)/T)
/// ```
///
/// Empirical variant:
///
/// ```text
/// sqrt(2 pi) L B K sqrt(tr)/sqrt(T)
///   + sqrt(2 pi) B (mean_t sup_norm_t) / n + 5 sqrt(ln(8/delta)/T)
/// ```
pub fn ltl_bound<S: Scalar>(inp: &BoundInputs<S>, variant: LtlVariant<'_, S>) -> Result<BoundValue<S>> {
    inp.validate()?;
    let lead = sqrt_2pi::<S>() * inp.l_phi * inp.b * inp.k * inp.cov_trace.sqrt() / inp.t.sqrt();
    let value = match variant {
        LtlVariant::Distribution => {
            let spectral = sqrt_2pi::<S>() * inp.l_phi * inp.b * (inp.k * inp.cov_spectral / inp.n).sqrt();
            let tail = (S::real(8.0) * (S::real(4.0) / inp.delta).ln() / inp.t).sqrt();
            lead + spectral + tail
        }
        LtlVariant::Empirical { per_task_sup_norms } => {
            if per_task_sup_norms.is_empty() {
                return Err(invalid("per_task_sup_norms", "empirical variant needs one sup norm per task"));
            }
            let len = S::real(per_task_sup_norms.len() as f64);
            if (len - inp.t).abs() > S::real(1e-9) {
                return Err(mismatch(format!(
                    "{} sup norms for T = {}",
                    per_task_sup_norms.len(),
                    inp.t
                )));
            }
            for &v in per_task_sup_norms {
                check_nonnegative("per_task_sup_norms", v)?;
            }
            let mean = per_task_sup_norms.iter().copied().sum::<S>() / len;
            let spectral = sqrt_2pi::<S>() * inp.b * mean / inp.n;
            let tail = S::real(5.0) * ((S::real(8.0) / inp.delta).ln() / inp.t).sqrt();
            lead + spectral + tail
        }
    };
    Ok(upper(value))
}

/// Transfer upper bound for half-space environments on the unit sphere in
/// dimension `d`, with the margin scale already optimized out:
///
/// ```text
/// sqrt(sqrt(2 pi) (K sqrt(d/T) + sqrt(K/n))) + sqrt(8 ln(4/delta)/T)
/// ```
pub fn halfspace_ltl_upper<S: Scalar>(k: S, d: S, n: S, t: S, delta: S) -> Result<BoundValue<S>> {
    check_count("k", k)?;
    check_count("d", d)?;
    check_count("n", n)?;
    check_count("t", t)?;
    check_delta(delta)?;
    if k > d {
        return Err(invalid("k", "subspace dimension cannot exceed the ambient dimension"));
    }
    let complexity = k * (d / t).sqrt() + (k / n).sqrt();
    let value = (sqrt_2pi::<S>() * complexity).sqrt()
        + (S::real(8.0) * (S::real(4.0) / delta).ln() / t).sqrt();
    Ok(upper(value))
}

/// Margin scale at which the generic transfer bound, instantiated with
/// `B = sqrt(d)/(2 eps)` and unit-sphere covariance, collapses to
/// [`halfspace_ltl_upper`].
pub fn halfspace_optimal_epsilon<S: Scalar>(k: S, d: S, n: S, t: S) -> S {
    let complexity = k * (d / t).sqrt() + (k / n).sqrt();
    (sqrt_2pi::<S>() * complexity).sqrt() / S::real(2.0)
}

/// High-probability lower bound on the angular error of any algorithm that is
/// equivariant under orthogonal maps, after `n` half-space examples on the
/// unit sphere in dimension `d`:
///
/// ```text
/// (1/pi) (sqrt((d - n)/d) - sqrt(ln(1/delta)/d))
/// ```
///
/// floored at 0; the flag marks the floor (in particular whenever `n >= d`).
pub fn equivariant_lower<S: Scalar>(d: S, n: S, delta: S) -> Result<BoundValue<S>> {
    check_count("d", d)?;
    check_count("n", n)?;
    check_delta(delta)?;
    let gap = if n >= d { S::zero() } else { ((d - n) / d).sqrt() };
    let raw = (gap - ((S::one() / delta).ln() / d).sqrt()) / S::real(std::f64::consts::PI);
    let floored = n >= d || raw <= S::zero();
    Ok(BoundValue {
        value: if floored { S::zero() } else { raw },
        vacuous: floored,
    })
}

/// Parameters of a transfer-advantage phase diagram over `(n, T)` with
/// unit-sphere covariance (`tr = 1`, `s = 1/d`).
#[derive(Debug, Clone)]
pub struct PhaseDiagramParams<S> {
    pub d: S,
    pub k: S,
    pub delta: S,
    pub n_grid: Vec<S>,
    pub t_grid: Vec<S>,
    /// Charge `delta/2` to each side instead of `delta` to both.
    pub delta_split: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseCell<S> {
    pub n: S,
    pub t: S,
    pub lower: S,
    pub upper: S,
    pub advantage: S,
    pub vacuous: bool,
}

/// Grid evaluation of `equivariant_lower - halfspace_ltl_upper`.
#[derive(Debug, Clone)]
pub struct PhaseDiagram<S> {
    pub params: PhaseDiagramParams<S>,
    /// Row-major: outer loop over `n_grid`, inner over `t_grid`.
    pub cells: Vec<PhaseCell<S>>,
}

pub fn phase_diagram<S: Scalar>(params: PhaseDiagramParams<S>) -> Result<PhaseDiagram<S>> {
    check_count("d", params.d)?;
    check_count("k", params.k)?;
    check_delta(params.delta)?;
    if params.k > params.d {
        return Err(invalid("k", "subspace dimension cannot exceed the ambient dimension"));
    }
    if params.n_grid.is_empty() || params.t_grid.is_empty() {
        return Err(invalid("n_grid", "phase diagram grids must be non-empty"));
    }
    let delta_each = if params.delta_split {
        params.delta / S::real(2.0)
    } else {
        params.delta
    };
    let mut cells = Vec::with_capacity(params.n_grid.len() * params.t_grid.len());
    for &n in &params.n_grid {
        for &t in &params.t_grid {
            let lower = equivariant_lower(params.d, n, delta_each)?;
            let upper = halfspace_ltl_upper(params.k, params.d, n, t, delta_each)?;
            cells.push(PhaseCell {
                n,
                t,
                lower: lower.value,
                upper: upper.value,
                advantage: lower.value - upper.value,
                vacuous: lower.vacuous || upper.vacuous,
            });
        }
    }
    Ok(PhaseDiagram { params, cells })
}

impl<S: Scalar> PhaseDiagram<S> {
    /// Number of cells with strictly positive advantage.
    pub fn positive_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.advantage > S::zero()).count()
    }

    /// For each `n` in grid order, the smallest `T` in the grid where the
    /// advantage turns positive.
    pub fn boundary(&self) -> Vec<(S, Option<S>)> {
        let t_len = self.params.t_grid.len();
        self.params
            .n_grid
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let first = self.cells[i * t_len..(i + 1) * t_len]
                    .iter()
                    .find(|c| c.advantage > S::zero())
                    .map(|c| c.t);
                (n, first)
            })
            .collect()
    }

    /// Writes `n,T,lower,upper,advantage,vacuous_flag` rows in cell order.
    pub fn write_csv<W: IoWrite>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,T,lower,upper,advantage,vacuous_flag")?;
        for c in &self.cells {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                c.n, c.t, c.lower, c.upper, c.advantage, c.vacuous
            )?;
        }
        Ok(())
    }
}

/// Inclusive log-spaced grid from `lo` to `hi`.
pub fn log_grid<S: Scalar>(lo: S, hi: S, points: usize) -> Result<Vec<S>> {
    check_positive("lo", lo)?;
    check_positive("hi", hi)?;
    if hi < lo {
        return Err(invalid("hi", "grid upper end below lower end"));
    }
    if points < 2 {
        return Err(invalid("points", "need at least two grid points"));
    }
    let llo = lo.ln();
    let lhi = hi.ln();
    let step = (lhi - llo) / S::real((points - 1) as f64);
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                hi
            } else {
                (llo + step * S::real(i as f64)).exp()
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    // worked-example values recomputed independently at 30-digit precision
    const MTL_EXAMPLE: f64 = 0.06895493661361633;
    const TRACENORM_EXAMPLE: f64 = 0.13793629303648409;
    const LTL_EXAMPLE: f64 = 0.16949786628933143;
    const HALFSPACE_EXAMPLE: f64 = 0.20118162901837097;
    const LOWER_100_50: f64 = 0.15677085888103215;
    const LOWER_1E5_1E4: f64 = 0.2989204361530051;
    const ADVANTAGE_EXAMPLE: f64 = 0.09773880713463412;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn mtl_bound_matches_frozen_value() {
        let inp = BoundInputs::with_unit_constants(1.0, 100.0, 100.0, 0.1, 1.0, 0.01);
        let b = mtl_bound(&inp).unwrap();
        assert!(rel_close(b.value, MTL_EXAMPLE, 1e-12), "got {}", b.value);
        assert!(!b.vacuous);
    }

    #[test]
    fn tracenorm_bound_matches_frozen_value() {
        let inp = BoundInputs::with_unit_constants(1.0, 100.0, 100.0, 0.1, 1.0, 0.01);
        let b = mtl_tracenorm_bound(&inp).unwrap();
        assert!(rel_close(b.value, TRACENORM_EXAMPLE, 1e-12), "got {}", b.value);
    }

    #[test]
    fn ltl_distribution_bound_matches_frozen_value() {
        let inp = BoundInputs::with_unit_constants(2.0, 50.0, 1e4, 0.01, 1.0, 0.01);
        let b = ltl_bound(&inp, LtlVariant::Distribution).unwrap();
        assert!(rel_close(b.value, LTL_EXAMPLE, 1e-12), "got {}", b.value);
    }

    #[test]
    fn halfspace_upper_matches_frozen_value() {
        let b = halfspace_ltl_upper(2.0, 1e5, 1e4, 1e11, 1e-4).unwrap();
        assert!(rel_close(b.value, HALFSPACE_EXAMPLE, 1e-12), "got {}", b.value);
    }

    #[test]
    fn equivariant_lower_matches_frozen_values() {
        let a = equivariant_lower(100.0, 50.0, 0.01).unwrap();
        assert!(rel_close(a.value, LOWER_100_50, 1e-12), "got {}", a.value);
        let b = equivariant_lower(1e5, 1e4, 1e-4).unwrap();
        assert!(rel_close(b.value, LOWER_1E5_1E4, 1e-12), "got {}", b.value);
    }

    #[test]
    fn advantage_at_reference_point_matches_frozen_value() {
        let lower = equivariant_lower(1e5, 1e4, 1e-4).unwrap().value;
        let upper = halfspace_ltl_upper(2.0, 1e5, 1e4, 1e11, 1e-4).unwrap().value;
        assert!(rel_close(lower - upper, ADVANTAGE_EXAMPLE, 1e-12));
    }

    #[test]
    fn lower_bound_floors_at_zero_when_samples_reach_dimension() {
        let b = equivariant_lower(100.0, 100.0, 0.05).unwrap();
        assert_eq!(b.value, 0.0);
        assert!(b.vacuous);
        let c = equivariant_lower(100.0, 120.0, 0.05).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(c.vacuous);
    }

    #[test]
    fn halfspace_upper_goes_vacuous_for_full_rank_subspace_and_few_tasks() {
        let b = halfspace_ltl_upper(100.0, 100.0, 50.0, 10.0, 0.05).unwrap();
        assert!(b.value > 1.0);
        assert!(b.vacuous);
    }

    #[test]
    fn mtl_bound_decreases_in_n_and_t() {
        let base = BoundInputs::with_unit_constants(2.0, 50.0, 20.0, 0.05, 1.0, 0.02);
        let b0 = mtl_bound(&base).unwrap().value;
        for (n, t) in [(100.0, 20.0), (50.0, 80.0), (400.0, 400.0)] {
            let inp = BoundInputs { n, t, ..base };
            assert!(mtl_bound(&inp).unwrap().value < b0);
        }
    }

    #[test]
    fn subspace_bound_beats_tracenorm_when_k_below_log_tn() {
        for k in [1.0f64, 2.0, 3.0, 5.0] {
            for n in [10.0f64, 100.0, 1000.0] {
                for t in [10.0f64, 100.0, 1000.0] {
                    if k >= (t * n).ln() {
                        continue;
                    }
                    let inp = BoundInputs::with_unit_constants(k, n, t, 0.05, 1.0, 0.5 / n.sqrt());
                    let a = mtl_bound(&inp).unwrap().value;
                    let b = mtl_tracenorm_bound(&inp).unwrap().value;
                    assert!(a < b, "k={k} n={n} t={t}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn tracenorm_tail_term_shrinks_as_delta_grows() {
        let lo = BoundInputs::with_unit_constants(1.0, 100.0, 100.0, 0.01, 1.0, 0.01);
        let hi = BoundInputs {
            delta: 0.999,
            ..lo
        };
        assert!(mtl_tracenorm_bound(&hi).unwrap().value < mtl_tracenorm_bound(&lo).unwrap().value);
    }

    #[test]
    fn ltl_bound_converges_to_per_task_term_as_tasks_grow() {
        let inp = BoundInputs::with_unit_constants(2.0, 50.0, 1e18, 0.01, 1.0, 0.01);
        let limit = (2.0 * std::f64::consts::PI).sqrt() * (2.0f64 * 0.01 / 50.0).sqrt();
        let b = ltl_bound(&inp, LtlVariant::Distribution).unwrap();
        assert!((b.value - limit).abs() < 1e-7);
    }

    #[test]
    fn empirical_variant_requires_one_sup_norm_per_task() {
        let inp = BoundInputs::with_unit_constants(2.0, 50.0, 4.0, 0.01, 1.0, 0.01);
        let short = [1.0, 1.0];
        assert!(ltl_bound(&inp, LtlVariant::Empirical { per_task_sup_norms: &short }).is_err());
        let full = [1.0, 1.0, 1.0, 1.0];
        assert!(ltl_bound(&inp, LtlVariant::Empirical { per_task_sup_norms: &full }).is_ok());
    }

    #[test]
    fn halfspace_upper_equals_general_bound_at_optimal_margin() {
        for (k, d, n, t) in [
            (2.0f64, 1e5f64, 1e4f64, 1e11f64),
            (5.0, 1e5, 1e4, 1e11),
            (2.0, 100.0, 50.0, 1e4),
            (3.0, 1e3, 200.0, 1e6),
        ] {
            let eps = halfspace_optimal_epsilon(k, d, n, t);
            let b = d.sqrt() / (2.0 * eps);
            let inp = BoundInputs {
                k,
                n,
                t,
                delta: 1e-4,
                b,
                l_phi: 1.0,
                c1: 1.0,
                c2: 1.0,
                cov_trace: 1.0,
                cov_spectral: 1.0 / d,
            };
            let general = ltl_bound(&inp, LtlVariant::Distribution).unwrap().value;
            let special = halfspace_ltl_upper(k, d, n, t, 1e-4).unwrap().value;
            assert!(
                (general - special).abs() < 1e-10,
                "k={k} d={d}: {general} vs {special}"
            );
        }
    }

    #[test]
    fn phase_diagram_advantage_rises_with_tasks() {
        let params = PhaseDiagramParams {
            d: 1e5,
            k: 2.0,
            delta: 1e-4,
            n_grid: log_grid(1.0, 1e5, 20).unwrap(),
            t_grid: log_grid(1.0, 1e11, 20).unwrap(),
            delta_split: false,
        };
        let diagram = phase_diagram(params).unwrap();
        assert!(diagram.positive_cells() > 0);
        for chunk in diagram.cells.chunks(20) {
            for w in chunk.windows(2) {
                assert!(w[1].advantage >= w[0].advantage - 1e-15);
            }
        }
    }

    #[test]
    fn phase_diagram_csv_has_header_and_row_per_cell() {
        let params = PhaseDiagramParams {
            d: 1e3,
            k: 2.0,
            delta: 0.01,
            n_grid: vec![10.0, 100.0],
            t_grid: vec![10.0, 1e4, 1e8],
            delta_split: false,
        };
        let diagram = phase_diagram(params).unwrap();
        let mut buf = Vec::new();
        diagram.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "n,T,lower,upper,advantage,vacuous_flag");
    }

    #[test]
    fn log_grid_hits_both_ends() {
        let g = log_grid(1.0, 1e11, 100).unwrap();
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[99], 1e11);
        for w in g.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn invalid_inputs_name_the_offending_parameter() {
        let mut inp = BoundInputs::with_unit_constants(2.0, 50.0, 10.0, 0.05, 1.0, 0.01);
        inp.delta = 1.5;
        let err = mtl_bound(&inp).unwrap_err();
        assert!(err.to_string().contains("delta"));
        let err = halfspace_ltl_upper(8.0, 4.0, 10.0, 10.0, 0.05).unwrap_err();
        assert!(err.to_string().contains('k'));
        let err = equivariant_lower(100.0, 0.0, 0.05).unwrap_err();
        assert!(err.to_string().contains('n'));
    }
}

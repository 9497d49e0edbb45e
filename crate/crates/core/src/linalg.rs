//! Small dense linear algebra: symmetric eigendecomposition, power iteration,
//! and column orthonormalization.
//!
//! Matrices here are tiny (dictionaries up to a few hundred columns of
//! dimension a few hundred, Gram matrices of the same order), so a cyclic
//! Jacobi solver is accurate and fast enough, and keeps the crate generic over
//! the scalar type. Power iteration serves as an algorithmically independent
//! second route to the top eigenvalue for cross-checks.

use ndarray::{Array1, Array2, ArrayView2};

use crate::{invalid, mismatch, Result, Scalar};

const MAX_JACOBI_SWEEPS: usize = 50;

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order with matching eigenvector columns.
/// The input is symmetrized before iterating; asymmetry on the order of
/// roundoff is expected from Gram-matrix construction.
pub fn sym_eigen<S: Scalar>(a: ArrayView2<'_, S>) -> Result<(Array1<S>, Array2<S>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(mismatch(format!(
            "symmetric eigendecomposition needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if n == 0 {
        return Err(invalid("matrix", "empty matrix"));
    }
    let half = S::real(0.5);
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            m[[i, j]] = (a[[i, j]] + a[[j, i]]) * half;
        }
    }
    let mut v: Array2<S> = Array2::eye(n);
    let frob = m.iter().map(|x| *x * *x).sum::<S>().sqrt();
    let stop = S::epsilon() * frob * S::real(n as f64);

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = S::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + m[[p, q]] * m[[p, q]];
            }
        }
        if off.sqrt() * S::real(2.0f64.sqrt()) <= stop {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                let scale = m[[p, p]].abs() + m[[q, q]].abs();
                if apq.abs() <= S::epsilon() * scale {
                    m[[p, q]] = S::zero();
                    m[[q, p]] = S::zero();
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (S::real(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (S::one() + theta * theta).sqrt());
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = t * c;
                for r in 0..n {
                    let mrp = m[[r, p]];
                    let mrq = m[[r, q]];
                    m[[r, p]] = c * mrp - s * mrq;
                    m[[r, q]] = s * mrp + c * mrq;
                }
                for r in 0..n {
                    let mpr = m[[p, r]];
                    let mqr = m[[q, r]];
                    m[[p, r]] = c * mpr - s * mqr;
                    m[[q, r]] = s * mpr + c * mqr;
                }
                for r in 0..n {
                    let vrp = v[[r, p]];
                    let vrq = v[[r, q]];
                    v[[r, p]] = c * vrp - s * vrq;
                    v[[r, q]] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].partial_cmp(&m[[i, i]]).expect("finite eigenvalues"));
    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[[r, dst]] = v[[r, src]];
        }
    }
    Ok((values, vectors))
}

/// Eigenvalues of a symmetric matrix, descending.
pub fn sym_eigenvalues<S: Scalar>(a: ArrayView2<'_, S>) -> Result<Array1<S>> {
    sym_eigen(a).map(|(values, _)| values)
}

/// Top eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration with a deterministic start.
pub fn lambda_max_power_iteration<S: Scalar>(
    a: ArrayView2<'_, S>,
    max_iters: usize,
    tol: S,
) -> Result<S> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(mismatch(format!(
            "power iteration needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if n == 0 {
        return Err(invalid("matrix", "empty matrix"));
    }
    // irrational spacing keeps the start from being orthogonal to the top
    // eigenvector for any matrix met in practice
    let mut v: Array1<S> = Array1::from_iter(
        (0..n).map(|i| S::real(1.0 + 0.618_033_988_749_895 * ((i % 97) as f64))),
    );
    let norm = v.iter().map(|x| *x * *x).sum::<S>().sqrt();
    v.mapv_inplace(|x| x / norm);
    let mut lambda = S::zero();
    for _ in 0..max_iters {
        let w = a.dot(&v);
        let wnorm = w.iter().map(|x| *x * *x).sum::<S>().sqrt();
        if wnorm <= S::min_positive_value() {
            return Ok(S::zero());
        }
        let next = v.dot(&w);
        let done = (next - lambda).abs() <= tol * next.abs().max(S::one());
        lambda = next;
        v = w.mapv(|x| x / wnorm);
        if done {
            break;
        }
    }
    Ok(lambda)
}

/// Orthonormalizes the columns of `a` by modified Gram-Schmidt with
/// reorthogonalization. Fails if the columns are not linearly independent.
pub fn orthonormalize_columns<S: Scalar>(a: ArrayView2<'_, S>) -> Result<Array2<S>> {
    let (rows, cols) = a.dim();
    if cols > rows {
        return Err(mismatch(format!(
            "cannot orthonormalize {cols} columns in dimension {rows}"
        )));
    }
    let mut q = a.to_owned();
    for j in 0..cols {
        let original_norm = q.column(j).iter().map(|x| *x * *x).sum::<S>().sqrt();
        for _ in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let qi = q.column(i).to_owned();
                let mut col = q.column_mut(j);
                col.zip_mut_with(&qi, |c, &b| *c = *c - proj * b);
            }
        }
        let norm = q.column(j).iter().map(|x| *x * *x).sum::<S>().sqrt();
        if norm <= S::real(1e3) * S::epsilon() * original_norm.max(S::one()) {
            return Err(invalid("matrix", format!("column {j} is linearly dependent")));
        }
        q.column_mut(j).mapv_inplace(|x| x / norm);
    }
    Ok(q)
}

/// Extends an orthonormal `rows x r` frame to `rows x want` columns by
/// orthogonalizing canonical basis vectors against it, in index order.
pub fn complete_basis<S: Scalar>(partial: ArrayView2<'_, S>, want: usize) -> Result<Array2<S>> {
    let (rows, r) = partial.dim();
    if want > rows || r > want {
        return Err(mismatch(format!(
            "cannot extend a {rows}x{r} frame to {want} columns"
        )));
    }
    let mut q = Array2::zeros((rows, want));
    for j in 0..r {
        for i in 0..rows {
            q[[i, j]] = partial[[i, j]];
        }
    }
    let mut have = r;
    let mut next_axis = 0;
    while have < want {
        if next_axis >= rows {
            return Err(invalid("matrix", "input frame is not orthonormal"));
        }
        let mut cand: Array1<S> = Array1::zeros(rows);
        cand[next_axis] = S::one();
        next_axis += 1;
        for _ in 0..2 {
            for i in 0..have {
                let proj = q.column(i).dot(&cand);
                let qi = q.column(i).to_owned();
                cand.zip_mut_with(&qi, |c, &b| *c = *c - proj * b);
            }
        }
        let norm = cand.iter().map(|x| *x * *x).sum::<S>().sqrt();
        if norm > S::real(1e-3) {
            cand.mapv_inplace(|x| x / norm);
            for i in 0..rows {
                q[[i, have]] = cand[i];
            }
            have += 1;
        }
    }
    Ok(q)
}

/// Singular values of a rectangular matrix, descending, via the eigenvalues
/// of the smaller Gram form.
pub fn singular_values<S: Scalar>(a: ArrayView2<'_, S>) -> Result<Array1<S>> {
    let (rows, cols) = a.dim();
    if rows == 0 || cols == 0 {
        return Err(invalid("matrix", "empty matrix"));
    }
    let gram = if cols <= rows {
        a.t().dot(&a)
    } else {
        a.dot(&a.t())
    };
    let values = sym_eigenvalues(gram.view())?;
    Ok(values.mapv(|x| x.max(S::zero()).sqrt()))
}

/// Sum of singular values.
pub fn nuclear_norm<S: Scalar>(a: ArrayView2<'_, S>) -> Result<S> {
    Ok(singular_values(a)?.sum())
}

//! Small dense linear algebra with respect to a point-dependent metric.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;

/// `a^T G b`.
pub fn inner<T: Real>(g: &DMatrix<T>, a: &DVector<T>, b: &DVector<T>) -> T {
    (a.transpose() * g * b)[(0, 0)]
}

pub fn norm<T: Real>(g: &DMatrix<T>, a: &DVector<T>) -> T {
    inner(g, a, a).max(T::zero()).sqrt()
}

/// Modified Gram–Schmidt with column pivoting: at every step the remaining
/// candidate of largest `g`-norm is taken (earliest wins ties), normalized,
/// and projected out of the rest. Stops once every remaining norm is below
/// `tol`.
pub fn orthonormalize_pivoted<T: Real>(
    g: &DMatrix<T>,
    mut candidates: Vec<DVector<T>>,
    tol: T,
) -> Vec<DVector<T>> {
    let mut basis = Vec::new();
    while !candidates.is_empty() {
        let mut best = 0;
        let mut best_norm = norm(g, &candidates[0]);
        for (i, c) in candidates.iter().enumerate().skip(1) {
            let n = norm(g, c);
            if n > best_norm {
                best = i;
                best_norm = n;
            }
        }
        if best_norm <= tol {
            break;
        }
        let q = candidates.remove(best) / best_norm;
        for c in candidates.iter_mut() {
            let proj = inner(g, &q, c);
            c.axpy(-proj, &q, T::one());
        }
        basis.push(q);
    }
    basis
}

/// Modified Gram–Schmidt in the given order, without pivoting or rank
/// truncation. Used for smooth frame extensions.
pub fn orthonormalize_ordered<T: Real>(g: &DMatrix<T>, vectors: &[DVector<T>]) -> Vec<DVector<T>> {
    let mut basis: Vec<DVector<T>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for q in &basis {
            let proj = inner(g, q, &w);
            w.axpy(-proj, q, T::one());
        }
        let n = norm(g, &w);
        basis.push(w / n);
    }
    basis
}

/// Coefficients of `v` in a `g`-orthonormal basis.
pub fn coordinates<T: Real>(g: &DMatrix<T>, basis: &[DVector<T>], v: &DVector<T>) -> DVector<T> {
    DVector::from_iterator(basis.len(), basis.iter().map(|b| inner(g, b, v)))
}

/// `g`-orthogonal projector onto the span of an orthonormal basis, as a
/// matrix acting on coordinate vectors.
pub fn projector<T: Real>(g: &DMatrix<T>, basis: &[DVector<T>], n: usize) -> DMatrix<T> {
    let mut p = DMatrix::zeros(n, n);
    for b in basis {
        let gb = g * b;
        p += b * gb.transpose();
    }
    p
}

/// Inverse of a symmetric positive definite matrix.
pub fn spd_inverse<T: Real>(m: &DMatrix<T>) -> Option<DMatrix<T>> {
    m.clone().cholesky().map(|c| c.inverse())
}

pub fn min_eigenvalue<T: Real>(m: &DMatrix<T>) -> T {
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .copied()
        .reduce(|a, b| a.min(b))
        .unwrap_or(T::zero())
}

/// Symmetric square root of a symmetric positive semi-definite matrix.
pub fn spd_sqrt<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    let eig = m.clone().symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| l.max(T::zero()).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<T> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |a, &b| a.max(b.abs()))
}

pub fn max_abs_vec<T: Real>(v: &DVector<T>) -> T {
    v.iter().fold(T::zero(), |a, &b| a.max(b.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pivoted_gram_schmidt_drops_dependent_vectors() {
        let g = DMatrix::<f64>::identity(3, 3);
        let vs = vec![
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![2.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 1.0]),
        ];
        let q = orthonormalize_pivoted(&g, vs, 1e-10);
        assert_eq!(q.len(), 2);
        // largest norm first
        assert!((q[0][0] - 1.0).abs() < 1e-15);
        assert!(inner(&g, &q[0], &q[1]).abs() < 1e-15);
    }

    #[test]
    fn projector_with_weighted_metric_is_idempotent() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let q = orthonormalize_ordered(&g, &[DVector::from_vec(vec![1.0, 1.0])]);
        let p = projector(&g, &q, 2);
        assert!(max_abs(&(&p * &p - &p)) < 1e-14);
    }
}

//! Dense symmetric-definite pencils `K c = theta M c`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues (ascending) of `K c = theta M c` for symmetric `K` and
/// symmetric positive-definite `M`, by Cholesky reduction
/// `L^{-1} K L^{-T}`.
pub fn generalized_small_pencil(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<Vec<f64>> {
    Ok(generalized_eigen(k, m)?.0)
}

/// Eigenvalues and `M`-orthonormal eigenvectors (columns).
pub fn generalized_eigen(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = k.nrows();
    if k.ncols() != n || m.nrows() != n || m.ncols() != n || n == 0 {
        return Err(Error::domain("pencil matrices must be square and of equal size"));
    }
    let ms = (m + m.transpose()) * 0.5;
    let ks = (k + k.transpose()) * 0.5;
    let chol = ms.cholesky().ok_or_else(|| {
        Error::NotPositiveDefinite("mass matrix is not positive definite; the trial family is degenerate".into())
    })?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factor is singular".into()))?;
    let reduced = &linv * ks * linv.transpose();
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let eig = SymmetricEigen::new(reduced);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    let vecs = linv.transpose() * vecs;
    Ok((values, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pencil() {
        let k = DMatrix::identity(4, 4) * 6.5;
        let m = DMatrix::identity(4, 4);
        let t = generalized_small_pencil(&k, &m).unwrap();
        assert!(t.iter().all(|v| (v - 6.5).abs() < 1e-14));
    }

    #[test]
    fn scalar_pencil_is_a_quotient() {
        let k = DMatrix::from_element(1, 1, 3.0);
        let m = DMatrix::from_element(1, 1, 1.5);
        let t = generalized_small_pencil(&k, &m).unwrap();
        assert_eq!(t.len(), 1);
        assert!((t[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn indefinite_mass_is_rejected() {
        let k = DMatrix::identity(2, 2);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(generalized_small_pencil(&k, &m), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn three_by_three_matches_characteristic_polynomial_roots() {
        let k = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 5.0]);
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, 0.2, 0.1, 0.2, 1.0]);
        let theta = generalized_small_pencil(&k, &m).unwrap();
        // det(K - t M) as a cubic evaluated directly, roots by bisection.
        let det = |t: f64| (&k - &m * t).determinant();
        let mut roots = Vec::new();
        let mut a = 0.0;
        let step = 0.01;
        while a < 20.0 {
            let b = a + step;
            if det(a).signum() != det(b).signum() {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if det(lo).signum() == det(mid).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            a = b;
        }
        assert_eq!(roots.len(), 3);
        for (x, y) in theta.iter().zip(&roots) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }
}

//! Unpreconditioned conjugate gradients for symmetric positive-definite
//! operators.

use super::operator::SymmetricOperator;
use crate::error::{Error, Result};
use crate::numerics::{axpy, dot, norm};

#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    /// Stop when `||b - A x|| <= rel_tol * ||b||`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            max_iter: 50_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `A x = b` starting from `x = 0`.
pub fn conjugate_gradient(op: &dyn SymmetricOperator, b: &[f64], opts: CgOptions) -> Result<(Vec<f64>, CgStats)> {
    let n = op.dim();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((
            x,
            CgStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let target = (opts.rel_tol * bnorm).powi(2);
    for it in 0..opts.max_iter {
        if rr <= target {
            return Ok((
                x,
                CgStats {
                    iterations: it,
                    relative_residual: rr.sqrt() / bnorm,
                },
            ));
        }
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "conjugate gradients met p'Ap = {pap:e} at iteration {it}"
            )));
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    Err(Error::Convergence {
        message: format!(
            "conjugate gradients did not reach {:e} in {} iterations",
            opts.rel_tol, opts.max_iter
        ),
        residuals: vec![rr.sqrt() / bnorm],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::operator::DiagonalOperator;

    #[test]
    fn solves_diagonal_system() {
        let op = DiagonalOperator((1..=50).map(f64::from).collect());
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin() + 1.5).collect();
        let (x, stats) = conjugate_gradient(&op, &b, CgOptions::default()).unwrap();
        for i in 0..50 {
            assert!((x[i] * (i + 1) as f64 - b[i]).abs() < 1e-11);
        }
        assert!(stats.iterations <= 50);
    }

    #[test]
    fn detects_indefinite_operator() {
        let op = DiagonalOperator(vec![1.0, -2.0, 3.0]);
        assert!(conjugate_gradient(&op, &[1.0, 1.0, 1.0], CgOptions::default()).is_err());
    }
}

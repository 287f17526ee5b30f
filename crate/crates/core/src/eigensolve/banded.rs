//! Banded symmetric pencils `A x = lambda B x` (`B` positive definite):
//! eigenvalue counts from the inertia of `A - sigma B` and eigenvalues by
//! bisection on those counts.

use crate::error::{Error, Result};

/// Symmetric band matrix storing the lower band: `get(i, j)` for
/// `0 <= i - j <= bandwidth`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSym {
    n: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            bandwidth,
            data: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        (d <= self.bandwidth && i < self.n).then(|| i * (self.bandwidth + 1) + d)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        match self.slot(i, j) {
            Some(s) => {
                self.data[s] += v;
                Ok(())
            }
            None => Err(Error::domain(format!(
                "entry ({i}, {j}) lies outside the band of width {}",
                self.bandwidth
            ))),
        }
    }

    /// Number of negative eigenvalues of `self - sigma * b`, from the signs
    /// of the pivots of an unpivoted `L D L^T` factorization.
    pub fn negative_count(&self, b: &BandedSym, sigma: f64) -> usize {
        let n = self.n;
        let w = self.bandwidth.max(b.bandwidth);
        // l[i][d] = L(i, i - d) for d in 1..=w
        let mut l = vec![0.0; n * (w + 1)];
        let mut d = vec![0.0; n];
        let scale = self.data.iter().chain(&b.data).fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let mut negatives = 0;
        for i in 0..n {
            let j0 = i.saturating_sub(w);
            for j in j0..i {
                let mut s = self.get(i, j) - sigma * b.get(i, j);
                let k0 = j.saturating_sub(w).max(j0);
                for k in k0..j {
                    s -= l[i * (w + 1) + (i - k)] * l[j * (w + 1) + (j - k)] * d[k];
                }
                l[i * (w + 1) + (i - j)] = s / d[j];
            }
            let mut s = self.get(i, i) - sigma * b.get(i, i);
            for k in j0..i {
                let lik = l[i * (w + 1) + (i - k)];
                s -= lik * lik * d[k];
            }
            if s == 0.0 {
                s = -f64::EPSILON * scale;
            }
            if s < 0.0 {
                negatives += 1;
            }
            d[i] = s;
        }
        negatives
    }
}

/// The `k` smallest eigenvalues of the pencil by bisection inside
/// `[lower, upper]`, each to absolute width `tol`.
pub fn smallest_generalized(a: &BandedSym, b: &BandedSym, k: usize, lower: f64, upper: f64, tol: f64) -> Result<Vec<f64>> {
    if a.dim() != b.dim() {
        return Err(Error::domain("pencil matrices differ in size"));
    }
    if a.negative_count(b, lower) > 0 {
        return Err(Error::domain(format!("pencil has eigenvalues below the bracket start {lower}")));
    }
    if a.negative_count(b, upper) < k {
        return Err(Error::domain(format!(
            "fewer than {k} pencil eigenvalues below the bracket end {upper}"
        )));
    }
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let (mut lo, mut hi) = (out.last().copied().unwrap_or(lower), upper);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if a.negative_count(b, mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Linear finite elements for `-u'' = lambda u` on (0, 1).
    fn fem_laplacian(n: usize) -> (BandedSym, BandedSym) {
        let h = 1.0 / (n + 1) as f64;
        let mut a = BandedSym::zeros(n, 1);
        let mut m = BandedSym::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0 / h).unwrap();
            m.add(i, i, 4.0 * h / 6.0).unwrap();
            if i + 1 < n {
                a.add(i + 1, i, -1.0 / h).unwrap();
                m.add(i + 1, i, h / 6.0).unwrap();
            }
        }
        (a, m)
    }

    #[test]
    fn fem_eigenvalues_converge_to_squares() {
        let (a, m) = fem_laplacian(400);
        let ev = smallest_generalized(&a, &m, 3, 0.0, 200.0, 1e-10).unwrap();
        for (j, v) in ev.iter().enumerate() {
            let exact = ((j + 1) as f64 * PI).powi(2);
            assert!((v - exact).abs() / exact < 1e-4, "{v} vs {exact}");
            assert!(*v > exact);
        }
    }

    #[test]
    fn inertia_matches_dense_count() {
        let (a, m) = fem_laplacian(30);
        let dense_a = nalgebra::DMatrix::from_fn(30, 30, |i, j| a.get(i, j));
        let dense_m = nalgebra::DMatrix::from_fn(30, 30, |i, j| m.get(i, j));
        let theta = crate::eigensolve::pencil::generalized_small_pencil(&dense_a, &dense_m).unwrap();
        for sigma in [5.0, 50.0, 500.0, 5000.0] {
            let expect = theta.iter().filter(|&&t| t < sigma).count();
            assert_eq!(a.negative_count(&m, sigma), expect);
        }
    }

    #[test]
    fn out_of_band_entries_are_rejected() {
        let mut a = BandedSym::zeros(5, 1);
        assert!(a.add(3, 0, 1.0).is_err());
    }
}

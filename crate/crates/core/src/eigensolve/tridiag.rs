//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection, and
//! eigenvectors by inverse iteration.

/// Number of eigenvalues strictly below `x` of the symmetric tridiagonal
/// matrix with diagonal `d` and off-diagonal `e` (`e.len() + 1 == d.len()`).
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(d: &[f64], e: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..d.len() {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i < e.len() { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (lo, hi)
}

/// The `k` smallest eigenvalues, ascending, to near machine precision.
pub fn smallest_eigenvalues(d: &[f64], e: &[f64], k: usize) -> Vec<f64> {
    let k = k.min(d.len());
    let (lo0, hi0) = gershgorin(d, e);
    (0..k)
        .map(|j| {
            // Smallest x with count(x) > j.
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sturm_count(d, e, mid) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Unit eigenvector for an accurate eigenvalue `lambda`, by inverse iteration
/// with a partially pivoted tridiagonal LU.
pub fn eigenvector(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = d.iter().chain(e).fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let shift = lambda + 4.0 * f64::EPSILON * scale;
    let lu = TridiagLu::factor(d, e, shift, f64::EPSILON * scale);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64 / 11.0).collect();
    for _ in 0..4 {
        lu.solve(&mut x);
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    x
}

/// LU of `T - shift I` with partial pivoting (at most one extra
/// superdiagonal of fill).
struct TridiagLu {
    l: Vec<f64>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(d: &[f64], e: &[f64], shift: f64, tiny: f64) -> Self {
        let n = d.len();
        let mut diag: Vec<f64> = d.iter().map(|v| v - shift).collect();
        let mut sup: Vec<f64> = e.to_vec();
        let sub: Vec<f64> = e.to_vec();
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut l = vec![0.0; n - 1];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            if sub[i].abs() > diag[i].abs() {
                // Swap rows i and i+1.
                swapped[i] = true;
                let f = diag[i] / sub[i];
                l[i] = f;
                let (a0, a1) = (diag[i], sup[i]);
                diag[i] = sub[i];
                sup[i] = diag[i + 1];
                let next_sup = if i + 1 < n - 1 { sup[i + 1] } else { 0.0 };
                if i + 2 < n {
                    u2[i] = next_sup;
                }
                diag[i + 1] = a1 - f * sup[i];
                if i + 1 < n - 1 {
                    sup[i + 1] = -f * next_sup;
                }
                let _ = a0;
            } else {
                let piv = if diag[i] == 0.0 { tiny } else { diag[i] };
                diag[i] = piv;
                let f = sub[i] / piv;
                l[i] = f;
                diag[i + 1] -= f * sup[i];
            }
        }
        if diag[n - 1] == 0.0 {
            diag[n - 1] = tiny;
        }
        Self {
            l,
            u0: diag,
            u1: sup,
            u2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.l[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * b[i + 2];
            }
            b[i] = s / self.u0[i];
        }
    }
}

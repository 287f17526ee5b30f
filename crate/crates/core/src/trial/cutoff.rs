//! Smooth cut-off `chi`: equal to 1 for `|tau| <= 1/4`, 0 for `|tau| >= 1/2`,
//! with the bridge `1 - F(s) / F(1)`, `F(s) = int_0^s exp(-1 / (t (1 - t))) dt`.

use std::sync::OnceLock;

use crate::planar::section::gauss_legendre;

const TABLE: usize = 2048;

struct Bridge {
    /// `F(i / TABLE) / F(1)`.
    values: Vec<f64>,
    total: f64,
}

fn bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (t * (1.0 - t))).exp()
    }
}

fn bridge() -> &'static Bridge {
    static CELL: OnceLock<Bridge> = OnceLock::new();
    CELL.get_or_init(|| {
        let (x, w) = gauss_legendre(8);
        let mut acc = 0.0;
        let mut values = Vec::with_capacity(TABLE + 1);
        values.push(0.0);
        let h = 1.0 / TABLE as f64;
        for i in 0..TABLE {
            let a = i as f64 * h;
            acc += x.iter().zip(&w).map(|(t, q)| 0.5 * h * q * bump(a + 0.5 * h * (t + 1.0))).sum::<f64>();
            values.push(acc);
        }
        let total = acc;
        values.iter_mut().for_each(|v| *v /= total);
        Bridge { values, total }
    })
}

/// `F(s) / F(1)` by cubic Hermite interpolation of the table, using the
/// exact derivative.
fn normalized_primitive(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let b = bridge();
    let h = 1.0 / TABLE as f64;
    let pos = s / h;
    let i = (pos.floor() as usize).min(TABLE - 1);
    let t = pos - i as f64;
    let (y0, y1) = (b.values[i], b.values[i + 1]);
    let d0 = bump(i as f64 * h) / b.total * h;
    let d1 = bump((i + 1) as f64 * h) / b.total * h;
    let (t2, t3) = (t * t, t * t * t);
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
}

/// `chi(tau)`.
pub fn chi(tau: f64) -> f64 {
    1.0 - normalized_primitive(4.0 * (tau.abs() - 0.25))
}

/// `chi'(tau)`.
pub fn chi_prime(tau: f64) -> f64 {
    let s = 4.0 * (tau.abs() - 0.25);
    -tau.signum() * 4.0 * bump(s) / bridge().total
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plateau_and_support() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.25), 1.0);
        assert_eq!(chi(-0.2), 1.0);
        assert_eq!(chi(0.5), 0.0);
        assert_eq!(chi(0.7), 0.0);
        assert_eq!(chi_prime(0.1), 0.0);
        assert_eq!(chi_prime(0.6), 0.0);
        assert!((chi(0.375) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for &t in &[0.26, 0.3, 0.375, 0.41, 0.49, -0.33] {
            let d = 1e-6;
            let fd = (chi(t + d) - chi(t - d)) / (2.0 * d);
            assert!((fd - chi_prime(t)).abs() < 1e-7, "{t}: {fd} vs {}", chi_prime(t));
        }
    }

    proptest! {
        #[test]
        fn chi_is_even_monotone_and_bounded(a in 0.0f64..0.6, b in 0.0f64..0.6) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(chi(lo) >= chi(hi));
            prop_assert!((0.0..=1.0).contains(&chi(a)));
            prop_assert_eq!(chi(a), chi(-a));
        }
    }
}

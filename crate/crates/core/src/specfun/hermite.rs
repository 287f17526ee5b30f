//! Physicists' Hermite polynomials and the normalized eigenfunctions of the
//! oscillator `-w'' + 4 Lambda zeta^2 w = mu w`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 60;

/// `H_n(t)` by the recurrence `H_{n+1} = 2t H_n - 2n H_{n-1}`.
pub fn hermite_poly(n: usize, t: f64) -> Result<f64> {
    if n > MAX_DEGREE {
        return Err(Error::domain(format!(
            "Hermite degree {n} exceeds the supported maximum {MAX_DEGREE}"
        )));
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * t * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Hermite function `(2^n n! sqrt(pi))^{-1/2} e^{-x^2/2} H_n(x)`, evaluated by
/// the normalized recurrence so that neither factor overflows.
pub fn hermite_function(n: usize, x: f64) -> Result<f64> {
    if n > MAX_DEGREE {
        return Err(Error::domain(format!(
            "Hermite degree {n} exceeds the supported maximum {MAX_DEGREE}"
        )));
    }
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * x * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Closed-form oscillator eigenvalue `2 Lambda^{1/2} (2n + 1)`.
pub fn oscillator_eigenvalue(n: usize, lambda: f64) -> f64 {
    2.0 * lambda.sqrt() * (2 * n + 1) as f64
}

/// L2-normalized eigenfunction of `-w'' + 4 Lambda zeta^2 w`, positive at
/// zero for even `n` and with positive slope at zero for odd `n`:
/// `(2 Lambda^{1/2})^{1/4} psi_n((4 Lambda)^{1/4} zeta)`.
pub fn oscillator_eigenfunction(n: usize, lambda: f64, zeta: f64) -> Result<f64> {
    let c = (4.0 * lambda).powf(0.25);
    let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * c.sqrt() * hermite_function(n, c * zeta)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        assert_eq!(hermite_poly(0, 0.7).unwrap(), 1.0);
        assert_eq!(hermite_poly(1, 3.0).unwrap(), 6.0);
        assert_eq!(hermite_poly(4, 0.0).unwrap(), 12.0);
        // H_3(t) = 8t^3 - 12t
        assert_eq!(hermite_poly(3, 2.0).unwrap(), 40.0);
        assert!(hermite_poly(61, 1.0).is_err());
    }

    #[test]
    fn hermite_function_matches_unscaled_product() {
        for n in 0..12 {
            for &x in &[-2.5, -0.3, 0.0, 1.1, 3.0] {
                let fact: f64 = (1..=n).map(|k| k as f64).product();
                let direct = hermite_poly(n, x).unwrap() * (-0.5 * x * x).exp()
                    / (2f64.powi(n as i32) * fact * PI.sqrt()).sqrt();
                let rec = hermite_function(n, x).unwrap();
                assert!((direct - rec).abs() < 1e-13, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn oscillator_functions_are_orthonormal() {
        let lambda = PI * PI;
        let h = 1e-3;
        let zs: Vec<f64> = (-4000..=4000).map(|i| i as f64 * h).collect();
        for j in 0..6 {
            for k in 0..6 {
                let s: f64 = zs
                    .iter()
                    .map(|&z| {
                        oscillator_eigenfunction(j, lambda, z).unwrap()
                            * oscillator_eigenfunction(k, lambda, z).unwrap()
                    })
                    .sum::<f64>()
                    * h;
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-10, "({j},{k}) -> {s}");
            }
        }
    }

    #[test]
    fn sign_convention() {
        let lambda = 2.0;
        for n in 0..8 {
            if n % 2 == 0 {
                assert!(oscillator_eigenfunction(n, lambda, 0.0).unwrap() > 0.0);
            } else {
                assert!(oscillator_eigenfunction(n, lambda, 1e-4).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn eigenvalue_formula() {
        assert!((oscillator_eigenvalue(0, PI * PI) - 2.0 * PI).abs() < 1e-14);
        assert!((oscillator_eigenvalue(2, PI * PI) - 10.0 * PI).abs() < 1e-13);
    }
}

//! Small numerical utilities: deterministic reductions, quadrature,
//! regression and Richardson extrapolation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chunk length for parallel reductions. Partial sums are formed per chunk
/// and combined sequentially, so results do not depend on the thread count.
const CHUNK: usize = 4096;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= CHUNK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.par_iter_mut()
        .with_min_len(CHUNK)
        .zip(x.par_iter())
        .for_each(|(yi, xi)| *yi += alpha * xi);
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    x.par_iter_mut().with_min_len(CHUNK).for_each(|v| *v *= alpha);
}

/// Composite trapezoid rule for samples on a uniform grid.
pub fn trapezoid(values: &[f64], spacing: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            spacing * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::domain("linear fit needs at least two paired points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("linear fit with degenerate abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        points: x.len(),
    })
}

/// Fits `y ~ C x^p` on log-log axes; all inputs must be positive.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::domain("log-log fit needs positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

/// Extrapolates `values[i] ~ limit + sum_j c_j spacings[i]^powers[j]` to zero
/// spacing. Needs exactly `powers.len() + 1` samples.
pub fn richardson(spacings: &[f64], values: &[f64], powers: &[f64]) -> Result<f64> {
    let m = powers.len() + 1;
    if spacings.len() != m || values.len() != m {
        return Err(Error::domain(format!(
            "richardson needs {m} samples for {} error terms",
            powers.len()
        )));
    }
    let a = nalgebra::DMatrix::from_fn(m, m, |i, j| {
        if j == 0 {
            1.0
        } else {
            spacings[i].powf(powers[j - 1])
        }
    });
    let b = nalgebra::DVector::from_column_slice(values);
    let sol = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::domain("richardson system is singular"))?;
    Ok(sol[0])
}

/// Parses a number that may be written as an exact ratio such as `1/64`.
pub fn parse_ratio(s: &str) -> Result<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let n: f64 = num
                .trim()
                .parse()
                .map_err(|_| Error::config(format!("bad numerator in {s:?}")))?;
            let d: f64 = den
                .trim()
                .parse()
                .map_err(|_| Error::config(format!("bad denominator in {s:?}")))?;
            if d == 0.0 {
                return Err(Error::config(format!("zero denominator in {s:?}")));
            }
            n / d
        }
        None => s
            .parse()
            .map_err(|_| Error::config(format!("not a number: {s:?}")))?,
    };
    if !value.is_finite() {
        return Err(Error::config(format!("not finite: {s:?}")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_is_independent_of_chunking() {
        let a: Vec<f64> = (0..20_000).map(|i| ((i * 7919) % 1000) as f64 * 1e-3).collect();
        let b: Vec<f64> = (0..20_000).map(|i| ((i * 104_729) % 997) as f64 * 1e-3).collect();
        let serial: f64 = a
            .chunks(CHUNK)
            .zip(b.chunks(CHUNK))
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
            .sum();
        assert_eq!(dot(&a, &b), serial);
    }

    #[test]
    fn trapezoid_is_exact_for_linear_data() {
        let v: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 * 0.1 + 1.0).collect();
        assert!((trapezoid(&v, 0.1) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn loglog_recovers_power_law() {
        let x = [25.0, 50.0, 100.0, 200.0];
        let y: Vec<f64> = x.iter().map(|h: &f64| 3.0 * h.powf(-2.0 / 3.0)).collect();
        let fit = loglog_fit(&x, &y).unwrap();
        assert!((fit.slope + 2.0 / 3.0).abs() < 1e-12);
        assert!((fit.intercept.exp() - 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn richardson_removes_even_terms() {
        let f = |h: f64| 2.0 + 0.3 * h * h - 0.7 * h.powi(4);
        let hs = [0.1, 0.05, 0.025];
        let vals: Vec<f64> = hs.iter().map(|&h| f(h)).collect();
        let r = richardson(&hs, &vals, &[2.0, 4.0]).unwrap();
        assert!((r - 2.0).abs() < 1e-13);
    }

    #[test]
    fn ratios_parse() {
        assert_eq!(parse_ratio("1/64").unwrap(), 1.0 / 64.0);
        assert_eq!(parse_ratio(" 0.25 ").unwrap(), 0.25);
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("abc").is_err());
    }
}

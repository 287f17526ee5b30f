//! Airy function of the first kind on the real line.
//!
//! Three regimes:
//!
//! * `-12 <= t <= 8`: Maclaurin series `Ai = c1 f - c2 g`, summed in
//!   double-double arithmetic. The two series grow like `Bi` and cancel down
//!   to `Ai`, so plain doubles lose up to nine digits at the ends of this
//!   interval.
//! * `t > 8`: the exponentially decaying asymptotic expansion
//!   `Ai(t) ~ e^{-T} / (2 sqrt(pi) t^{1/4}) * sum (-1)^k c_k T^{-k}`,
//!   `T = 2/3 t^{3/2}`, truncated at its smallest term.
//! * `t < -12`: the oscillatory asymptotic expansion.

use std::f64::consts::{FRAC_PI_4, PI};

use super::dd::DoubleDouble;

/// Ai(0) = 3^{-2/3} / Gamma(2/3), as a double-double.
const AI0: DoubleDouble = DoubleDouble::new(0.3550280538878172, 2.05233632436212e-17);
/// -Ai'(0) = 3^{-1/3} / Gamma(1/3), as a double-double.
const MINUS_AIP0: DoubleDouble = DoubleDouble::new(0.2588194037928068, -2.522243111610832e-17);

pub const POSITIVE_SWITCH: f64 = 8.0;
pub const NEGATIVE_SWITCH: f64 = -12.0;

const MAX_ASYMPTOTIC_TERMS: usize = 60;

/// Coefficient `c_k = Gamma(3k + 1/2) / (54^k k! Gamma(k + 1/2))`.
pub fn asymptotic_coefficient(k: usize) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        let j = j as f64;
        c *= (3.0 * j + 2.5) * (3.0 * j + 1.5) * (3.0 * j + 0.5) / (54.0 * (j + 1.0) * (j + 0.5));
    }
    c
}

/// Derivative-series coefficient `d_k = -(6k+1)/(6k-1) c_k`, `d_0 = 1`.
fn derivative_coefficient(k: usize, c_k: f64) -> f64 {
    if k == 0 {
        1.0
    } else {
        let k = k as f64;
        -(6.0 * k + 1.0) / (6.0 * k - 1.0) * c_k
    }
}

pub fn airy_ai(t: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t > POSITIVE_SWITCH {
        decaying_asymptotic(t).0
    } else if t < NEGATIVE_SWITCH {
        oscillatory_asymptotic(-t).0
    } else {
        maclaurin(t).0
    }
}

pub fn airy_ai_prime(t: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t > POSITIVE_SWITCH {
        decaying_asymptotic(t).1
    } else if t < NEGATIVE_SWITCH {
        oscillatory_asymptotic(-t).1
    } else {
        maclaurin(t).1
    }
}

/// The decaying expansion with exactly `terms + 1` summands (`k = 0..=terms`),
/// without optimal truncation. Only meaningful for positive `t`.
pub fn airy_ai_asymptotic(t: f64, terms: usize) -> f64 {
    let big_t = 2.0 / 3.0 * t.powf(1.5);
    let mut sum = 0.0;
    let mut power = 1.0;
    for k in 0..=terms {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * asymptotic_coefficient(k) * power;
        power /= big_t;
    }
    0.5 / PI.sqrt() * t.powf(-0.25) * (-big_t).exp() * sum
}

fn maclaurin(x: f64) -> (f64, f64) {
    let xd = DoubleDouble::from_f64(x);
    let x3 = xd * xd * xd;
    let tiny = 1e-34;

    // f = sum 3^k (1/3)_k x^{3k} / (3k)!
    let mut f = DoubleDouble::from_f64(1.0);
    let mut term = DoubleDouble::from_f64(1.0);
    // g = sum 3^k (2/3)_k x^{3k+1} / (3k+1)!
    let mut g = xd;
    let mut gterm = xd;
    // f' and g'
    let mut fp = (xd * xd).div_f64(2.0);
    let mut fpterm = fp;
    let mut gp = DoubleDouble::from_f64(1.0);
    let mut gpterm = gp;

    for k in 0..200usize {
        let kf = k as f64;
        term = (term * x3).div_f64((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        gterm = (gterm * x3).div_f64((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        let k1 = kf + 1.0;
        fpterm = (fpterm * x3).div_f64(3.0 * k1 * (3.0 * k1 + 2.0));
        gpterm = (gpterm * x3).div_f64((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f = f + term;
        g = g + gterm;
        fp = fp + fpterm;
        gp = gp + gpterm;
        let small = |t: DoubleDouble, s: DoubleDouble| t.abs_f64() <= tiny * s.abs_f64().max(1e-300);
        if k > 2 && small(term, f) && small(gterm, g) && small(fpterm, fp) && small(gpterm, gp) {
            break;
        }
    }
    let ai = AI0 * f - MINUS_AIP0 * g;
    let aip = AI0 * fp - MINUS_AIP0 * gp;
    (ai.to_f64(), aip.to_f64())
}

/// Sum of `(-1)^k a_k T^{-k}` truncated before the smallest term grows again.
fn truncated_series(big_t: f64, coefficient: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut previous = f64::INFINITY;
    let mut power = 1.0;
    for k in 0..MAX_ASYMPTOTIC_TERMS {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * coefficient(k) * power;
        if term.abs() > previous {
            break;
        }
        sum += term;
        previous = term.abs();
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        power /= big_t;
    }
    sum
}

fn decaying_asymptotic(t: f64) -> (f64, f64) {
    let big_t = 2.0 / 3.0 * t.powf(1.5);
    let pref = 0.5 / PI.sqrt() * (-big_t).exp();
    let s = truncated_series(big_t, asymptotic_coefficient);
    let sd = truncated_series(big_t, |k| derivative_coefficient(k, asymptotic_coefficient(k)));
    (pref * t.powf(-0.25) * s, -pref * t.powf(0.25) * sd)
}

/// Ai(-z), Ai'(-z) for large positive z.
fn oscillatory_asymptotic(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    // Split c_k into even and odd orders, each in powers of zeta^{-2}.
    let even = |a: &dyn Fn(usize) -> f64| {
        let mut sum = 0.0;
        let mut previous = f64::INFINITY;
        let z2 = zeta * zeta;
        let mut power = 1.0;
        for k in 0..MAX_ASYMPTOTIC_TERMS / 2 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * a(2 * k) * power;
            if term.abs() > previous {
                break;
            }
            sum += term;
            previous = term.abs();
            power /= z2;
        }
        sum
    };
    let odd = |a: &dyn Fn(usize) -> f64| {
        let mut sum = 0.0;
        let mut previous = f64::INFINITY;
        let z2 = zeta * zeta;
        let mut power = 1.0 / zeta;
        for k in 0..MAX_ASYMPTOTIC_TERMS / 2 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * a(2 * k + 1) * power;
            if term.abs() > previous {
                break;
            }
            sum += term;
            previous = term.abs();
            power /= z2;
        }
        sum
    };
    let c = |k: usize| asymptotic_coefficient(k);
    let d = |k: usize| derivative_coefficient(k, asymptotic_coefficient(k));
    let (p, q) = (even(&c), odd(&c));
    let (r, s) = (even(&d), odd(&d));
    let phase = zeta + FRAC_PI_4;
    let (sn, cs) = phase.sin_cos();
    let ai = (sn * p - cs * q) / (PI.sqrt() * z.powf(0.25));
    let aip = -z.powf(0.25) / PI.sqrt() * (cs * r + sn * s);
    (ai, aip)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 30-digit evaluation.
    const TABLE: &[(f64, f64, f64)] = &[
        (-10.0, 0.040241238486443190689, 0.9962650441327900559),
        (-9.5, 0.31910324771912820138, -0.108095318811871239),
        (-7.3, 0.33577037051514727697, -0.18009580448329365985),
        (-4.2, 0.089210763239450717957, -0.78221560786245189744),
        (-2.0, 0.22740742820168557599, 0.61825902074169104141),
        (-1.0, 0.5355608832923521188, -0.010160567116645209395),
        (-0.5, 0.4757280916105395888, -0.20408167033954738614),
        (0.0, 0.35502805388781723926, -0.25881940379280679841),
        (0.3, 0.27880648195500492466, -0.24514636421905480437),
        (1.0, 0.13529241631288141552, -0.15914744129679321279),
        (2.5, 0.015725923380470489995, -0.026250881035903230365),
        (4.0, 0.00095156385120480187362, -0.0019586409502041789001),
        (5.0, 0.00010834442813607441735, -0.000247413890868462476),
        (6.0, 9.9476943602528895702e-6, -0.000024765200397034954754),
        (7.9, 6.2396400972839341797e-8, -1.7729958329430335231e-7),
        (8.0, 4.6922076160992316256e-8, -1.3414392979067865743e-7),
        (8.1, 3.5224356235735714843e-8, -1.0130972032660844188e-7),
        (10.0, 1.1047532552898685934e-10, -3.5206336767389236366e-10),
        (15.0, 2.164962520737992299e-18, -8.4205679540177727661e-18),
        (20.0, 1.6916728686705403136e-27, -7.5863916257483549605e-27),
        (25.0, 8.1160268246913866838e-38, -4.0660893372432810053e-37),
        (30.0, 3.2082175915504955711e-49, -1.7598765814327259821e-48),
        (-12.5, -0.27627456138116024823, -0.41933133041950516441),
        (-15.0, 0.27821749087082892953, 0.27237420430864202083),
        (-20.0, -0.17640612707798468959, 0.8928628567364712384),
    ];

    #[test]
    fn matches_reference_table() {
        for &(t, ai, aip) in TABLE {
            let rel = |a: f64, b: f64| ((a - b) / b).abs();
            assert!(rel(airy_ai(t), ai) < 1e-10, "Ai({t}) = {} vs {ai}", airy_ai(t));
            assert!(rel(airy_ai_prime(t), aip) < 1e-9, "Ai'({t}) = {} vs {aip}", airy_ai_prime(t));
        }
    }

    #[test]
    fn value_at_origin_is_closed_form() {
        assert!((airy_ai(0.0) - 0.3550280538878172).abs() < 1e-16);
    }

    #[test]
    fn asymptotic_series_agrees_at_ten_with_ten_terms() {
        let a = airy_ai_asymptotic(10.0, 10);
        assert!(((a - airy_ai(10.0)) / a).abs() < 1e-12);
    }

    #[test]
    fn regimes_agree_at_switch_point() {
        // Both expansions evaluated on either side of t = 8.
        for t in [7.99, 8.0, 8.01] {
            let m = maclaurin(t).0;
            let a = decaying_asymptotic(t).0;
            assert!(((m - a) / m).abs() < 1e-12, "t={t}: {m} vs {a}");
        }
        for z in [11.9, 12.0, 12.1] {
            let m = maclaurin(-z);
            let a = oscillatory_asymptotic(z);
            assert!((m.0 - a.0).abs() < 1e-12 && (m.1 - a.1).abs() < 1e-11);
        }
    }

    #[test]
    fn decays_monotonically_on_positive_axis() {
        let mut prev = airy_ai(0.0);
        for i in 1..=300 {
            let v = airy_ai(i as f64 * 0.1);
            assert!(v < prev && v > 0.0);
            prev = v;
        }
        assert!(airy_ai(20.0) < airy_ai(10.0));
    }

    #[test]
    fn first_coefficients() {
        assert_eq!(asymptotic_coefficient(0), 1.0);
        assert!((asymptotic_coefficient(1) - 5.0 / 72.0).abs() < 1e-16);
        assert!((asymptotic_coefficient(2) - 385.0 / 10368.0).abs() < 1e-16);
    }
}

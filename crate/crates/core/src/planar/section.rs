//! The continuous-spectrum threshold: the first Dirichlet eigenvalue of the
//! stretched cross-section `omega^H`.
//!
//! Two solvers are provided. `solve_cross_section` uses the same lattice as
//! the 3D waveguide grids, so its discretization bias matches theirs.
//! `threshold_channel` is the accurate one: the section is mapped to a strip
//! by `y = h(z) eta`, the transverse dependence is expanded in the sine
//! modes of the strip, and the `z` direction is discretized by linear finite
//! elements, which gives a banded generalized eigenproblem.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cross::residual_tolerance;
use crate::eigensolve::{assemble_laplacian, lanczos_smallest, smallest_generalized, BandedSym};
use crate::error::{Error, Result};
use crate::geometry::{CrossSection, CrossSectionProfile, Grid, ProfileKind, Sector, DEFAULT_NODE_BUDGET};
use crate::numerics::{loglog_fit, richardson, LineFit};
use crate::specfun::{solve_abs_linear, Parity};

const PI2: f64 = PI * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    Grid,
    Channel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub kind: ProfileKind,
    #[serde(rename = "H")]
    pub elongation: f64,
    pub alpha: f64,
    pub lambda_dagger: f64,
    /// Ground eigenvalue of the 1D model at coupling `pi^2`, when the kind
    /// has one.
    pub mu_dagger: Option<f64>,
    pub asymptotic_prediction: Option<f64>,
    pub method: ThresholdMethod,
    /// Grid spacings `(y, z)` for the lattice solver, `(dz, dz / 2)` for the
    /// channel solver.
    pub spacing: [f64; 2],
    /// Discretization error estimate (channel solver only).
    pub error_estimate: Option<f64>,
}

/// Ground eigenvalue of `-w'' + 4 pi^2 |zeta| w`, computed once.
pub fn mu_dagger_rhombus() -> Result<f64> {
    static CELL: OnceLock<f64> = OnceLock::new();
    if let Some(v) = CELL.get() {
        return Ok(*v);
    }
    let v = solve_abs_linear(PI2, 1, None)?.modes[0].eigenvalue;
    Ok(*CELL.get_or_init(|| v))
}

/// `mu_dagger` for the kinds with a model problem.
pub fn mu_dagger(kind: ProfileKind) -> Result<f64> {
    match kind {
        ProfileKind::Rhombus => mu_dagger_rhombus(),
        // Oscillator ground state 2 Lambda^{1/2} at Lambda = pi^2.
        ProfileKind::Ellipse => Ok(2.0 * PI),
        ProfileKind::CustomWidth => Err(Error::Unsupported(
            "custom width profiles have no closed-form threshold asymptotics".into(),
        )),
    }
}

/// `pi^2 + mu_dagger H^{-alpha}`.
pub fn cutoff_asymptotic(profile: &CrossSectionProfile) -> Result<f64> {
    let mu = mu_dagger(profile.kind)?;
    Ok(PI2 + mu * profile.elongation.powf(-profile.alpha()))
}

/// Default `z` spacing of the lattice solver: `spacing_y * max(1, H / 20)`.
pub fn default_z_spacing(profile: &CrossSectionProfile, spacing_y: f64) -> f64 {
    spacing_y * (profile.elongation / 20.0).max(1.0)
}

fn attach_prediction(profile: &CrossSectionProfile, mut r: ThresholdResult) -> ThresholdResult {
    r.mu_dagger = mu_dagger(profile.kind).ok();
    r.asymptotic_prediction = cutoff_asymptotic(profile).ok();
    r
}

fn lattice_threshold(profile: &CrossSectionProfile, spacing_y: f64, spacing_z: f64, upper_half: bool) -> Result<f64> {
    if !(spacing_y > 0.0 && spacing_z > 0.0) {
        return Err(Error::domain("section spacings must be positive"));
    }
    let region = CrossSection {
        profile: profile.clone(),
        upper_half,
    };
    let sector = Sector {
        flips: [Some(Parity::Even), if upper_half { None } else { Some(Parity::Even) }, None],
        swap: None,
    };
    let grid = Grid::build(&region, &[spacing_y, spacing_z], sector, DEFAULT_NODE_BUDGET).map_err(|e| match e {
        Error::Resource { what, required, budget } => Error::Resource {
            what: format!("{what} of the cross-section at H = {} (coarsen the spacing)", profile.elongation),
            required,
            budget,
        },
        other => other,
    })?;
    let op = assemble_laplacian(&grid)?;
    let pairs = lanczos_smallest(&op, 1, residual_tolerance(&op), 5)?;
    Ok(pairs.values[0])
}

/// Threshold on the lattice with `y` spacing `spacing` and the default
/// anisotropic `z` spacing.
pub fn solve_cross_section(profile: &CrossSectionProfile, spacing: f64) -> Result<ThresholdResult> {
    solve_cross_section_with(profile, spacing, default_z_spacing(profile, spacing))
}

pub fn solve_cross_section_with(profile: &CrossSectionProfile, spacing_y: f64, spacing_z: f64) -> Result<ThresholdResult> {
    if !(profile.elongation >= 1.0) {
        return Err(Error::domain(format!(
            "cross-section solves need H >= 1, got {}",
            profile.elongation
        )));
    }
    let lambda = lattice_threshold(profile, spacing_y, spacing_z, false)?;
    Ok(attach_prediction(
        profile,
        ThresholdResult {
            kind: profile.kind,
            elongation: profile.elongation,
            alpha: profile.alpha(),
            lambda_dagger: lambda,
            mu_dagger: None,
            asymptotic_prediction: None,
            method: ThresholdMethod::Grid,
            spacing: [spacing_y, spacing_z],
            error_estimate: None,
        },
    ))
}

/// First eigenvalue of the upper half-section `omega^H ∩ {z > 0}` on the lattice.
pub fn half_section_threshold(profile: &CrossSectionProfile, spacing_y: f64, spacing_z: f64) -> Result<f64> {
    lattice_threshold(profile, spacing_y, spacing_z, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelOptions {
    /// Number of transverse sine modes (odd wavenumbers 1, 3, 5, ...).
    pub channels: usize,
    /// Coarse element length; the solve is repeated at `dz / 2` and
    /// extrapolated.
    pub dz: f64,
    /// The strip is cut where the width drops below this value.
    pub min_width: f64,
    pub tolerance: f64,
}

impl Default for ChannelOptions {
    fn default() -> Self {
        Self {
            channels: 4,
            dz: 0.1,
            min_width: 0.05,
            tolerance: 1e-11,
        }
    }
}

/// Transverse coupling matrices of the even sine modes
/// `phi_m(eta) = sqrt(2) sin(m pi (eta + 1/2))`, `m` odd, on `(-1/2, 1/2)`:
/// `B_mn = int eta phi_m phi_n'` and `C_mn = int eta^2 phi_m' phi_n'`.
fn coupling_matrices(channels: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let wave: Vec<f64> = (0..channels).map(|i| (2 * i + 1) as f64 * PI).collect();
    let p: Vec<f64> = wave.iter().map(|k| k * k).collect();
    // Gauss-Legendre on many panels; the integrands are smooth.
    let (nodes, weights) = gauss_legendre(8);
    let panels = 64;
    let mut b = vec![0.0; channels * channels];
    let mut c = vec![0.0; channels * channels];
    for panel in 0..panels {
        let a = -0.5 + panel as f64 / panels as f64;
        let w = 1.0 / panels as f64;
        for (x, wx) in nodes.iter().zip(&weights) {
            let eta = a + 0.5 * w * (x + 1.0);
            let q = 0.5 * w * wx;
            let phi: Vec<f64> = wave.iter().map(|k| 2f64.sqrt() * (k * (eta + 0.5)).sin()).collect();
            let dphi: Vec<f64> = wave.iter().map(|k| 2f64.sqrt() * k * (k * (eta + 0.5)).cos()).collect();
            for m in 0..channels {
                for n in 0..channels {
                    b[m * channels + n] += q * eta * phi[m] * dphi[n];
                    c[m * channels + n] += q * eta * eta * dphi[m] * dphi[n];
                }
            }
        }
    }
    (p, b, c)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, t);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

/// Height where the width first drops below `min_width`.
fn channel_extent(profile: &CrossSectionProfile, min_width: f64) -> f64 {
    let hh = profile.half_height();
    let (mut lo, mut hi) = (0.0, hh);
    if profile.width_normalized(1.0) >= min_width {
        return hh;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if profile.width_normalized(mid / hh) >= min_width {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Ground eigenvalue of the channel pencil with elements of length `dz`
/// on `[0, Z]`: natural condition at `z = 0` (even ground state), Dirichlet
/// at `z = Z`.
fn channel_eigenvalue(profile: &CrossSectionProfile, channels: usize, dz: f64, min_width: f64, tol: f64) -> Result<f64> {
    let extent = channel_extent(profile, min_width);
    let elements = (extent / dz).floor() as usize;
    if elements < 2 {
        return Err(Error::domain("channel discretization needs at least two elements"));
    }
    let dz = extent / elements as f64;
    let (p, b, c) = coupling_matrices(channels);
    let m = channels;
    // Nodes 0..elements-1 are free; the last node is clamped.
    let dim = elements * m;
    let bw = 2 * m - 1;
    let mut ka = BandedSym::zeros(dim, bw);
    let mut mb = BandedSym::zeros(dim, bw);
    let (gx, gw) = gauss_legendre(4);
    for e in 0..elements {
        let (z0, z1) = (e as f64 * dz, (e + 1) as f64 * dz);
        for (x, wx) in gx.iter().zip(&gw) {
            let z = 0.5 * (z0 + z1) + 0.5 * dz * x;
            let q = 0.5 * dz * wx;
            let h = profile.width(z)?;
            let hp = profile.width_derivative(z)?;
            let shape = [(z1 - z) / dz, (z - z0) / dz];
            let dshape = [-1.0 / dz, 1.0 / dz];
            for a in 0..2 {
                for bb in 0..2 {
                    let (na, nb) = (e + a, e + bb);
                    if na >= elements || nb >= elements {
                        continue;
                    }
                    for i in 0..m {
                        for j in 0..m {
                            let (r, s) = (na * m + i, nb * m + j);
                            if r < s {
                                continue;
                            }
                            let mut kv = -hp
                                * (dshape[a] * shape[bb] * b[i * m + j] + shape[a] * dshape[bb] * b[j * m + i])
                                + hp * hp / h * shape[a] * shape[bb] * c[i * m + j];
                            if i == j {
                                kv += shape[a] * shape[bb] * p[i] / h + h * dshape[a] * dshape[bb];
                                mb.add(r, s, q * h * shape[a] * shape[bb])?;
                            }
                            // Off-diagonal node pairs appear twice in the loop,
                            // once per ordering; keep only the lower one.
                            ka.add(r, s, q * kv)?;
                        }
                    }
                }
            }
        }
    }
    let upper = {
        let mut u = 2.0 * p[0] / profile.width(0.0)?.powi(2);
        while ka.negative_count(&mb, u) < 1 {
            u *= 2.0;
        }
        u
    };
    Ok(smallest_generalized(&ka, &mb, 1, 0.0, upper, tol)?[0])
}

/// Threshold from the channel solver, extrapolated in the element length.
pub fn threshold_channel(profile: &CrossSectionProfile, opts: &ChannelOptions) -> Result<ThresholdResult> {
    if opts.channels == 0 || !(opts.dz > 0.0) {
        return Err(Error::domain("channel solver needs at least one channel and dz > 0"));
    }
    let dz = opts.dz.min(profile.half_height() / 8.0);
    let coarse = channel_eigenvalue(profile, opts.channels, dz, opts.min_width, opts.tolerance)?;
    let fine = channel_eigenvalue(profile, opts.channels, 0.5 * dz, opts.min_width, opts.tolerance)?;
    let lambda = richardson(&[dz, 0.5 * dz], &[coarse, fine], &[2.0])?;
    let fewer = if opts.channels > 1 {
        let c = channel_eigenvalue(profile, opts.channels - 1, 0.5 * dz, opts.min_width, opts.tolerance)?;
        (c - fine).abs()
    } else {
        0.0
    };
    Ok(attach_prediction(
        profile,
        ThresholdResult {
            kind: profile.kind,
            elongation: profile.elongation,
            alpha: profile.alpha(),
            lambda_dagger: lambda,
            mu_dagger: None,
            asymptotic_prediction: None,
            method: ThresholdMethod::Channel,
            spacing: [dz, 0.5 * dz],
            error_estimate: Some((lambda - fine).abs() + fewer),
        },
    ))
}

/// One row of a threshold sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: ThresholdResult,
    /// `(lambda_dagger - prediction) / H^{-2 alpha}`.
    pub residual_scaled: Option<f64>,
}

/// Fit of `lambda_dagger - pi^2` against `H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFit {
    /// Log-log fit; its slope is compared with `-alpha`.
    pub loglog: LineFit,
    /// `C` in the two-term model `C H^{-alpha} + D H^{-2 alpha}` fitted by
    /// least squares, compared with `mu_dagger`.
    pub prefactor: f64,
    pub correction: f64,
}

pub fn threshold_sweep(profile: &CrossSectionProfile, elongations: &[f64], opts: &ChannelOptions) -> Result<Vec<SweepRow>> {
    elongations
        .par_iter()
        .map(|&h| {
            let p = profile.with_elongation(h)?;
            let t = threshold_channel(&p, opts)?;
            let alpha = p.alpha();
            let residual_scaled = t
                .asymptotic_prediction
                .map(|pred| (t.lambda_dagger - pred) / h.powf(-2.0 * alpha));
            Ok(SweepRow {
                threshold: t,
                residual_scaled,
            })
        })
        .collect()
}

pub fn fit_threshold(rows: &[SweepRow], alpha: f64) -> Result<ThresholdFit> {
    let hs: Vec<f64> = rows.iter().map(|r| r.threshold.elongation).collect();
    let gaps: Vec<f64> = rows.iter().map(|r| r.threshold.lambda_dagger - PI2).collect();
    let loglog = loglog_fit(&hs, &gaps)?;
    // Normal equations for gap = C x + D x^2 with x = H^{-alpha}.
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (h, g) in hs.iter().zip(&gaps) {
        let x = h.powf(-alpha);
        s11 += x * x;
        s12 += x * x * x;
        s22 += x * x * x * x;
        t1 += g * x;
        t2 += g * x * x;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() < 1e-300 {
        return Err(Error::domain("threshold fit needs at least two distinct H"));
    }
    Ok(ThresholdFit {
        loglog,
        prefactor: (t1 * s22 - t2 * s12) / det,
        correction: (s11 * t2 - s12 * t1) / det,
    })
}

/// CSV with columns `kind,H,lambda_dagger,prediction,residual_scaled`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "kind,H,lambda_dagger,prediction,residual_scaled")?;
    for r in rows {
        let t = &r.threshold;
        let fmt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.12e}"));
        writeln!(
            out,
            "{},{},{:.12e},{},{}",
            t.kind,
            t.elongation,
            t.lambda_dagger,
            fmt(t.asymptotic_prediction),
            fmt(r.residual_scaled)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(4);
        let integral: f64 = x.iter().zip(&w).map(|(t, q)| q * t.powi(6)).sum();
        assert!((integral - 2.0 / 7.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ellipse_prediction_at_h_400() {
        let p = CrossSectionProfile::ellipse(400.0).unwrap();
        let v = cutoff_asymptotic(&p).unwrap();
        assert!((v - (PI2 + 2.0 * PI / 20.0)).abs() < 1e-12);
    }

    #[test]
    fn rhombus_prediction_uses_airy_ground_state() {
        let p = CrossSectionProfile::rhombus(1000.0).unwrap();
        let mu = mu_dagger_rhombus().unwrap();
        assert!((mu - 11.8126).abs() < 1e-3);
        assert!((cutoff_asymptotic(&p).unwrap() - (PI2 + mu * 1e-2)).abs() < 1e-12);
    }

    #[test]
    fn custom_profiles_have_no_prediction() {
        let t = crate::geometry::WidthTable::new(vec![0.0, 1.0], vec![1.0, 0.0], 0.5).unwrap();
        let p = CrossSectionProfile::custom(t, 10.0).unwrap();
        assert!(matches!(cutoff_asymptotic(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn prediction_decreases_towards_pi_squared() {
        for kind in [ProfileKind::Rhombus, ProfileKind::Ellipse] {
            let mut last = f64::INFINITY;
            for h in [10.0, 100.0, 1e3, 1e4] {
                let v = cutoff_asymptotic(&CrossSectionProfile::new(kind, h).unwrap()).unwrap();
                assert!(v > PI2 && v < last);
                last = v;
            }
        }
    }

    #[test]
    fn rhombus_at_unit_elongation_is_a_rotated_square() {
        // |y| + |z| < 1/2 is a square of side 1/sqrt(2): 2 pi^2 / (1/2) = 4 pi^2.
        let p = CrossSectionProfile::rhombus(1.0).unwrap();
        let coarse = solve_cross_section(&p, 1.0 / 32.0).unwrap().lambda_dagger;
        let fine = solve_cross_section(&p, 1.0 / 64.0).unwrap().lambda_dagger;
        let extrapolated = 2.0 * fine - coarse;
        assert!((extrapolated - 4.0 * PI2).abs() / (4.0 * PI2) < 5e-3, "{coarse} {fine}");
    }

    #[test]
    fn channel_solver_converges_to_the_asymptotic_regime() {
        let p = CrossSectionProfile::rhombus(100.0).unwrap();
        let t = threshold_channel(&p, &ChannelOptions::default()).unwrap();
        assert!(t.lambda_dagger > PI2);
        assert!(t.error_estimate.unwrap() < 1e-4, "{t:?}");
        let pred = t.asymptotic_prediction.unwrap();
        assert!((t.lambda_dagger - pred).abs() < 0.1 * (pred - PI2));
    }

    #[test]
    fn threshold_decreases_with_elongation() {
        let opts = ChannelOptions::default();
        let rows = threshold_sweep(&CrossSectionProfile::ellipse(1.0).unwrap(), &[20.0, 40.0, 80.0], &opts).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].threshold.lambda_dagger < w[0].threshold.lambda_dagger);
        }
    }
}

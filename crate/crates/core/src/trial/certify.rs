//! Upper bounds from the max-min principle and the sweep over `H`.
//!
//! The largest Rayleigh quotient over the span of the first `n` trial
//! functions is the `n`-th eigenvalue `theta_n` of the pencil `(K, M)`, so
//! the `n`-th eigenvalue of the waveguide is at most `theta_n`. Every
//! `theta_n` below the threshold certifies one eigenvalue of the discrete
//! spectrum.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::TrialFamily;
use super::gram::{gram_pair, GramPair, QuadratureSpec};
use crate::eigensolve::generalized_small_pencil;
use crate::error::{Error, Result};
use crate::geometry::CrossSectionProfile;
use crate::planar::{threshold_channel, ChannelOptions, PlanarCrossSolution};

const PI2: f64 = PI * PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxMinCertificate {
    #[serde(rename = "H")]
    pub elongation: f64,
    pub count: usize,
    /// Pencil eigenvalues, ascending.
    pub theta: Vec<f64>,
    pub lambda_dagger: f64,
    /// Number of `theta_n < lambda_dagger`.
    pub certified_count: usize,
    /// `Lambda_Pi + mu_n H^{-alpha}`.
    pub predicted: Vec<f64>,
}

/// Certificate from a Gram pair; `mu` are the 1D model eigenvalues used for
/// the prediction.
pub fn maxmin_certificate(gram: &GramPair, lambda_dagger: f64, mu: &[f64], alpha: f64) -> Result<MaxMinCertificate> {
    let theta = generalized_small_pencil(&gram.stiffness_matrix(), &gram.mass_matrix()).map_err(|e| match e {
        Error::NotPositiveDefinite(m) => Error::NotPositiveDefinite(format!(
            "{m} at H = {}; increase H",
            gram.elongation
        )),
        other => other,
    })?;
    let certified_count = theta.iter().filter(|&&t| t < lambda_dagger).count();
    let scale = gram.elongation.powf(-alpha);
    Ok(MaxMinCertificate {
        elongation: gram.elongation,
        count: theta.len(),
        predicted: mu.iter().map(|m| gram.lambda_pi + m * scale).collect(),
        theta,
        lambda_dagger,
        certified_count,
    })
}

/// `Lambda_Pi` with its error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaPi {
    pub value: f64,
    pub error_bar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub quadrature: QuadratureSpec,
    pub channel: ChannelOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureSpec::default(),
            channel: ChannelOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Row {
    pub certificate: MaxMinCertificate,
    pub gram: GramPair,
    /// `theta` recomputed at `Lambda_Pi -+ error_bar`.
    pub theta_low: Vec<f64>,
    pub theta_high: Vec<f64>,
    pub lambda_dagger_asymptotic: Option<f64>,
    /// `(theta_n - Lambda_Pi) H^alpha`.
    pub scaled_gaps: Vec<f64>,
    /// Whether the certified rows satisfy `theta_n < pi^2 < lambda_dagger`.
    pub chain_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Table {
    pub profile: CrossSectionProfile,
    pub lambda_pi: LambdaPi,
    pub count: usize,
    pub mu: Vec<f64>,
    pub rows: Vec<Theorem1Row>,
    /// `empirical_h[n - 1]`: smallest swept `H` certifying `n` eigenvalues.
    pub empirical_h: Vec<Option<f64>>,
    /// `max_n (theta_n - Lambda_Pi) H^alpha` over certified rows, per `N`.
    pub empirical_c: Vec<Option<f64>>,
}

fn thetas(profile: &CrossSectionProfile, count: usize, lambda: f64, planar: &Arc<PlanarCrossSolution>, spec: &QuadratureSpec) -> Result<(TrialFamily, GramPair, Vec<f64>)> {
    let fam = TrialFamily::new(profile, count, lambda, planar.clone())?;
    let g = gram_pair(&fam, spec)?;
    let t = generalized_small_pencil(&g.stiffness_matrix(), &g.mass_matrix())?;
    Ok((fam, g, t))
}

/// Sweeps `H` for a fixed profile kind and family size.
pub fn theorem1_sweep(
    profile: &CrossSectionProfile,
    count: usize,
    elongations: &[f64],
    lambda_pi: LambdaPi,
    planar: Arc<PlanarCrossSolution>,
    opts: &SweepOptions,
) -> Result<Theorem1Table> {
    if count == 0 || elongations.is_empty() {
        return Err(Error::domain("sweep needs N >= 1 and at least one H"));
    }
    let rows: Vec<Theorem1Row> = elongations
        .par_iter()
        .map(|&h| -> Result<Theorem1Row> {
            let p = profile.with_elongation(h)?;
            let threshold = threshold_channel(&p, &opts.channel)?;
            let (fam, gram, _) = thetas(&p, count, lambda_pi.value, &planar, &opts.quadrature)?;
            let mu = fam.modes.eigenvalues();
            let certificate = maxmin_certificate(&gram, threshold.lambda_dagger, &mu, fam.alpha)?;
            let (_, _, theta_low) = thetas(&p, count, lambda_pi.value - lambda_pi.error_bar, &planar, &opts.quadrature)?;
            let (_, _, theta_high) = thetas(&p, count, lambda_pi.value + lambda_pi.error_bar, &planar, &opts.quadrature)?;
            let scale = h.powf(fam.alpha);
            let scaled_gaps = certificate.theta.iter().map(|t| (t - lambda_pi.value) * scale).collect();
            let n = certificate.certified_count;
            let chain_holds = n == 0
                || (certificate.theta[..n].iter().all(|&t| t < PI2) && PI2 < threshold.lambda_dagger);
            Ok(Theorem1Row {
                certificate,
                gram,
                theta_low,
                theta_high,
                lambda_dagger_asymptotic: threshold.asymptotic_prediction,
                scaled_gaps,
                chain_holds,
            })
        })
        .collect::<Result<_>>()?;
    let mu = specfun_mu(profile, count, lambda_pi.value)?;
    let mut empirical_h = Vec::with_capacity(count);
    let mut empirical_c = Vec::with_capacity(count);
    for n in 1..=count {
        let certified: Vec<&Theorem1Row> = rows.iter().filter(|r| r.certificate.certified_count >= n).collect();
        empirical_h.push(
            certified
                .iter()
                .map(|r| r.certificate.elongation)
                .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |x| x.min(v)))),
        );
        empirical_c.push(
            certified
                .iter()
                .map(|r| r.scaled_gaps[..n].iter().copied().fold(f64::MIN, f64::max))
                .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |x| x.max(v)))),
        );
    }
    Ok(Theorem1Table {
        profile: profile.clone(),
        lambda_pi,
        count,
        mu,
        rows,
        empirical_h,
        empirical_c,
    })
}

fn specfun_mu(profile: &CrossSectionProfile, count: usize, lambda: f64) -> Result<Vec<f64>> {
    let kind = super::family::model_potential(profile.kind)?;
    Ok(crate::specfun::modes::solve(kind, lambda, count, None)?.eigenvalues())
}

/// CSV with columns
/// `profile,H,n,theta_n,predicted_LamH,lambda_dagger_numeric,lambda_dagger_asymptotic,certified`.
pub fn write_theorem1_csv<W: Write>(table: &Theorem1Table, mut out: W) -> Result<()> {
    writeln!(
        out,
        "profile,H,n,theta_n,predicted_LamH,lambda_dagger_numeric,lambda_dagger_asymptotic,certified"
    )?;
    let first = crate::trial::family::model_potential(table.profile.kind)?.first_index();
    for r in &table.rows {
        let c = &r.certificate;
        for (i, t) in c.theta.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{:.12e},{:.12e},{:.12e},{},{}",
                table.profile.kind,
                c.elongation,
                first + i,
                t,
                c.predicted[i],
                c.lambda_dagger,
                r.lambda_dagger_asymptotic.map_or_else(String::new, |v| format!("{v:.12e}")),
                *t < c.lambda_dagger
            )?;
        }
    }
    Ok(())
}

//! Trial functions `Phi_n = H^{-alpha/4} chi_H(zeta) w_n(zeta) U(y / h(z))`
//! with `zeta = H^{-alpha/2} z`, `chi_H(zeta) = chi(2 H^{-alpha} zeta)` and
//! `y = (x1, x2)`.

use std::sync::Arc;

use rayon::prelude::*;

use super::cutoff::{chi, chi_prime};
use crate::error::{Error, Result};
use crate::geometry::{CrossSectionProfile, ProfileKind};
use crate::planar::PlanarCrossSolution;
use crate::specfun::{self, Mode1D, ModeFamily1D, PotentialKind};

#[derive(Debug, Clone)]
pub struct TrialFamily {
    pub profile: CrossSectionProfile,
    pub lambda_pi: f64,
    pub modes: ModeFamily1D,
    pub planar: Arc<PlanarCrossSolution>,
    pub alpha: f64,
}

/// Potential of the 1D model attached to a profile kind.
pub fn model_potential(kind: ProfileKind) -> Result<PotentialKind> {
    match kind {
        ProfileKind::Rhombus => Ok(PotentialKind::AbsLinear),
        ProfileKind::Ellipse => Ok(PotentialKind::Quadratic),
        ProfileKind::CustomWidth => Err(Error::Unsupported(
            "trial families are defined for rhombus and ellipse profiles".into(),
        )),
    }
}

impl TrialFamily {
    /// Family of `count` trial functions with modes at coupling `lambda_pi`.
    pub fn new(profile: &CrossSectionProfile, count: usize, lambda_pi: f64, planar: Arc<PlanarCrossSolution>) -> Result<Self> {
        let kind = model_potential(profile.kind)?;
        if !(lambda_pi > 0.0) {
            return Err(Error::domain(format!("Lambda_Pi must be positive, got {lambda_pi}")));
        }
        let modes = specfun::modes::solve(kind, lambda_pi, count, None)?;
        Ok(Self {
            profile: profile.clone(),
            lambda_pi,
            modes,
            planar,
            alpha: profile.alpha(),
        })
    }

    pub fn len(&self) -> usize {
        self.modes.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.modes.is_empty()
    }

    pub fn elongation(&self) -> f64 {
        self.profile.elongation
    }

    /// Mode by position `0..len()` in the family.
    pub fn mode(&self, position: usize) -> &Mode1D {
        &self.modes.modes[position]
    }

    /// Half-width `H^alpha / 4` of the support of `chi_H` in `zeta`.
    pub fn support(&self) -> f64 {
        0.25 * self.elongation().powf(self.alpha)
    }

    /// `zeta -> z` scale `H^{alpha/2}`.
    pub fn z_scale(&self) -> f64 {
        self.elongation().powf(0.5 * self.alpha)
    }

    /// `chi_H(zeta)` and its `zeta` derivative.
    pub fn cutoff(&self, zeta: f64) -> (f64, f64) {
        let s = 2.0 * self.elongation().powf(-self.alpha);
        (chi(s * zeta), s * chi_prime(s * zeta))
    }

    /// `Phi_n(x)` for the mode at `position` in the family. Points of the
    /// closed waveguide are accepted; anything else is a domain error.
    pub fn evaluate(&self, position: usize, x: [f64; 3]) -> Result<f64> {
        if position >= self.len() {
            return Err(Error::domain(format!("trial index {position} beyond family of {}", self.len())));
        }
        let [x1, x2, z] = x;
        let hh = self.profile.half_height();
        if !(z.abs() <= hh) {
            return Err(Error::domain(format!("point {x:?} lies outside the waveguide (|z| > H/2)")));
        }
        let h = self.profile.width(z)?;
        if x1.abs().min(x2.abs()) > 0.5 * h * (1.0 + 1e-12) {
            return Err(Error::domain(format!("point {x:?} lies outside the waveguide")));
        }
        Ok(self.evaluate_unchecked(position, x, h))
    }

    pub(crate) fn evaluate_unchecked(&self, position: usize, x: [f64; 3], width: f64) -> f64 {
        if width <= 0.0 {
            return 0.0;
        }
        let zeta = x[2] / self.z_scale();
        let (c, _) = self.cutoff(zeta);
        if c == 0.0 {
            return 0.0;
        }
        let w = self.mode(position).value(zeta);
        self.elongation().powf(-0.25 * self.alpha) * c * w * self.planar.eval(x[0] / width, x[1] / width)
    }
}

/// `(Phi_j, Phi_k)` by brute-force midpoint quadrature over the waveguide
/// in physical coordinates, cells of size `dy` across and `dz` along `z`.
/// Independent of the 1D reduction used by the Gram assembly.
pub fn mass_entry_3d(family: &TrialFamily, j: usize, k: usize, dy: f64, dz: f64) -> Result<f64> {
    if j >= family.len() || k >= family.len() {
        return Err(Error::domain("trial index out of range"));
    }
    if family.mode(j).parity != family.mode(k).parity {
        return Ok(0.0);
    }
    let tail = family.planar.tail;
    // Far enough along the arms for the tail to drop below 1e-16 of its start.
    let reach = tail.start + 37.0 / tail.rate;
    let zmax = (family.support() * family.z_scale()).min(family.profile.half_height());
    let nz = (zmax / dz).ceil() as usize;
    let dz = zmax / nz as f64;
    let ny = (reach / dy).ceil() as usize;
    let dy = reach / ny as f64;
    // The integrand is even in x1, x2 and z: integrate one octant.
    let slices: Vec<f64> = (0..nz)
        .into_par_iter()
        .map(|iz| {
            let z = (iz as f64 + 0.5) * dz;
            let h = family.profile.width(z).unwrap_or(0.0);
            if h <= 0.0 {
                return 0.0;
            }
            let mut acc = 0.0;
            for i1 in 0..ny {
                let x1 = (i1 as f64 + 0.5) * dy;
                for i2 in 0..ny {
                    let x2 = (i2 as f64 + 0.5) * dy;
                    if x1.min(x2) >= 0.5 * h {
                        continue;
                    }
                    let p = [x1, x2, z];
                    acc += family.evaluate_unchecked(j, p, h) * family.evaluate_unchecked(k, p, h);
                }
            }
            acc
        })
        .collect();
    Ok(8.0 * slices.iter().sum::<f64>() * dy * dy * dz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::solve_planar_cross;
    use std::sync::OnceLock;

    pub(crate) fn planar() -> Arc<PlanarCrossSolution> {
        static CELL: OnceLock<Arc<PlanarCrossSolution>> = OnceLock::new();
        CELL.get_or_init(|| Arc::new(solve_planar_cross(4.0, 1.0 / 16.0).unwrap())).clone()
    }

    fn family(h: f64) -> TrialFamily {
        let p = planar();
        TrialFamily::new(&CrossSectionProfile::rhombus(h).unwrap(), 3, p.lambda, p).unwrap()
    }

    #[test]
    fn vanishes_outside_the_cutoff_support() {
        let f = family(64.0);
        // support in z is H^{alpha/2} * H^alpha / 4 = H / 4 for the rhombus.
        let z = 64.0 / 4.0 + 0.1;
        assert_eq!(f.evaluate(0, [0.0, 0.0, z]).unwrap(), 0.0);
    }

    #[test]
    fn vanishes_on_the_lateral_boundary() {
        let f = family(64.0);
        let z = 1.3;
        let h = f.profile.width(z).unwrap();
        assert_eq!(f.evaluate(0, [3.0, 0.5 * h, z]).unwrap(), 0.0);
        assert!(f.evaluate(0, [3.0, 0.51 * h + 0.01, z]).is_err());
    }

    #[test]
    fn central_plane_reduces_to_product() {
        let f = family(64.0);
        let y = [0.21, -0.13];
        let got = f.evaluate(0, [y[0], y[1], 0.0]).unwrap();
        let expect = 64f64.powf(-f.alpha / 4.0) * f.mode(0).value(0.0) * f.planar.eval(y[0], y[1]);
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn custom_profiles_are_rejected() {
        let t = crate::geometry::WidthTable::new(vec![0.0, 1.0], vec![1.0, 0.0], 0.5).unwrap();
        let p = CrossSectionProfile::custom(t, 10.0).unwrap();
        assert!(matches!(
            TrialFamily::new(&p, 2, 6.5, planar()),
            Err(Error::Unsupported(_))
        ));
    }
}

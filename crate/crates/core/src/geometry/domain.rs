//! Open regions that can be sampled on a lattice.

use serde::{Deserialize, Serialize};

use super::profile::CrossSectionProfile;
use super::sector::Sector;
use crate::error::{Error, Result};

/// An open set in 2D or 3D with a bounding box.
pub trait Region: Sync {
    fn dims(&self) -> usize;
    /// `(lower, upper)` corners of a box containing the region.
    fn bounds(&self) -> (Vec<f64>, Vec<f64>);
    fn contains(&self, x: &[f64]) -> bool;
}

/// Axis-aligned open box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || !(2..=3).contains(&lower.len()) {
            return Err(Error::domain("box corners must both be 2D or both 3D"));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(b > a)) {
            return Err(Error::domain("box upper corner must exceed the lower corner"));
        }
        Ok(Self { lower, upper })
    }
}

impl Region for BoxRegion {
    fn dims(&self) -> usize {
        self.lower.len()
    }
    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (self.lower.clone(), self.upper.clone())
    }
    fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (a, b))| *v > *a && *v < *b)
    }
}

/// Two crossing strips of unit width, `|x1| < 1/2` or `|x2| < 1/2`, with
/// arms cut at `|x_k| = L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarCross {
    pub arm_halflength: f64,
}

impl Region for PlanarCross {
    fn dims(&self) -> usize {
        2
    }
    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let l = self.arm_halflength;
        (vec![-l, -l], vec![l, l])
    }
    fn contains(&self, x: &[f64]) -> bool {
        let l = self.arm_halflength;
        x[0].abs() < l && x[1].abs() < l && (x[0].abs() < 0.5 || x[1].abs() < 0.5)
    }
}

/// The stretched cross-section in coordinates `(y, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub profile: CrossSectionProfile,
    /// Restrict to `z > 0` (the upper half section).
    pub upper_half: bool,
}

impl Region for CrossSection {
    fn dims(&self) -> usize {
        2
    }
    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let hh = self.profile.half_height();
        (vec![-0.5, if self.upper_half { 0.0 } else { -hh }], vec![0.5, hh])
    }
    fn contains(&self, x: &[f64]) -> bool {
        (!self.upper_half || x[1] > 0.0) && self.profile.section_contains(x[0], x[1])
    }
}

/// Union of the cylinders `{(x2, x3) in omega^H}` and `{(x1, x3) in omega^H}`,
/// with arms truncated at `|x1|, |x2| < L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CruciformDomain {
    pub profile: CrossSectionProfile,
    pub arm_halflength: f64,
    pub sector: Sector,
}

pub const DEFAULT_ARM_HALFLENGTH: f64 = 6.0;

impl CruciformDomain {
    pub fn new(profile: CrossSectionProfile, arm_halflength: f64, sector: Sector) -> Result<Self> {
        if !(arm_halflength > 0.5) {
            return Err(Error::domain(format!(
                "arm half-length must exceed 1/2, got {arm_halflength}"
            )));
        }
        Ok(Self {
            profile,
            arm_halflength,
            sector: sector.validated()?,
        })
    }

    /// Membership in the truncated waveguide; the odd-in-`z` sectors also
    /// exclude the plane `z = 0`, where they carry a Dirichlet condition.
    pub fn contains(&self, x: &[f64; 3]) -> bool {
        if self.sector.flips[2] == Some(crate::specfun::Parity::Odd) && x[2] == 0.0 {
            return false;
        }
        Region::contains(self, x)
    }
}

impl Region for CruciformDomain {
    fn dims(&self) -> usize {
        3
    }
    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let l = self.arm_halflength;
        let hh = self.profile.half_height();
        (vec![-l, -l, -hh], vec![l, l, hh])
    }
    fn contains(&self, x: &[f64]) -> bool {
        let l = self.arm_halflength;
        if !(x[0].abs() < l && x[1].abs() < l) {
            return false;
        }
        self.profile.section_contains(x[1], x[2]) || self.profile.section_contains(x[0], x[2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rhombus_domain(h: f64) -> CruciformDomain {
        CruciformDomain::new(CrossSectionProfile::rhombus(h).unwrap(), 6.0, Sector::FULL).unwrap()
    }

    #[test]
    fn membership_examples() {
        let d = rhombus_domain(10.0);
        assert!(d.contains(&[0.0, 0.0, 0.0]));
        assert!(!d.contains(&[0.0, 0.0, 10.0 * 0.51]));
        assert!(!d.contains(&[7.0, 0.0, 0.0]));
        assert!(d.contains(&[5.0, 0.2, 1.0]));
        assert!(!d.contains(&[5.0, 0.45, 1.0]));
        let odd = CruciformDomain::new(CrossSectionProfile::rhombus(10.0).unwrap(), 6.0, Sector::odd_z()).unwrap();
        assert!(!odd.contains(&[0.0, 0.0, 0.0]));
    }

    #[test]
    fn planar_cross_membership() {
        let c = PlanarCross { arm_halflength: 6.0 };
        assert!(c.contains(&[5.0, 0.1]));
        assert!(!c.contains(&[1.0, 1.0]));
        assert!(!c.contains(&[6.0, 0.0]));
    }

    proptest! {
        #[test]
        fn membership_is_symmetric(x in -7.0f64..7.0, y in -7.0f64..7.0, z in -6.0f64..6.0, h in 1.0f64..12.0) {
            let d = rhombus_domain(h);
            let e = CruciformDomain::new(CrossSectionProfile::ellipse(h).unwrap(), 6.0, Sector::FULL).unwrap();
            for dom in [&d, &e] {
                let v = dom.contains(&[x, y, z]);
                prop_assert_eq!(v, dom.contains(&[y, x, z]));
                prop_assert_eq!(v, dom.contains(&[x, y, -z]));
                prop_assert_eq!(v, dom.contains(&[-x, y, z]));
            }
        }
    }
}

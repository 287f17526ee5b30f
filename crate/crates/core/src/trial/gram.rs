//! Mass and stiffness Gram matrices of a trial family by reduction to 1D
//! integrals in `zeta`.
//!
//! With `U^H(y, z) = U(y / h(z))` and `int U^2 = 1`, the section integrals
//! are `int |U^H|^2 = h^2`, `int |grad_y U^H|^2 = Lambda_Pi`,
//! `int U^H d_z U^H = -c h h'` and `int |d_z U^H|^2 = m2 h'^2`, where
//! `c = int U (y . grad U)` and `m2 = int |y . grad U|^2`. Then
//!
//! ```text
//! M_jk  = int chi^2 w_j w_k h^2
//! K_jk  = I1 + J1 + J2 + J3 + J3^T
//! I1_jk = Lambda_Pi int chi^2 w_j w_k
//! J1_jk = H^{-alpha} int (chi w_j)' (chi w_k)' h^2
//! J2_jk = m2 int chi^2 w_j w_k h'^2
//! J3_jk = -c H^{-alpha/2} int (chi w_j)' chi w_k h h'
//! ```
//!
//! with `h`, `h'` evaluated at `z = H^{alpha/2} zeta`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::TrialFamily;
use crate::error::{Error, Result};
use crate::planar::section::gauss_legendre;

/// Quadrature on panels aligned with the mode grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss-Legendre points per mode-grid cell.
    pub points_per_cell: usize,
    /// Integration half-window in `zeta`; defaults to the cut-off support.
    pub window: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            points_per_cell: 6,
            window: None,
        }
    }
}

/// The terms of the stiffness matrix, reported separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StiffnessTerms {
    pub i1: Vec<Vec<f64>>,
    pub j1: Vec<Vec<f64>>,
    pub j2: Vec<Vec<f64>>,
    pub j3: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramPair {
    #[serde(rename = "H")]
    pub elongation: f64,
    pub lambda_pi: f64,
    pub mass: Vec<Vec<f64>>,
    pub stiffness: Vec<Vec<f64>>,
    pub terms: StiffnessTerms,
    /// `max |M - I|`.
    pub mass_deviation: f64,
    /// `max |K - Lambda_Pi I|`.
    pub stiffness_deviation: f64,
}

impl GramPair {
    pub fn mass_matrix(&self) -> DMatrix<f64> {
        to_matrix(&self.mass)
    }

    pub fn stiffness_matrix(&self) -> DMatrix<f64> {
        to_matrix(&self.stiffness)
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }
}

fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Samples of everything the integrands need at one quadrature node.
struct Node {
    weight: f64,
    /// `(chi w_n, (chi w_n)')` for each mode.
    fields: Vec<(f64, f64)>,
    h: f64,
    hp: f64,
}

fn nodes(family: &TrialFamily, spec: &QuadratureSpec) -> Result<Vec<Node>> {
    let support = family.support();
    let window = match spec.window {
        Some(w) if w < support => {
            return Err(Error::domain(format!(
                "quadrature window {w} is smaller than the cut-off support {support}"
            )))
        }
        Some(w) => w,
        None => support,
    };
    // Modes vanish identically beyond their grid, the cut-off beyond its support.
    let reach = window.min(support).min(family.modes.grid.half_width);
    let cell = family.modes.grid.spacing;
    let cells = (reach / cell).ceil() as usize;
    let (gx, gw) = gauss_legendre(spec.points_per_cell.max(2));
    let scale = family.z_scale();
    let mut out = Vec::with_capacity(2 * cells * gx.len());
    // Panels are symmetric about 0 so that odd integrands cancel.
    for side in [-1.0, 1.0] {
        for c in 0..cells {
            let a = c as f64 * cell;
            let b = ((c + 1) as f64 * cell).min(reach);
            if b <= a {
                continue;
            }
            for (x, w) in gx.iter().zip(&gw) {
                let zeta = side * (0.5 * (a + b) + 0.5 * (b - a) * x);
                let (cut, dcut) = family.cutoff(zeta);
                let z = scale * zeta;
                let h = family.profile.width(z)?;
                let hp = family.profile.width_derivative(z)?;
                let fields = family
                    .modes
                    .modes
                    .iter()
                    .map(|m| {
                        let (v, d) = m.eval(zeta);
                        (cut * v, dcut * v + cut * d)
                    })
                    .collect();
                out.push(Node {
                    weight: 0.5 * (b - a) * w,
                    fields,
                    h,
                    hp,
                });
            }
        }
    }
    Ok(out)
}

fn assemble(family: &TrialFamily, spec: &QuadratureSpec) -> Result<GramPair> {
    let n = family.len();
    let nodes = nodes(family, spec)?;
    let hh = family.elongation();
    let alpha = family.alpha;
    let moments = family.planar.moments;
    // Normalize the moments by the computed mass of U.
    let c = moments.dilation / moments.mass;
    let m2 = moments.dilation_squared / moments.mass;
    let lam = family.lambda_pi;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect();
    let entries: Vec<[f64; 6]> = pairs
        .par_iter()
        .map(|&(j, k)| {
            let mut s = [0.0; 6];
            for q in &nodes {
                let (fj, dj) = q.fields[j];
                let (fk, dk) = q.fields[k];
                let w = q.weight;
                s[0] += w * fj * fk * q.h * q.h;
                s[1] += w * fj * fk;
                s[2] += w * dj * dk * q.h * q.h;
                s[3] += w * fj * fk * q.hp * q.hp;
                s[4] += w * dj * fk * q.h * q.hp;
                s[5] += w * fj * dk * q.h * q.hp;
            }
            let j3_scale = -c * hh.powf(-0.5 * alpha);
            [
                s[0],
                lam * s[1],
                hh.powf(-alpha) * s[2],
                m2 * s[3],
                j3_scale * s[4],
                j3_scale * s[5],
            ]
        })
        .collect();

    let zero = || vec![vec![0.0; n]; n];
    let (mut mass, mut stiff) = (zero(), zero());
    let (mut i1, mut j1, mut j2, mut j3) = (zero(), zero(), zero(), zero());
    for (&(j, k), e) in pairs.iter().zip(&entries) {
        for (mat, v) in [(&mut mass, e[0]), (&mut i1, e[1]), (&mut j1, e[2]), (&mut j2, e[3])] {
            mat[j][k] = v;
            mat[k][j] = v;
        }
        j3[j][k] = e[4];
        j3[k][j] = e[5];
        let kv = e[1] + e[2] + e[3] + e[4] + e[5];
        stiff[j][k] = kv;
        stiff[k][j] = kv;
    }
    let mut mass_deviation: f64 = 0.0;
    let mut stiffness_deviation: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let delta = if j == k { 1.0 } else { 0.0 };
            mass_deviation = mass_deviation.max((mass[j][k] - delta).abs());
            stiffness_deviation = stiffness_deviation.max((stiff[j][k] - lam * delta).abs());
        }
    }
    Ok(GramPair {
        elongation: hh,
        lambda_pi: lam,
        mass,
        stiffness: stiff,
        terms: StiffnessTerms { i1, j1, j2, j3 },
        mass_deviation,
        stiffness_deviation,
    })
}

/// Mass matrix `(Phi_j, Phi_k)`.
pub fn mass_gram(family: &TrialFamily, spec: &QuadratureSpec) -> Result<Vec<Vec<f64>>> {
    Ok(assemble(family, spec)?.mass)
}

/// Stiffness matrix `(grad Phi_j, grad Phi_k)`.
pub fn stiffness_gram(family: &TrialFamily, spec: &QuadratureSpec) -> Result<Vec<Vec<f64>>> {
    Ok(assemble(family, spec)?.stiffness)
}

/// Both matrices with the stiffness terms and deviations.
pub fn gram_pair(family: &TrialFamily, spec: &QuadratureSpec) -> Result<GramPair> {
    assemble(family, spec)
}

/// `|int_{-W}^{W} w_j w_k - delta_jk|` for `W = H^alpha / 4`.
pub fn window_orthonormality(family: &TrialFamily) -> Result<Vec<Vec<f64>>> {
    let w = family.support().min(family.modes.grid.half_width);
    crate::specfun::check_orthonormality(&family.modes, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CrossSectionProfile;
    use crate::planar::solve_planar_cross;
    use crate::trial::TrialFamily;
    use std::sync::{Arc, OnceLock};

    fn planar() -> Arc<crate::planar::PlanarCrossSolution> {
        static CELL: OnceLock<Arc<crate::planar::PlanarCrossSolution>> = OnceLock::new();
        CELL.get_or_init(|| Arc::new(solve_planar_cross(4.0, 1.0 / 16.0).unwrap())).clone()
    }

    fn gram(profile: CrossSectionProfile, n: usize) -> GramPair {
        let p = planar();
        let f = TrialFamily::new(&profile, n, p.lambda, p).unwrap();
        gram_pair(&f, &QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn matrices_are_symmetric_with_parity_blocks() {
        for profile in [CrossSectionProfile::rhombus(100.0).unwrap(), CrossSectionProfile::ellipse(100.0).unwrap()] {
            let g = gram(profile, 4);
            for j in 0..4 {
                for k in 0..4 {
                    assert_eq!(g.mass[j][k], g.mass[k][j]);
                    assert_eq!(g.stiffness[j][k], g.stiffness[k][j]);
                    if (j + k) % 2 == 1 {
                        assert!(g.mass[j][k].abs() < 1e-14, "{}", g.mass[j][k]);
                        assert!(g.stiffness[j][k].abs() < 1e-12, "{}", g.stiffness[j][k]);
                    }
                }
            }
        }
    }

    #[test]
    fn near_identity_for_large_elongation() {
        let g = gram(CrossSectionProfile::rhombus(400.0).unwrap(), 2);
        assert!(g.mass_deviation < 0.2);
        assert!(g.stiffness_deviation < 2.0);
        assert!(nalgebra::Cholesky::new(g.mass_matrix()).is_some());
        assert!(nalgebra::Cholesky::new(g.stiffness_matrix()).is_some());
    }

    #[test]
    fn stiffness_terms_add_up() {
        let g = gram(CrossSectionProfile::rhombus(50.0).unwrap(), 3);
        for j in 0..3 {
            for k in 0..3 {
                let t = &g.terms;
                let sum = t.i1[j][k] + t.j1[j][k] + t.j2[j][k] + t.j3[j][k] + t.j3[k][j];
                assert!((sum - g.stiffness[j][k]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn panel_refinement_is_converged() {
        let p = planar();
        let f = TrialFamily::new(&CrossSectionProfile::rhombus(50.0).unwrap(), 3, p.lambda, p).unwrap();
        let a = gram_pair(&f, &QuadratureSpec::default()).unwrap();
        let b = gram_pair(&f, &QuadratureSpec { points_per_cell: 12, ..Default::default() }).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert!((a.mass[j][k] - b.mass[j][k]).abs() < 1e-10, "{} {}", a.mass[j][k], b.mass[j][k]);
                assert!((a.stiffness[j][k] - b.stiffness[j][k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn narrow_window_is_rejected() {
        let p = planar();
        let f = TrialFamily::new(&CrossSectionProfile::rhombus(50.0).unwrap(), 2, p.lambda, p).unwrap();
        let spec = QuadratureSpec {
            window: Some(0.5 * f.support()),
            ..Default::default()
        };
        assert!(gram_pair(&f, &spec).is_err());
    }
}

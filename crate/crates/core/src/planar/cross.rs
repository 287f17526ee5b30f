//! Bound state of the planar cross `Pi = {|x1| < 1/2} U {|x2| < 1/2}`.
//!
//! The ground state lives in the fully symmetric class of the square group,
//! so it is computed on one eighth of the truncated cross. The other
//! classes are solved only to confirm that nothing else drops below `pi^2`.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{assemble_laplacian, lanczos_smallest, SymmetricOperator};
use crate::error::{Error, Result};
use crate::geometry::{Grid, PlanarCross, Sector, DEFAULT_NODE_BUDGET};
use crate::numerics::{linear_fit, richardson};

const PI2: f64 = PI * PI;

/// Order of the leading discretization error of the cross eigenvalue. The
/// reentrant corners give eigenfunctions of class `r^{2/3}`, and the
/// eigenvalue error of the five-point scheme scales like `h^{4/3}`.
pub const CROSS_ERROR_ORDER: f64 = 4.0 / 3.0;

/// Relative eigenpair tolerance: residuals are bounded by this times the
/// Gershgorin bound of the operator.
pub(crate) const RELATIVE_TOLERANCE: f64 = 1e-10;

pub(crate) fn residual_tolerance(op: &crate::eigensolve::StencilOperator) -> f64 {
    RELATIVE_TOLERANCE * op.gershgorin_upper()
}

/// Values of a function symmetric under the square group, stored on the
/// nodes `(i h, j h)`, `0 <= i, j <= n`, of the first quadrant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction2D {
    pub spacing: f64,
    pub n: usize,
    /// Row-major, `values[i * (n + 1) + j]` at `(i h, j h)`.
    pub values: Vec<f64>,
}

impl GridFunction2D {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.n + 1) + j]
    }

    /// Bilinear interpolation in the first quadrant; zero beyond the box.
    pub fn bilinear(&self, a: f64, b: f64) -> f64 {
        let h = self.spacing;
        let (pa, pb) = (a / h, b / h);
        let n = self.n as f64;
        if !(pa >= 0.0 && pb >= 0.0) || pa >= n || pb >= n {
            return 0.0;
        }
        let (i, j) = (pa.floor() as usize, pb.floor() as usize);
        let (s, t) = (pa - i as f64, pb - j as f64);
        (1.0 - s) * (1.0 - t) * self.at(i, j)
            + s * (1.0 - t) * self.at(i + 1, j)
            + (1.0 - s) * t * self.at(i, j + 1)
            + s * t * self.at(i + 1, j + 1)
    }

    /// Triples `x1 x2 value` over the full truncated square.
    pub fn write_triples<W: Write>(&self, mut out: W, header: &str) -> Result<()> {
        writeln!(out, "{header}")?;
        let n = self.n as i64;
        for i in -n..=n {
            for j in -n..=n {
                let v = self.at(i.unsigned_abs() as usize, j.unsigned_abs() as usize);
                writeln!(out, "{:.10e},{:.10e},{:.12e}", i as f64 * self.spacing, j as f64 * self.spacing, v)?;
            }
        }
        Ok(())
    }
}

/// Separable continuation `c e^{-kappa (t - start)} cos(pi s)` of the bound
/// state along each arm, `t` the coordinate along the arm and `s` across it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmTail {
    pub start: f64,
    pub amplitude: f64,
    pub rate: f64,
}

impl ArmTail {
    fn value(&self, along: f64, across: f64) -> f64 {
        if across.abs() >= 0.5 {
            return 0.0;
        }
        self.amplitude * (-self.rate * (along - self.start)).exp() * (PI * across).cos()
    }

    /// `int U^2` over the four tails.
    pub fn mass(&self) -> f64 {
        4.0 * self.amplitude * self.amplitude * 0.5 / (2.0 * self.rate)
    }

    /// `int |y . grad U|^2` over the four tails, in closed form.
    fn dilation_moment(&self) -> f64 {
        let (k, t) = (self.rate, self.start);
        let s = 1.0 / (2.0 * k);
        let m0 = s;
        let m1 = s * (t + s);
        let m2 = s * (t * t + 2.0 * t * s + 2.0 * s * s);
        // Integrating over the cross direction gives
        // A^2 [k^2 t^2 / 2 + k t / 2 + pi^2 / 24 + 1 / 4].
        4.0 * self.amplitude * self.amplitude * (0.5 * k * k * m2 + 0.5 * k * m1 + (PI2 / 24.0 + 0.25) * m0)
    }
}

/// Moments of the bound state entering the trial-function energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossMoments {
    /// `int U^2`, including the tails.
    pub mass: f64,
    /// `int U (y . grad U)`; equals `-1` for a normalized function.
    pub dilation: f64,
    /// `int |y . grad U|^2`.
    pub dilation_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarCrossSolution {
    /// Eigenvalue on the truncated cross at this spacing.
    pub lambda: f64,
    pub residual: f64,
    pub arm_halflength: f64,
    pub spacing: f64,
    /// Rate fitted to `log U` along the arm axis.
    pub decay_rate_observed: f64,
    /// `sqrt(pi^2 - lambda)`.
    pub decay_rate_model: f64,
    /// Eigenvalues below `pi^2` over all symmetry classes.
    pub count_below_cutoff: usize,
    pub tail: ArmTail,
    pub moments: CrossMoments,
    /// `U` on the quadrant grid, unit discrete L2 norm over the cross,
    /// positive at the origin.
    pub u: GridFunction2D,
}

impl PlanarCrossSolution {
    /// `U(x1, x2)` by bilinear interpolation inside the tail start and the
    /// separable continuation beyond it. Defined on the whole plane (zero
    /// outside the untruncated cross).
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        let (a, b) = (x1.abs(), x2.abs());
        let (along, across) = if a >= b { (a, b) } else { (b, a) };
        if along >= self.tail.start {
            return self.tail.value(along, across);
        }
        if across >= 0.5 {
            return 0.0;
        }
        self.u.bilinear(a, b)
    }
}

/// Eigenvalues below `pi^2` in each symmetry class, counted with multiplicity.
fn count_below(l: f64, spacing: f64) -> Result<(usize, Vec<(String, Vec<f64>)>)> {
    let cross = PlanarCross { arm_halflength: l };
    let per: Vec<Result<(String, usize, Vec<f64>)>> = Sector::partition_2d()
        .into_par_iter()
        .map(|(sector, mult)| {
            let g = Grid::build(&cross, &[spacing, spacing], sector, DEFAULT_NODE_BUDGET)?;
            let op = assemble_laplacian(&g)?;
            let k = 2.min(op.dim());
            let pairs = lanczos_smallest(&op, k, residual_tolerance(&op), 11)?;
            let below = pairs.values.iter().filter(|&&v| v < PI2).count();
            Ok((sector.name(), below * mult, pairs.values))
        })
        .collect();
    let mut total = 0;
    let mut listing = Vec::new();
    for r in per {
        let (name, c, values) = r?;
        total += c;
        listing.push((name, values));
    }
    Ok((total, listing))
}

/// Bound state on the cross truncated at `|x1|, |x2| <= L`.
pub fn solve_planar_cross(l: f64, spacing: f64) -> Result<PlanarCrossSolution> {
    if !(l >= 3.0) {
        return Err(Error::domain(format!("arm half-length L must be at least 3, got {l}")));
    }
    if !(spacing > 0.0 && spacing <= 1.0 / 16.0) {
        return Err(Error::domain(format!("spacing must lie in (0, 1/16], got {spacing}")));
    }
    let half = 0.5 / spacing;
    if (half - half.round()).abs() > 1e-9 {
        return Err(Error::domain("spacing must divide 1/2 so the strip walls fall on nodes"));
    }

    let cross = PlanarCross { arm_halflength: l };
    let sector = Sector::square_class("a1")?;
    let grid = Grid::build(&cross, &[spacing, spacing], sector, DEFAULT_NODE_BUDGET)?;
    let op = assemble_laplacian(&grid)?;
    let pairs = lanczos_smallest(&op, 1, residual_tolerance(&op), 7)?;
    let lambda = pairs.values[0];
    if !(lambda > 0.0 && lambda < PI2) {
        return Err(Error::Consistency(format!(
            "cross ground state {lambda} is not below the strip threshold pi^2"
        )));
    }

    // Uniqueness below the threshold, at this spacing and the coarser one.
    let (count, listing) = count_below(l, spacing)?;
    if count != 1 {
        let coarse = 2.0 * spacing;
        let persists = coarse > 0.25 || count_below(l, coarse)?.0 == count;
        if persists {
            return Err(Error::Consistency(format!(
                "{count} eigenvalues below pi^2 on the truncated cross (expected one): {listing:?}"
            )));
        }
    }

    let mut values = op.to_grid_values(&pairs.vectors[0], grid.cell_volume());
    let n = (l / spacing).round() as usize;
    let origin = grid.lookup(&[0, 0]).map(|(d, _)| values[d]).unwrap_or(0.0);
    if origin < 0.0 {
        values.iter_mut().for_each(|v| *v = -*v);
    }
    let mut quad = vec![0.0; (n + 1) * (n + 1)];
    for i in 0..=n {
        for j in 0..=n {
            if let Some((d, chi)) = grid.lookup(&[i as i64, j as i64]) {
                quad[i * (n + 1) + j] = chi * values[d];
            }
        }
    }
    let u = GridFunction2D {
        spacing,
        n,
        values: quad,
    };

    let decay_rate_model = (PI2 - lambda).sqrt();
    let decay_rate_observed = fit_arm_decay(&u, l)?;
    let tail = fit_tail(&u, l, decay_rate_model);
    let moments = cross_moments(&u, &tail);
    Ok(PlanarCrossSolution {
        lambda,
        residual: pairs.residuals[0],
        arm_halflength: l,
        spacing,
        decay_rate_observed,
        decay_rate_model,
        count_below_cutoff: count,
        tail,
        moments,
        u,
    })
}

/// Fit window along the arm: away from the junction and from the end wall.
fn decay_window(l: f64) -> (f64, f64) {
    (1.25, l - 1.5)
}

fn fit_arm_decay(u: &GridFunction2D, l: f64) -> Result<f64> {
    let (a, b) = decay_window(l);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..=u.n {
        let x = i as f64 * u.spacing;
        let v = u.at(i, 0);
        if x >= a && x <= b && v > 0.0 {
            xs.push(x);
            ys.push(v.ln());
        }
    }
    if xs.len() < 4 {
        return Err(Error::accuracy("too few arm samples to fit the decay rate"));
    }
    Ok(-linear_fit(&xs, &ys)?.slope)
}

/// Matches the separable tail to the first cross-section mode at the end of
/// the fit window.
fn fit_tail(u: &GridFunction2D, l: f64, rate: f64) -> ArmTail {
    let (_, b) = decay_window(l);
    let i = (b / u.spacing).round() as usize;
    let start = i as f64 * u.spacing;
    // c = 2 int_{-1/2}^{1/2} U(start, s) cos(pi s) ds by the trapezoid rule.
    let m = (0.5 / u.spacing).round() as usize;
    let mut acc = 0.0;
    for j in 0..=m {
        let s = j as f64 * u.spacing;
        let w = if j == 0 { 1.0 } else { 2.0 } * if j == m { 0.5 } else { 1.0 };
        acc += w * u.at(i, j) * (PI * s).cos();
    }
    ArmTail {
        start,
        amplitude: 2.0 * acc * u.spacing,
        rate,
    }
}

/// Moments from central differences on the grid part plus closed-form tails.
fn cross_moments(u: &GridFunction2D, tail: &ArmTail) -> CrossMoments {
    let h = u.spacing;
    let n = u.n as i64;
    let t = (tail.start / h).round() as i64;
    let val = |i: i64, j: i64| -> f64 {
        if i.abs() > n || j.abs() > n {
            0.0
        } else {
            u.at(i.unsigned_abs() as usize, j.unsigned_abs() as usize)
        }
    };
    // Sum over the region where the along-arm coordinate is below the tail
    // start; nodes on the boundary of that region get half weight.
    let rows: Vec<(f64, f64, f64)> = (-t..=t)
        .into_par_iter()
        .map(|i| {
            let mut acc = (0.0, 0.0, 0.0);
            for j in -t..=t {
                let v = val(i, j);
                if v == 0.0 {
                    continue;
                }
                let mut w = 1.0;
                if i.abs() == t {
                    w *= 0.5;
                }
                if j.abs() == t {
                    w *= 0.5;
                }
                let (x1, x2) = (i as f64 * h, j as f64 * h);
                let d1 = (val(i + 1, j) - val(i - 1, j)) / (2.0 * h);
                let d2 = (val(i, j + 1) - val(i, j - 1)) / (2.0 * h);
                let g = x1 * d1 + x2 * d2;
                acc.0 += w * v * v;
                acc.1 += w * v * g;
                acc.2 += w * g * g;
            }
            acc
        })
        .collect();
    let (mut m, mut c, mut q) = (0.0, 0.0, 0.0);
    for r in rows {
        m += r.0;
        c += r.1;
        q += r.2;
    }
    let cell = h * h;
    // Across one tail, U (y . grad U) integrates to A^2 e^{-2k(t - start)} (-k t / 2 - 1/4).
    let s = 1.0 / (2.0 * tail.rate);
    let a2 = tail.amplitude * tail.amplitude;
    let tail_dilation = 4.0 * a2 * (-tail.rate * 0.5 * s * (tail.start + s) - 0.25 * s);
    CrossMoments {
        mass: m * cell + tail.mass(),
        dilation: c * cell + tail_dilation,
        dilation_squared: q * cell + tail.dilation_moment(),
    }
}

/// `Lambda_Pi` extrapolated from spacings `h` and `h / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarEstimate {
    pub lambda: f64,
    /// `|extrapolated - fine|`, used as the error bar.
    pub error_bar: f64,
    pub spacings: [f64; 2],
    pub grid_values: [f64; 2],
    pub order: f64,
    /// Fine-grid solution, which provides `U`.
    pub fine: PlanarCrossSolution,
}

pub fn estimate_lambda_pi(l: f64, coarse_spacing: f64) -> Result<PlanarEstimate> {
    let (coarse, fine) = rayon::join(
        || solve_planar_cross(l, coarse_spacing),
        || solve_planar_cross(l, 0.5 * coarse_spacing),
    );
    let (coarse, fine) = (coarse?, fine?);
    let spacings = [coarse.spacing, fine.spacing];
    let grid_values = [coarse.lambda, fine.lambda];
    let lambda = richardson(&spacings, &grid_values, &[CROSS_ERROR_ORDER])?;
    Ok(PlanarEstimate {
        lambda,
        error_bar: (lambda - fine.lambda).abs(),
        spacings,
        grid_values,
        order: CROSS_ERROR_ORDER,
        fine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse() -> PlanarCrossSolution {
        solve_planar_cross(4.0, 1.0 / 16.0).unwrap()
    }

    #[test]
    fn ground_state_is_below_threshold_and_unique() {
        let s = coarse();
        assert!(s.lambda > 0.6 * PI2 && s.lambda < 0.7 * PI2, "{}", s.lambda);
        assert_eq!(s.count_below_cutoff, 1);
    }

    #[test]
    fn grid_function_is_swap_symmetric_and_normalized() {
        let s = coarse();
        let u = &s.u;
        let mut mass = 0.0;
        let n = u.n as i64;
        for i in -n..=n {
            for j in -n..=n {
                mass += u.at(i.unsigned_abs() as usize, j.unsigned_abs() as usize).powi(2);
            }
        }
        assert!((mass * u.spacing * u.spacing - 1.0).abs() < 1e-12);
        for i in 0..=u.n {
            for j in 0..=u.n {
                assert!((u.at(i, j) - u.at(j, i)).abs() < 1e-8);
            }
        }
        assert!(u.at(0, 0) > 0.0);
    }

    #[test]
    fn dilation_moment_matches_integration_by_parts() {
        // int U (y . grad U) = -(d / 2) int U^2 in d = 2 dimensions.
        let s = coarse();
        assert!((s.moments.dilation + s.moments.mass).abs() < 2e-2, "{:?}", s.moments);
        assert!((s.moments.mass - 1.0).abs() < 1e-3);
    }

    #[test]
    fn evaluation_vanishes_on_the_walls_and_is_continuous_at_the_tail() {
        let s = coarse();
        assert_eq!(s.eval(2.0, 0.5), 0.0);
        assert_eq!(s.eval(0.7, 0.7), 0.0);
        let t = s.tail.start;
        let inside = s.eval(t - 1e-9, 0.1);
        let outside = s.eval(t + 1e-9, 0.1);
        assert!((inside - outside).abs() < 5e-3 * inside.abs(), "{inside} {outside}");
        assert!((s.eval(0.3, -0.2) - s.eval(-0.2, 0.3)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(solve_planar_cross(2.0, 1.0 / 16.0).is_err());
        assert!(solve_planar_cross(4.0, 0.1).is_err());
        assert!(solve_planar_cross(4.0, 1.0 / 20.5).is_err());
    }
}

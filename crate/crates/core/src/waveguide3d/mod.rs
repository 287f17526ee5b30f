//! Direct spectra of the truncated cruciform waveguide, sector by sector.
//!
//! Each sector of the reflection group is an independent eigenproblem. The
//! discrete spectrum is counted against the cross-section threshold computed
//! on the same lattice, with a margin combining solver residuals and the
//! change of each gap between the lattice and its twice coarser version.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{assemble_laplacian, lanczos_smallest, SpectrumSlice, SymmetricOperator};
use crate::error::{Error, Result};
use crate::geometry::{build_grid, CrossSectionProfile, CruciformDomain, Grid, GridSummary, Sector, DEFAULT_NODE_BUDGET};
use crate::numerics::linear_fit;
use crate::planar::{half_section_threshold, solve_cross_section_with};
use crate::specfun::Parity;

/// Relative residual tolerance used when none is given.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-10;

/// Eigenpairs of one sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSolution {
    pub sector: String,
    pub slice: SpectrumSlice,
    pub grid: GridSummary,
    /// Decay rate of each eigenfunction along the `x1` arm.
    pub decay_rates: Vec<Option<f64>>,
}

fn tolerance_for(op: &crate::eigensolve::StencilOperator, tol: Option<f64>) -> f64 {
    tol.unwrap_or(DEFAULT_RELATIVE_TOLERANCE * op.gershgorin_upper())
}

/// The `k` smallest eigenpairs in the domain's sector. `tol` bounds the
/// residual norms; by default it is relative to the operator norm.
pub fn solve_3d_sector(
    domain: &CruciformDomain,
    spacing_xy: f64,
    spacing_z: f64,
    k: usize,
    tol: Option<f64>,
    cutoff: f64,
    seed: u64,
) -> Result<SectorSolution> {
    let grid = build_grid(domain, spacing_xy, spacing_z, DEFAULT_NODE_BUDGET)?;
    let op = assemble_laplacian(&grid)?;
    let k = k.min(op.dim());
    let pairs = lanczos_smallest(&op, k, tolerance_for(&op, tol), seed)?;
    let decay_rates = pairs
        .vectors
        .iter()
        .map(|v| arm_decay(&grid, &op.to_grid_values(v, grid.cell_volume()), domain.arm_halflength))
        .collect();
    Ok(SectorSolution {
        sector: domain.sector.name(),
        slice: SpectrumSlice::from_pairs(&pairs, cutoff),
        grid: grid.summary(),
        decay_rates,
    })
}

/// Log-slope of `|u|` along the `x1` axis on the lowest plane carrying the
/// function (`z = 0`, or the first plane above it for odd sectors).
fn arm_decay(grid: &Grid, u: &[f64], l: f64) -> Option<f64> {
    let h = grid.spacing()[0];
    let (lo, hi) = (1.25, l - 1.5);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let plane = (0..3).find_map(|iz| grid.lookup(&[0, 0, iz]).map(|_| iz))?;
    let mut i = (lo / h).ceil() as i64;
    while i as f64 * h <= hi {
        if let Some((d, chi)) = grid.lookup(&[i, 0, plane]) {
            let v = (chi * u[d]).abs();
            if v > 0.0 {
                xs.push(i as f64 * h);
                ys.push(v.ln());
            }
        }
        i += 1;
    }
    (xs.len() >= 4).then(|| linear_fit(&xs, &ys).ok().map(|f| -f.slope)).flatten()
}

/// Solves a sector with enough eigenpairs to pass the cutoff: `k` starts at
/// `k0` and doubles while every computed eigenvalue is still below it.
pub fn solve_sector_below(
    domain: &CruciformDomain,
    spacing_xy: f64,
    spacing_z: f64,
    k0: usize,
    cutoff: f64,
    tol: Option<f64>,
    k_max: usize,
    seed: u64,
) -> Result<SectorSolution> {
    let mut k = k0.max(1);
    loop {
        let s = solve_3d_sector(domain, spacing_xy, spacing_z, k, tol, cutoff, seed)?;
        let all_below = s.slice.eigenvalues.iter().all(|&v| v < cutoff);
        if !all_below || k >= k_max || s.slice.eigenvalues.len() < k {
            return Ok(s);
        }
        k = (2 * k).min(k_max);
    }
}

/// An eigenvalue with its symmetry labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedEigenvalue {
    pub eigenvalue: f64,
    pub sector: String,
    pub multiplicity: usize,
    pub z_parity: Option<Parity>,
    pub swap_parity: Option<Parity>,
    /// Margin applied when counting.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    /// Eigenvalues below `cutoff - margin`, with multiplicity.
    pub count: usize,
    pub certified: Vec<ClassifiedEigenvalue>,
    /// Eigenvalues within their margin of the cutoff; not counted.
    pub ambiguous: Vec<ClassifiedEigenvalue>,
    /// Raised when nothing lies below the cutoff, which contradicts the
    /// existence of at least one bound state.
    pub existence_flag: bool,
}

/// Per-sector input to the count.
#[derive(Debug, Clone)]
pub struct SectorInput<'a> {
    pub sector: Sector,
    pub multiplicity: usize,
    pub slice: &'a SpectrumSlice,
    /// The same sector on the coarser lattice, if solved.
    pub coarse: Option<&'a SpectrumSlice>,
}

/// Counts eigenvalues below `cutoff`. The margin of the `i`-th eigenvalue
/// of a sector is `3 max_residual + |gap_i - gap_i^coarse|`, with gaps
/// measured to the respective lattice cutoffs.
pub fn count_discrete(inputs: &[SectorInput<'_>], cutoff: f64, coarse_cutoff: Option<f64>) -> CountResult {
    let mut certified = Vec::new();
    let mut ambiguous = Vec::new();
    for input in inputs {
        let res = 3.0 * input.slice.max_residual();
        for (i, &v) in input.slice.eigenvalues.iter().enumerate() {
            let shift = match (input.coarse, coarse_cutoff) {
                (Some(c), Some(cc)) => c.eigenvalues.get(i).map_or(0.0, |&vc| ((v - cutoff) - (vc - cc)).abs()),
                _ => 0.0,
            };
            let margin = res + shift;
            let entry = ClassifiedEigenvalue {
                eigenvalue: v,
                sector: input.sector.name(),
                multiplicity: input.multiplicity,
                z_parity: input.sector.flips[2],
                swap_parity: input.sector.swap,
                margin,
            };
            if v < cutoff - margin {
                certified.push(entry);
            } else if v <= cutoff + margin {
                ambiguous.push(entry);
            }
        }
    }
    let by_value = |a: &ClassifiedEigenvalue, b: &ClassifiedEigenvalue| a.eigenvalue.total_cmp(&b.eigenvalue);
    certified.sort_by(by_value);
    ambiguous.sort_by(by_value);
    let count = certified.iter().map(|c| c.multiplicity).sum();
    CountResult {
        count,
        existence_flag: count == 0,
        certified,
        ambiguous,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    pub multiplicity: usize,
    pub solution: SectorSolution,
    pub coarse: Option<SectorSolution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSpectrumReport {
    pub profile: CrossSectionProfile,
    #[serde(rename = "H")]
    pub elongation: f64,
    pub arm_halflength: f64,
    pub spacing: [f64; 2],
    /// Threshold on the same lattice as the sectors.
    pub cutoff: f64,
    pub coarse_cutoff: Option<f64>,
    pub sectors: Vec<SectorReport>,
    pub total_count: usize,
    pub certified: Vec<ClassifiedEigenvalue>,
    pub ambiguous: Vec<ClassifiedEigenvalue>,
    pub existence_flag: bool,
}

impl DiscreteSpectrumReport {
    /// All eigenvalues found in all sectors, expanded by multiplicity and sorted.
    pub fn merged_eigenvalues(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .sectors
            .iter()
            .flat_map(|s| {
                s.solution
                    .slice
                    .eigenvalues
                    .iter()
                    .flat_map(move |&v| std::iter::repeat_n(v, s.multiplicity))
            })
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Human-readable table.
    pub fn write_table<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "H = {}  L = {}  spacing = ({}, {})  cutoff = {:.8}",
            self.elongation, self.arm_halflength, self.spacing[0], self.spacing[1], self.cutoff
        )?;
        writeln!(out, "{:<14} {:>4}  eigenvalues", "sector", "mult")?;
        for s in &self.sectors {
            let vals: Vec<String> = s.solution.slice.eigenvalues.iter().map(|v| format!("{v:.8}")).collect();
            writeln!(out, "{:<14} {:>4}  {}", s.solution.sector, s.multiplicity, vals.join(" "))?;
        }
        writeln!(out, "count = {}", self.total_count)?;
        let amb: Vec<String> = self.ambiguous.iter().map(|a| format!("{:.8} ({})", a.eigenvalue, a.sector)).collect();
        writeln!(out, "ambiguous = [{}]", amb.join(", "))?;
        if self.existence_flag {
            writeln!(out, "warning: no eigenvalue below the cutoff")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideOptions {
    pub arm_halflength: f64,
    pub spacing_xy: f64,
    pub spacing_z: f64,
    /// Initial number of eigenpairs per sector.
    pub k: usize,
    pub k_max: usize,
    /// Also solve on the twice coarser lattice to estimate the margin.
    pub coarse_check: bool,
    pub tolerance: Option<f64>,
    pub seed: u64,
}

impl WaveguideOptions {
    pub fn new(arm_halflength: f64, spacing_xy: f64, spacing_z: f64) -> Self {
        Self {
            arm_halflength,
            spacing_xy,
            spacing_z,
            k: 2,
            k_max: 32,
            coarse_check: true,
            tolerance: None,
            seed: 3,
        }
    }
}

fn solve_sectors(
    profile: &CrossSectionProfile,
    sectors: &[(Sector, usize)],
    opts: &WaveguideOptions,
    scale: f64,
    cutoff: f64,
) -> Result<Vec<(usize, SectorSolution)>> {
    sectors
        .par_iter()
        .map(|&(sector, mult)| {
            let domain = CruciformDomain::new(profile.clone(), opts.arm_halflength, sector)?;
            let s = solve_sector_below(
                &domain,
                scale * opts.spacing_xy,
                scale * opts.spacing_z,
                opts.k,
                cutoff,
                opts.tolerance,
                opts.k_max,
                opts.seed,
            )?;
            Ok((mult, s))
        })
        .collect()
}

/// Full analysis over the given sectors (all ten by default).
pub fn analyze(profile: &CrossSectionProfile, opts: &WaveguideOptions, sectors: Option<Vec<(Sector, usize)>>) -> Result<DiscreteSpectrumReport> {
    let sectors = sectors.unwrap_or_else(Sector::partition_3d);
    let cutoff = solve_cross_section_with(profile, opts.spacing_xy, opts.spacing_z)?.lambda_dagger;
    let fine = solve_sectors(profile, &sectors, opts, 1.0, cutoff)?;
    let (coarse_cutoff, coarse) = if opts.coarse_check {
        let cc = solve_cross_section_with(profile, 2.0 * opts.spacing_xy, 2.0 * opts.spacing_z)?.lambda_dagger;
        // Match the number of pairs found on the fine lattice.
        let coarse: Vec<Result<SectorSolution>> = sectors
            .par_iter()
            .zip(fine.par_iter())
            .map(|(&(sector, _), (_, f))| {
                let domain = CruciformDomain::new(profile.clone(), opts.arm_halflength, sector)?;
                solve_3d_sector(
                    &domain,
                    2.0 * opts.spacing_xy,
                    2.0 * opts.spacing_z,
                    f.slice.eigenvalues.len(),
                    opts.tolerance,
                    cc,
                    opts.seed,
                )
            })
            .collect();
        (Some(cc), Some(coarse.into_iter().collect::<Result<Vec<_>>>()?))
    } else {
        (None, None)
    };
    let inputs: Vec<SectorInput<'_>> = sectors
        .iter()
        .enumerate()
        .map(|(i, &(sector, mult))| SectorInput {
            sector,
            multiplicity: mult,
            slice: &fine[i].1.slice,
            coarse: coarse.as_ref().map(|c| &c[i].slice),
        })
        .collect();
    let counted = count_discrete(&inputs, cutoff, coarse_cutoff);
    let mut coarse_iter = coarse.map(|c| c.into_iter());
    let reports = fine
        .into_iter()
        .map(|(multiplicity, solution)| SectorReport {
            multiplicity,
            solution,
            coarse: coarse_iter.as_mut().and_then(|it| it.next()),
        })
        .collect();
    Ok(DiscreteSpectrumReport {
        profile: profile.clone(),
        elongation: profile.elongation,
        arm_halflength: opts.arm_halflength,
        spacing: [opts.spacing_xy, opts.spacing_z],
        cutoff,
        coarse_cutoff,
        sectors: reports,
        total_count: counted.count,
        certified: counted.certified,
        ambiguous: counted.ambiguous,
        existence_flag: counted.existence_flag,
    })
}

/// Smallest eigenvalue with a Dirichlet condition on `z = 0`, next to the
/// thresholds of the full and the upper half cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfGuideResult {
    pub lambda_plus: f64,
    /// Threshold of the half-guide (upper half cross-section).
    pub lambda_dagger_half: f64,
    /// Threshold of the full guide.
    pub lambda_dagger: f64,
}

/// `lambda^+`: the minimum over the odd-in-`z` sectors.
pub fn halfguide_lambda_plus(profile: &CrossSectionProfile, opts: &WaveguideOptions) -> Result<HalfGuideResult> {
    let sectors: Vec<(Sector, usize)> = Sector::partition_3d()
        .into_iter()
        .filter(|(s, _)| s.flips[2] == Some(Parity::Odd))
        .collect();
    let lambda_dagger = solve_cross_section_with(profile, opts.spacing_xy, opts.spacing_z)?.lambda_dagger;
    let lambda_dagger_half = half_section_threshold(profile, opts.spacing_xy, opts.spacing_z)?;
    let lambda_plus = sectors
        .par_iter()
        .map(|&(sector, _)| -> Result<f64> {
            let domain = CruciformDomain::new(profile.clone(), opts.arm_halflength, sector)?;
            let s = solve_3d_sector(&domain, opts.spacing_xy, opts.spacing_z, 1, opts.tolerance, lambda_dagger_half, opts.seed)?;
            Ok(s.slice.eigenvalues[0])
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if !lambda_plus.is_finite() {
        return Err(Error::Consistency("no odd-in-z eigenvalue was found".into()));
    }
    Ok(HalfGuideResult {
        lambda_plus,
        lambda_dagger_half,
        lambda_dagger,
    })
}

/// `pi^2` shifted to the five-point value on a lattice whose nodes include
/// the walls of a unit interval: `(4 / h^2) sin^2(pi h / 2)`.
pub fn lattice_unit_interval_eigenvalue(h: f64) -> f64 {
    let s = (PI * h / 2.0).sin();
    4.0 * s * s / (h * h)
}

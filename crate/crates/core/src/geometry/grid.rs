//! Node-centred uniform lattices restricted to a region and a symmetry sector.
//!
//! Lattice points are `x = i * spacing` (per axis) for integer `i`, so the
//! origin is always a lattice point. A node is a degree of freedom when it
//! lies strictly inside the region, is the representative of its orbit under
//! the sector's group, and is not forced to vanish by the sector's parities.
//! Everything else carries the homogeneous Dirichlet value.

use serde::{Deserialize, Serialize};

use super::domain::{CruciformDomain, Region};
use super::sector::Sector;
use crate::error::{Error, Result};

pub const DEFAULT_NODE_BUDGET: usize = 150_000_000;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct Grid {
    dims: usize,
    spacing: [f64; 3],
    sector: Sector,
    lo: [i64; 3],
    hi: [i64; 3],
    /// Stored box (inclusive `lo..=hi`) to dof id.
    dof_index: Vec<u32>,
    dofs: Vec<[i64; 3]>,
    weights: Vec<u32>,
}

/// Summary used for dry runs and manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub dims: usize,
    pub spacing: Vec<f64>,
    pub sector: String,
    pub stored_box_nodes: usize,
    pub dofs: usize,
    pub full_nodes: usize,
}

impl Grid {
    /// Samples `region` with per-axis `spacing` in `sector`. Fails with a
    /// resource error when the lattice box would exceed `budget` nodes.
    pub fn build(region: &dyn Region, spacing: &[f64], sector: Sector, budget: usize) -> Result<Self> {
        let dims = region.dims();
        if spacing.len() != dims {
            return Err(Error::domain(format!(
                "expected {dims} spacings, got {}",
                spacing.len()
            )));
        }
        if spacing.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::domain("grid spacings must be positive"));
        }
        let sector = sector.validated()?;
        if dims == 2 && sector.flips[2].is_some() {
            return Err(Error::domain("a 2D grid cannot carry a z-parity"));
        }
        let (lower, upper) = region.bounds();
        let mut sp = [1.0; 3];
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for k in 0..dims {
            sp[k] = spacing[k];
            let a = (lower[k] / spacing[k] - 1e-9).ceil() as i64;
            let b = (upper[k] / spacing[k] + 1e-9).floor() as i64;
            if sector.flips[k].is_some() {
                if (lower[k] + upper[k]).abs() > 1e-12 * (upper[k] - lower[k]) {
                    return Err(Error::domain(format!(
                        "sector reflects axis {k} but the region is not symmetric about 0 there"
                    )));
                }
                lo[k] = 0;
            } else {
                lo[k] = a;
            }
            hi[k] = b;
        }
        if sector.swap.is_some() && (sp[0] != sp[1] || lo[0] != lo[1] || hi[0] != hi[1]) {
            return Err(Error::domain("swap symmetry needs identical x1 and x2 axes"));
        }
        let stored: usize = (0..3).map(|k| (hi[k] - lo[k] + 1) as usize).product();
        if stored > budget {
            return Err(Error::Resource {
                what: "grid nodes".into(),
                required: stored,
                budget,
            });
        }

        let mut dof_index = vec![NONE; stored];
        let mut dofs = Vec::new();
        let mut weights = Vec::new();
        let mut x = [0.0; 3];
        let mut flat = 0usize;
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for l in lo[2]..=hi[2] {
                    let p = [i, j, l];
                    for k in 0..3 {
                        x[k] = p[k] as f64 * sp[k];
                    }
                    let inside = region.contains(&x[..dims]);
                    // Every generator must map the region onto itself.
                    for k in 0..dims {
                        if sector.flips[k].is_some() {
                            let mut mirror = x;
                            mirror[k] = -mirror[k];
                            if region.contains(&mirror[..dims]) != inside {
                                return Err(Error::Consistency(format!(
                                    "region is not symmetric under the reflection of axis {k} at {:?}",
                                    &x[..dims]
                                )));
                            }
                        }
                    }
                    if sector.swap.is_some() {
                        let mut mirror = x;
                        mirror.swap(0, 1);
                        if region.contains(&mirror[..dims]) != inside {
                            return Err(Error::Consistency(format!(
                                "region is not symmetric under x1 <-> x2 at {:?}",
                                &x[..dims]
                            )));
                        }
                    }
                    let canonical = sector.swap.is_none() || p[0] >= p[1];
                    if inside && canonical {
                        let (m, killed) = sector.orbit(&p[..dims]);
                        if !killed {
                            dof_index[flat] = u32::try_from(dofs.len()).map_err(|_| Error::Resource {
                                what: "grid degrees of freedom".into(),
                                required: dofs.len() + 1,
                                budget: NONE as usize,
                            })?;
                            dofs.push(p);
                            weights.push(m as u32);
                        }
                    }
                    flat += 1;
                }
            }
        }
        if dofs.is_empty() {
            return Err(Error::domain("grid has no interior nodes; refine the spacing"));
        }
        Ok(Self {
            dims,
            spacing: sp,
            sector,
            lo,
            hi,
            dof_index,
            dofs,
            weights,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dims]
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    /// Lattice coordinates of a degree of freedom (third entry 0 in 2D).
    pub fn point(&self, dof: usize) -> [i64; 3] {
        self.dofs[dof]
    }

    pub fn coords(&self, dof: usize) -> [f64; 3] {
        let p = self.dofs[dof];
        [
            p[0] as f64 * self.spacing[0],
            p[1] as f64 * self.spacing[1],
            if self.dims == 3 { p[2] as f64 * self.spacing[2] } else { 0.0 },
        ]
    }

    /// Orbit size of a degree of freedom.
    pub fn weight(&self, dof: usize) -> f64 {
        f64::from(self.weights[dof])
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing[..self.dims].iter().product()
    }

    /// Number of lattice nodes of the unreduced problem that this grid
    /// represents (orbits of all degrees of freedom).
    pub fn full_node_count(&self) -> usize {
        self.weights.iter().map(|&w| w as usize).sum()
    }

    /// Degree of freedom representing lattice point `p`, with the character
    /// `chi` such that `u(p) = chi * u(dof)`. `None` where the value is zero.
    pub fn lookup(&self, p: &[i64]) -> Option<(usize, f64)> {
        let (q, chi) = self.sector.canonicalize(&p[..self.dims]);
        let mut flat = 0usize;
        for k in 0..3 {
            if q[k] < self.lo[k] || q[k] > self.hi[k] {
                return None;
            }
            flat = flat * (self.hi[k] - self.lo[k] + 1) as usize + (q[k] - self.lo[k]) as usize;
        }
        match self.dof_index[flat] {
            NONE => None,
            id => Some((id as usize, chi)),
        }
    }

    /// Lattice index range `(lo, hi)` of the stored box along an axis.
    pub fn stored_range(&self, axis: usize) -> (i64, i64) {
        (self.lo[axis], self.hi[axis])
    }

    pub fn summary(&self) -> GridSummary {
        GridSummary {
            dims: self.dims,
            spacing: self.spacing().to_vec(),
            sector: self.sector.name(),
            stored_box_nodes: self.dof_index.len(),
            dofs: self.len(),
            full_nodes: self.full_node_count(),
        }
    }
}

/// Stored-box node count a grid would need, without building it.
pub fn planned_box_nodes(region: &dyn Region, spacing: &[f64], sector: Sector) -> usize {
    let (lower, upper) = region.bounds();
    (0..region.dims())
        .map(|k| {
            let a = (lower[k] / spacing[k] - 1e-9).ceil() as i64;
            let b = (upper[k] / spacing[k] + 1e-9).floor() as i64;
            let a = if sector.flips[k].is_some() { 0 } else { a };
            (b - a + 1).max(0) as usize
        })
        .product()
}

/// Grid on the truncated waveguide with spacing `spacing_xy` across the arms
/// and `spacing_z` along the stretched direction, in the domain's sector.
pub fn build_grid(domain: &CruciformDomain, spacing_xy: f64, spacing_z: f64, budget: usize) -> Result<Grid> {
    Grid::build(domain, &[spacing_xy, spacing_xy, spacing_z], domain.sector, budget)
}

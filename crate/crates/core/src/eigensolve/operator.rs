//! The finite-difference Dirichlet Laplacian on a masked, symmetry-reduced
//! grid, stored as a compressed sparse row stencil.
//!
//! On a sector grid the reduced operator `R` acting on orbit
//! representatives is not symmetric; with orbit weights `m_i` it is
//! self-adjoint in `<u, v> = sum m_i u_i v_i`. We store
//! `S = D^{1/2} R D^{-1/2}`, `D = diag(m)`, which is symmetric and has the
//! same eigenvalues.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Grid;

pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone)]
pub struct StencilOperator {
    diag: Vec<f64>,
    row_ptr: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    /// `sqrt(m_i)`, kept to map eigenvectors back to grid values.
    sqrt_weights: Vec<f64>,
}

const ROW_BLOCK: usize = 2048;

impl StencilOperator {
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Converts a unit eigenvector of `S` to grid values normalized in the
    /// discrete L2 norm of the unreduced grid (`sum u^2 * cell volume = 1`).
    pub fn to_grid_values(&self, y: &[f64], cell_volume: f64) -> Vec<f64> {
        let s = 1.0 / cell_volume.sqrt();
        y.iter().zip(&self.sqrt_weights).map(|(v, w)| v / w * s).collect()
    }

    /// Largest eigenvalue bound by Gershgorin.
    pub fn gershgorin_upper(&self) -> f64 {
        (0..self.diag.len())
            .map(|i| {
                let (a, b) = (self.row_ptr[i] as usize, self.row_ptr[i + 1] as usize);
                self.diag[i] + self.vals[a..b].iter().map(|v| v.abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

impl SymmetricOperator for StencilOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(ROW_BLOCK).enumerate().for_each(|(blk, out)| {
            let base = blk * ROW_BLOCK;
            for (r, yi) in out.iter_mut().enumerate() {
                let i = base + r;
                let (a, b) = (self.row_ptr[i] as usize, self.row_ptr[i + 1] as usize);
                let mut acc = self.diag[i] * x[i];
                for t in a..b {
                    acc += self.vals[t] * x[self.cols[t] as usize];
                }
                *yi = acc;
            }
        });
    }
}

/// Central-difference negative Laplacian with homogeneous Dirichlet values at
/// every lattice point that is not a degree of freedom.
pub fn assemble_laplacian(grid: &Grid) -> Result<StencilOperator> {
    let n = grid.len();
    if n == 0 {
        return Err(Error::domain("cannot assemble an operator on an empty grid"));
    }
    let dims = grid.dims();
    let inv_h2: Vec<f64> = grid.spacing().iter().map(|h| 1.0 / (h * h)).collect();
    let diag_value: f64 = 2.0 * inv_h2.iter().sum::<f64>();
    let sqrt_weights: Vec<f64> = (0..n).map(|i| grid.weight(i).sqrt()).collect();

    let rows: Vec<(f64, Vec<(u32, f64)>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = grid.point(i);
            let mut diag = diag_value;
            let mut entries: Vec<(u32, f64)> = Vec::with_capacity(2 * dims);
            for k in 0..dims {
                for step in [-1i64, 1] {
                    let mut q = p;
                    q[k] += step;
                    if let Some((j, chi)) = grid.lookup(&q[..dims]) {
                        let v = -chi * inv_h2[k] * sqrt_weights[i] / sqrt_weights[j];
                        if j == i {
                            diag += v;
                        } else if let Some(e) = entries.iter_mut().find(|e| e.0 as usize == j) {
                            e.1 += v;
                        } else {
                            entries.push((j as u32, v));
                        }
                    }
                }
            }
            entries.retain(|e| e.1 != 0.0);
            entries.sort_by_key(|e| e.0);
            (diag, entries)
        })
        .collect();

    let mut diag = Vec::with_capacity(n);
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0u32);
    for (d, entries) in rows {
        diag.push(d);
        for (j, v) in entries {
            cols.push(j);
            vals.push(v);
        }
        row_ptr.push(u32::try_from(cols.len()).map_err(|_| Error::Resource {
            what: "stencil entries".into(),
            required: cols.len(),
            budget: u32::MAX as usize,
        })?);
    }
    Ok(StencilOperator {
        diag,
        row_ptr,
        cols,
        vals,
        sqrt_weights,
    })
}

/// Dense diagonal operator, mostly for tests.
#[derive(Debug, Clone)]
pub struct DiagonalOperator(pub Vec<f64>);

impl SymmetricOperator for DiagonalOperator {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.0) {
            *yi = d * xi;
        }
    }
}

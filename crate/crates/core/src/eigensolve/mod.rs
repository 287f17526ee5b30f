//! Symmetric eigenvalue solvers: tridiagonal bisection, banded pencils,
//! dense pencils, and shift-invert block Lanczos on stencil operators.

pub mod banded;
pub mod cg;
pub mod lanczos;
pub mod operator;
pub mod pencil;
pub mod tridiag;

use serde::{Deserialize, Serialize};

pub use banded::{smallest_generalized, BandedSym};
pub use cg::{conjugate_gradient, CgOptions};
pub use lanczos::{lanczos_smallest, lanczos_smallest_with, EigenPairs, LanczosOptions};
pub use operator::{assemble_laplacian, DiagonalOperator, StencilOperator, SymmetricOperator};
pub use pencil::{generalized_eigen, generalized_small_pencil};

/// Sorted eigenvalues with their residual norms and the count below a cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSlice {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub cutoff: f64,
    pub count_below_cutoff: usize,
}

impl SpectrumSlice {
    pub fn new(eigenvalues: Vec<f64>, residuals: Vec<f64>, cutoff: f64) -> Self {
        let mut idx: Vec<usize> = (0..eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| eigenvalues[a].partial_cmp(&eigenvalues[b]).unwrap());
        let ev: Vec<f64> = idx.iter().map(|&i| eigenvalues[i]).collect();
        let res: Vec<f64> = idx.iter().map(|&i| residuals[i]).collect();
        let count_below_cutoff = ev.iter().filter(|&&v| v < cutoff).count();
        Self {
            eigenvalues: ev,
            residuals: res,
            cutoff,
            count_below_cutoff,
        }
    }

    pub fn from_pairs(pairs: &EigenPairs, cutoff: f64) -> Self {
        Self::new(pairs.values.clone(), pairs.residuals.clone(), cutoff)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

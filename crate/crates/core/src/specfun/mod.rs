//! Special functions and the 1D model eigenproblems.

pub mod airy;
pub(crate) mod dd;
pub mod hermite;
pub mod modes;

pub use airy::{airy_ai, airy_ai_asymptotic, airy_ai_prime};
pub use hermite::{hermite_function, hermite_poly, oscillator_eigenfunction, oscillator_eigenvalue};
pub use modes::{
    check_orthonormality, solve_abs_linear, solve_quadratic, Grid1D, Mode1D, ModeFamily1D, Parity, PotentialKind,
};

pub mod cli;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod planar;
pub mod specfun;
pub mod trial;
pub mod waveguide3d;

pub use error::{Error, Result};

//! Cross-section profiles, the cruciform waveguide, symmetry sectors and
//! lattice sampling.

pub mod domain;
pub mod grid;
pub mod profile;
pub mod sector;

pub use domain::{BoxRegion, CrossSection, CruciformDomain, PlanarCross, Region, DEFAULT_ARM_HALFLENGTH};
pub use grid::{build_grid, Grid, GridSummary, DEFAULT_NODE_BUDGET};
pub use profile::{CrossSectionProfile, ProfileKind, WidthTable};
pub use sector::Sector;

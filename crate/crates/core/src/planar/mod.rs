//! Two-dimensional eigenproblems: the bound state of the planar cross and
//! the threshold of the stretched cross-section.

pub mod cross;
pub mod section;

pub use cross::{
    estimate_lambda_pi, solve_planar_cross, ArmTail, CrossMoments, GridFunction2D, PlanarCrossSolution, PlanarEstimate,
    CROSS_ERROR_ORDER,
};
pub use section::{
    cutoff_asymptotic, fit_threshold, half_section_threshold, mu_dagger, solve_cross_section, solve_cross_section_with,
    threshold_channel, threshold_sweep, write_sweep_csv, ChannelOptions, SweepRow, ThresholdFit, ThresholdMethod,
    ThresholdResult,
};

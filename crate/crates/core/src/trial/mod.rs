//! Trial functions built from the planar bound state and the 1D modes,
//! their Gram matrices, and the eigenvalue upper bounds they certify.

pub mod certify;
pub mod cutoff;
pub mod family;
pub mod gram;

pub use certify::{
    maxmin_certificate, theorem1_sweep, write_theorem1_csv, LambdaPi, MaxMinCertificate, SweepOptions, Theorem1Row,
    Theorem1Table,
};
pub use cutoff::{chi, chi_prime};
pub use family::{mass_entry_3d, model_potential, TrialFamily};
pub use gram::{gram_pair, mass_gram, stiffness_gram, window_orthonormality, GramPair, QuadratureSpec, StiffnessTerms};

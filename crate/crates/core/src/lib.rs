//! Certified numerics for Berry-Esseen type bounds: universal constants, characteristic
//! function majorants, the smoothing-inequality certifier, exact lattice oracles and
//! bounds for Poisson and mixed Poisson random sums.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certifier;
pub mod cf_bounds;
pub mod cli;
pub mod constants;
pub mod empirical;
pub mod error;
pub mod kernel;
pub mod quadrature;
pub mod random_sums;
pub mod special;

pub use certifier::{
    c_of_epsilon, certify_theorem1, certify_theorem2, n_star, optimize_t0_t, sweep,
    verify_certificate, Certificate, NMode, SweepReport, SweepSpec, TheoremReport,
};
pub use constants::{universal, UniversalConstants};
pub use empirical::{LatticeDistribution, MomentProfile};
pub use error::{Error, Result};
pub use quadrature::CertifiedValue;

//! Liouville correlation functions on the unit round sphere by Monte Carlo
//! over the truncated free field.
//!
//! For insertions `(x_i, alpha_i)` with `s = sum alpha_i - 2Q > 0`, the zero
//! mode integrates out exactly and
//!
//! ```text
//! <prod V_alpha_i(x_i)> = (det' Delta / 4 pi)^{-1/2}
//!     exp(sum_i alpha_i^2 / 2 (ln 2 - 1/2) + sum_{i<j} alpha_i alpha_j C(x_i, x_j))
//!     gamma^{-1} Gamma(s / gamma) mu^{-s / gamma} E[Z^{-s / gamma}],
//! Z = int exp(gamma sum_j alpha_j C(x_j, x)) M_gamma(dx).
//! ```

mod covariance;
mod job;

pub use covariance::{
    sphere_covariance, sphere_covariance_unit, LN_DET_LAPLACIAN_SPHERE, ROBIN_SPHERE, SPHERE_AREA,
};
pub use job::{
    correlator_mc, correlators_common, insertion_weights, ln_prefactor, negative_moment_mc, z_random_mass,
    CorrelatorEstimate, CorrelatorJob, CrnResult, InsertionKernel,
};

//! Fixed inputs shared by the benchmarks.

use lcft_core::params::derive_params;
use lcft_core::CFTParams;

/// Weights of the four-point configuration used throughout.
pub const FOUR_POINT_ALPHAS: [f64; 4] = [1.9, 1.8, 1.7, 1.9];

pub fn unit_params() -> CFTParams {
    derive_params(1.0, 1.0).expect("gamma = 1 is admissible")
}

/// External weights of [`FOUR_POINT_ALPHAS`] at `gamma = 1`.
pub fn four_point_deltas() -> [f64; 4] {
    let p = unit_params();
    FOUR_POINT_ALPHAS.map(|a| p.conformal_weight(a))
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectral::{check_channel, integrate, BootstrapOptions, BootstrapResult, SpectralQuadrature};
use crate::error::{LcftError, Result};
use crate::params::CFTParams;
use crate::virasoro::GramCache;

/// Channel compared against the direct `(12)(34)` expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    /// The direct expansion itself.
    S,
    /// `G_{1234}(z) = G_{3214}(1 - z)`: fuse `a3` with `a2` and `a1` with `a4`.
    T,
    /// Needs the `1/z` frame, not available with `|z| < 1` blocks.
    U,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossingReport {
    pub channel: Channel,
    pub direct: BootstrapResult,
    pub crossed: BootstrapResult,
    /// `|direct / crossed - 1|` at the full level.
    pub discrepancy: f64,
    /// Discrepancy with both sides truncated at each level.
    pub by_level: Vec<f64>,
}

pub fn crossing_check(
    z: Complex64,
    alphas: [f64; 4],
    channel: Channel,
    quad: &SpectralQuadrature,
    params: &CFTParams,
) -> Result<CrossingReport> {
    let [a1, a2, a3, a4] = alphas;
    let (crossed_alphas, crossed_z) = match channel {
        Channel::S => (alphas, z),
        Channel::T => ([a3, a2, a1, a4], Complex64::new(1.0, 0.0) - z),
        Channel::U => {
            return Err(LcftError::domain(
                "u-channel crossing maps z to 1/z, outside the |z| < 1 block region; use the t channel",
            ))
        }
    };
    check_channel(&alphas, params)?;
    check_channel(&crossed_alphas, params)?;
    // both channels share Delta(p) and c, so they share Gram matrices
    let gram = GramCache::new();
    let opts = BootstrapOptions::default();
    let direct = integrate(z, alphas, quad, params, &opts, &gram)?;
    let crossed = if channel == Channel::S {
        direct.clone()
    } else {
        integrate(crossed_z, crossed_alphas, quad, params, &opts, &gram)?
    };
    let by_level: Vec<f64> =
        direct.by_level.iter().zip(&crossed.by_level).map(|(d, c)| (d / c - 1.0).abs()).collect();
    Ok(CrossingReport { channel, discrepancy: by_level[quad.level], direct, crossed, by_level })
}

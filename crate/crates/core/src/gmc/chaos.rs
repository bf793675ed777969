use serde::{Deserialize, Serialize};

use super::field::{AnySampler, FieldSample, FieldSampler, FieldSpec};
use crate::error::{LcftError, Result};
use crate::stats::MCEstimate;
use crate::with_sampler;

/// Which constants turned the Wick exponential into the `eps^{gamma^2/2}`
/// normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Renormalization {
    /// Truncated variance subtracted in `exp(gamma X - gamma^2 sigma^2 / 2)`.
    pub wick_variance: f64,
    /// Factor `exp(gamma^2 c_robin / 2)` applied on top.
    pub robin_constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaosMeasure {
    pub gamma: f64,
    pub cells: Vec<f64>,
    pub total_mass: f64,
    pub renormalization: Renormalization,
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..2.0).contains(&gamma) {
        return Err(LcftError::domain(format!("chaos needs 0 <= gamma < 2, got {gamma}")));
    }
    Ok(())
}

/// `exp(gamma^2 (c_robin - sigma^2) / 2)`, the deterministic part of each cell weight.
fn wick_factor(gamma: f64, variance: f64, robin: f64) -> f64 {
    (0.5 * gamma * gamma * (robin - variance)).exp()
}

pub fn chaos_measure(sample: &FieldSample, gamma: f64) -> Result<ChaosMeasure> {
    check_gamma(gamma)?;
    let cells: Vec<f64> = sample
        .values
        .iter()
        .zip(sample.variance.iter())
        .zip(sample.cell_areas.iter())
        .map(|((&x, &var), &a)| {
            if gamma == 0.0 {
                a
            } else {
                (gamma * x).exp() * wick_factor(gamma, var, sample.robin_constant) * a
            }
        })
        .collect();
    let total_mass = cells.iter().sum();
    let wick_variance = sample.variance.first().copied().unwrap_or(0.0);
    Ok(ChaosMeasure {
        gamma,
        cells,
        total_mass,
        renormalization: Renormalization { wick_variance, robin_constant: sample.robin_constant },
    })
}

/// Total chaos mass of one field realisation, weighting each cell by
/// `weights[i]` (cell areas, possibly times an insertion kernel).
pub fn weighted_mass(values: &[f64], weights: &[f64], gamma: f64, variance: f64, robin: f64) -> f64 {
    let f = wick_factor(gamma, variance, robin);
    values.iter().zip(weights).map(|(&x, &w)| (gamma * x).exp() * w).sum::<f64>() * f
}

/// Largest finite positive moment `2 d / gamma^2`.
pub fn moment_bound(dimension: u32, gamma: f64) -> f64 {
    2.0 * dimension as f64 / (gamma * gamma)
}

/// Monte Carlo estimate of `E[M^q]` for the total mass.
pub fn chaos_moment(spec: &FieldSpec, gamma: f64, q: f64, n_samples: usize) -> Result<MCEstimate> {
    check_gamma(gamma)?;
    let bound = moment_bound(spec.geometry().dimension(), gamma);
    if q > 0.0 && q >= bound {
        return Err(LcftError::domain(format!(
            "moment q = {q} diverges: chaos moments blow up for q >= 2d/gamma^2 = {bound}"
        )));
    }
    if q == 0.0 {
        return Ok(MCEstimate::exact(1.0, n_samples, spec.seed()));
    }
    let sampler = AnySampler::new(spec)?;
    let values = with_sampler!(&sampler, s => {
        let areas = s.cell_areas().clone();
        let (var, robin) = (s.variance(), s.robin_constant());
        s.map_samples(0, n_samples, |_, v| weighted_mass(v, &areas, gamma, var, robin).powf(q))
    });
    Ok(MCEstimate::from_values(&values, spec.seed()))
}

//! Monte Carlo plumbing shared by the samplers and estimators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Independent generator for draw `index` of a run seeded with `seed`:
/// ChaCha8 keyed by `seed_from_u64(seed)`, stream number `index`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// `(sum |v|)^2 / sum v^2`; equals `n` for constant contributions.
    pub effective_sample_size: f64,
}

impl MCEstimate {
    /// Summed in index order, so the result does not depend on how the
    /// values were produced.
    pub fn from_values(values: &[f64], seed: u64) -> Self {
        let n = values.len();
        if n == 0 {
            return MCEstimate { mean: f64::NAN, stderr: f64::NAN, n_samples: 0, seed, effective_sample_size: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let abs_sum: f64 = values.iter().map(|v| v.abs()).sum();
        let sq_sum: f64 = values.iter().map(|v| v * v).sum();
        let ess = if sq_sum > 0.0 { abs_sum * abs_sum / sq_sum } else { n as f64 };
        MCEstimate { mean, stderr: (var / n as f64).sqrt(), n_samples: n, seed, effective_sample_size: ess }
    }

    /// Deterministic value with no sampling error.
    pub fn exact(value: f64, n_samples: usize, seed: u64) -> Self {
        MCEstimate { mean: value, stderr: 0.0, n_samples, seed, effective_sample_size: n_samples as f64 }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        MCEstimate { mean: self.mean * factor, stderr: self.stderr * factor.abs(), ..self.clone() }
    }

    /// `|mean - target|` in units of the standard error (infinite when the
    /// error is zero and the values differ).
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

/// Ratio of two means over paired samples with a delta-method standard error.
pub fn ratio_estimate(num: &[f64], den: &[f64], seed: u64) -> MCEstimate {
    assert_eq!(num.len(), den.len());
    let n = num.len();
    let a = MCEstimate::from_values(num, seed);
    let b = MCEstimate::from_values(den, seed);
    let r = a.mean / b.mean;
    // residuals of the linearisation num - r den
    let resid: Vec<f64> = num.iter().zip(den).map(|(x, y)| x - r * y).collect();
    let e = MCEstimate::from_values(&resid, seed);
    let stderr = (e.stderr / b.mean).abs();
    MCEstimate { mean: r, stderr, n_samples: n, seed, effective_sample_size: a.effective_sample_size.min(b.effective_sample_size) }
}

/// Combined standard error of a difference of independent estimates.
pub fn combined_stderr(a: &MCEstimate, b: &MCEstimate) -> f64 {
    (a.stderr * a.stderr + b.stderr * b.stderr).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: u64 = sample_rng(7, 0).gen();
        let b: u64 = sample_rng(7, 1).gen();
        let c: u64 = sample_rng(7, 0).gen();
        let d: u64 = sample_rng(8, 0).gen();
        assert_eq!(a, c);
        assert_ne!(a, b);
        assert_ne!(a, d);
    }

    #[test]
    fn estimate_basic() {
        let e = MCEstimate::from_values(&[1.0, 2.0, 3.0, 4.0], 1);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        let c = MCEstimate::from_values(&[2.0; 10], 1);
        assert_eq!(c.stderr, 0.0);
        assert_eq!(c.effective_sample_size, 10.0);
    }

    #[test]
    fn ratio_of_proportional_is_exact() {
        let den = [1.0, 2.0, 5.0, 0.5];
        let num: Vec<f64> = den.iter().map(|x| 3.0 * x).collect();
        let r = ratio_estimate(&num, &den, 0);
        assert!((r.mean - 3.0).abs() < 1e-15);
        assert!(r.stderr < 1e-15);
    }
}

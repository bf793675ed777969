use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::algebra::descendant_3pt;
use super::gram::GramCache;
use crate::error::{LcftError, Result};
use crate::params::CFTParams;

/// Truncated four-point block in the `(0, z, 1, infinity)` frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockEval {
    pub p: f64,
    pub deltas: [f64; 4],
    pub z: Complex64,
    pub level: usize,
    /// Internal weight `Delta_{Q+ip}`.
    pub delta: f64,
    pub coefficients: Vec<Complex64>,
    /// `z^{Delta - Delta1 - Delta2}` on the principal branch.
    pub prefactor: Complex64,
    pub value: Complex64,
    pub tail_estimate: f64,
}

impl BlockEval {
    /// Value truncated at a lower level.
    pub fn partial(&self, level: usize) -> Complex64 {
        self.prefactor * series(&self.coefficients[..=level.min(self.level)], self.z)
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn series(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(c(0.0), |acc, &a| acc * z + a)
}

/// Level-by-level coefficients
/// `sum_{nu, nu'} w(D1, D2, D; nu) G^{-1}(nu, nu') w(D4, D3, D; nu')`.
pub fn block_coefficients(
    delta: Complex64,
    deltas: [Complex64; 4],
    central_charge: Complex64,
    max_level: usize,
    cache: &GramCache,
) -> Result<Vec<Complex64>> {
    let levels = cache.levels(max_level, delta, central_charge)?;
    let [d1, d2, d3, d4] = deltas;
    let mut out = Vec::with_capacity(max_level + 1);
    for g in levels {
        let left: Vec<Complex64> = g.basis.iter().map(|nu| descendant_3pt(d1, d2, delta, nu)).collect();
        let right: Vec<Complex64> = g.basis.iter().map(|nu| descendant_3pt(d4, d3, delta, nu)).collect();
        let mut s = c(0.0);
        for (i, row) in g.gram_inverse.iter().enumerate() {
            let mut t = c(0.0);
            for (j, v) in row.iter().enumerate() {
                t += v * right[j];
            }
            s += left[i] * t;
        }
        out.push(s);
    }
    Ok(out)
}

/// Geometric bound on the omitted levels, from the ratio of the last few
/// coefficients (floored at `|z|`). Infinite when the ratio reaches one.
pub fn tail_estimate(coeffs: &[Complex64], z: Complex64, prefactor: Complex64) -> f64 {
    let az = z.norm();
    let n = coeffs.len();
    let mut ratio = az;
    for k in n.saturating_sub(3).max(1)..n {
        let prev = coeffs[k - 1].norm();
        if prev > 0.0 {
            ratio = ratio.max(coeffs[k].norm() / prev * az);
        }
    }
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let last = coeffs[n - 1].norm() * az.powi(n as i32 - 1);
    prefactor.norm() * last * ratio / (1.0 - ratio)
}

pub fn block_with_cache(
    p: f64,
    deltas: [f64; 4],
    z: Complex64,
    max_level: usize,
    params: &CFTParams,
    cache: &GramCache,
) -> Result<BlockEval> {
    if !(z.norm() < 1.0) {
        return Err(LcftError::domain(format!("block needs |z| < 1, got |z| = {}", z.norm())));
    }
    if z.norm() == 0.0 {
        return Err(LcftError::domain("block needs z != 0"));
    }
    let delta = params.spectral_weight(p);
    let dc = deltas.map(c);
    let coefficients = block_coefficients(c(delta), dc, c(params.central_charge()), max_level, cache)?;
    let prefactor = (z.ln() * (delta - deltas[0] - deltas[1])).exp();
    let value = prefactor * series(&coefficients, z);
    let tail = tail_estimate(&coefficients, z, prefactor);
    Ok(BlockEval {
        p,
        deltas,
        z,
        level: max_level,
        delta,
        coefficients,
        prefactor,
        value,
        tail_estimate: tail,
    })
}

/// Truncated block through the process-wide Gram cache.
pub fn block(p: f64, deltas: [f64; 4], z: Complex64, max_level: usize, params: &CFTParams) -> Result<BlockEval> {
    block_with_cache(p, deltas, z, max_level, params, GramCache::global())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_zero_is_prefactor() {
        let params = CFTParams::new(1.2, 1.0).unwrap();
        let z = Complex64::new(0.3, 0.2);
        let b = block(0.7, [0.4, 0.5, 0.6, 0.7], z, 0, &params).unwrap();
        let d = params.spectral_weight(0.7);
        let expect = (z.ln() * (d - 0.4 - 0.5)).exp();
        assert_eq!(b.value, expect);
        assert_eq!(b.coefficients, vec![c(1.0)]);
    }

    #[test]
    fn level_one_coefficient() {
        let params = CFTParams::new(1.0, 1.0).unwrap();
        let ds = [0.3, 0.45, 0.8, 0.2];
        let b = block(1.3, ds, Complex64::new(0.2, 0.0), 4, &params).unwrap();
        let d = b.delta;
        let expect = (d + ds[1] - ds[0]) * (d + ds[2] - ds[3]) / (2.0 * d);
        assert!((b.coefficients[1] - expect).norm() < 1e-13);
    }

    #[test]
    fn symmetric_externals_real() {
        let params = CFTParams::new(1.4, 1.0).unwrap();
        let b = block(0.9, [0.6; 4], Complex64::new(0.25, 0.1), 8, &params).unwrap();
        for co in &b.coefficients {
            assert_eq!(co.im, 0.0);
        }
    }

    #[test]
    fn truncation_converges() {
        let params = CFTParams::new(1.0, 1.0).unwrap();
        for p in [0.2, 1.0, 3.0] {
            let b = block(p, [0.5, 0.6, 0.7, 0.55], Complex64::new(0.4, 0.0), 12, &params).unwrap();
            let diffs: Vec<f64> = (6..=12).map(|l| (b.partial(l) - b.partial(l - 1)).norm()).collect();
            for w in diffs.windows(2) {
                assert!(w[1] < w[0], "p {p}: {diffs:?}");
            }
            assert!(b.tail_estimate >= 0.0 && b.tail_estimate < diffs[6] * 10.0);
        }
    }

    #[test]
    fn rejects_outside_disk() {
        let params = CFTParams::new(1.0, 1.0).unwrap();
        assert!(block(1.0, [0.5; 4], Complex64::new(1.0, 0.0), 2, &params).is_err());
    }
}

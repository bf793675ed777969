use std::sync::Arc;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::field::{map_aligned, FieldSampler, Geometry};
use crate::error::{LcftError, Result};
use crate::stats::sample_rng;

/// Field `phi(theta) = sum_{n <= N} (x_n cos n theta - y_n sin n theta) / sqrt(n)`
/// with i.i.d. standard normal `x_n, y_n`, so that the covariance is
/// `sum cos(n dtheta) / n -> -ln|e^{i theta} - e^{i theta'}|`.
///
/// With `includes_zero_mode` a further standard normal constant is added
/// (drawn after the oscillating modes), raising the variance by one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleFieldSpec {
    pub modes: usize,
    pub seed: u64,
    #[serde(default)]
    pub includes_zero_mode: bool,
    /// Number of uniform grid points; defaults to the smallest 5-smooth
    /// integer `>= 4 N`.
    #[serde(default)]
    pub grid: Option<usize>,
}

impl CircleFieldSpec {
    pub fn new(modes: usize, seed: u64) -> Self {
        CircleFieldSpec { modes, seed, includes_zero_mode: false, grid: None }
    }

    pub fn grid_points(&self) -> usize {
        self.grid.unwrap_or_else(|| smooth_at_least(4 * self.modes.max(1)))
    }
}

/// Smallest integer `>= n` with no prime factor above 5.
pub fn smooth_at_least(n: usize) -> usize {
    (n.max(1)..)
        .find(|&k| {
            let mut k = k;
            for p in [2, 3, 5] {
                while k % p == 0 {
                    k /= p;
                }
            }
            k == 1
        })
        .unwrap()
}

pub fn harmonic(n: usize) -> f64 {
    (1..=n).rev().map(|k| 1.0 / k as f64).sum()
}

/// `sum_{n <= N} cos(n dtheta) / n`.
pub fn circle_truncated_covariance(modes: usize, dtheta: f64) -> f64 {
    (1..=modes).rev().map(|n| (n as f64 * dtheta).cos() / n as f64).sum()
}

pub struct CircleSampler {
    spec: CircleFieldSpec,
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    areas: Arc<[f64]>,
    variance: f64,
}

const BATCH: usize = 64;

impl CircleSampler {
    pub fn new(spec: CircleFieldSpec) -> Result<Self> {
        if spec.modes == 0 {
            return Err(LcftError::config("circle field needs at least one mode"));
        }
        let n = spec.grid_points();
        if n < 2 * spec.modes + 1 {
            return Err(LcftError::config(format!(
                "circle grid of {n} points cannot resolve {} modes (need >= {})",
                spec.modes,
                2 * spec.modes + 1
            )));
        }
        let fft = FftPlanner::new().plan_fft_inverse(n);
        let areas: Arc<[f64]> = vec![1.0 / n as f64; n].into();
        let variance = harmonic(spec.modes) + if spec.includes_zero_mode { 1.0 } else { 0.0 };
        Ok(CircleSampler { spec, n, fft, areas, variance })
    }

    pub fn spec(&self) -> &CircleFieldSpec {
        &self.spec
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n).map(|k| 2.0 * std::f64::consts::PI * k as f64 / self.n as f64).collect()
    }

    /// Half-spectrum `(x_n + i y_n) / (2 sqrt n)` and the constant term.
    fn draw(&self, index: u64) -> (Vec<Complex64>, f64) {
        let mut rng = sample_rng(self.spec.seed, index);
        let mut h = Vec::with_capacity(self.spec.modes + 1);
        h.push(Complex64::new(0.0, 0.0));
        for k in 1..=self.spec.modes {
            let x: f64 = StandardNormal.sample(&mut rng);
            let y: f64 = StandardNormal.sample(&mut rng);
            h.push(Complex64::new(x, y) / (2.0 * (k as f64).sqrt()));
        }
        let c = if self.spec.includes_zero_mode { StandardNormal.sample(&mut rng) } else { 0.0 };
        (h, c)
    }

    /// Fills `buf` with the Hermitian spectrum of `a + i b`.
    fn pack(&self, buf: &mut [Complex64], a: &[Complex64], b: Option<&[Complex64]>) {
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let i = Complex64::new(0.0, 1.0);
        for k in 1..a.len() {
            let (pa, pb) = (a[k], b.map_or(Complex64::new(0.0, 0.0), |b| b[k]));
            buf[k] = pa + i * pb;
            buf[self.n - k] = pa.conj() + i * pb.conj();
        }
    }

    fn synth_batch(&self, start: u64, count: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(count);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let mut j = 0;
        while j < count {
            let (ha, ca) = self.draw(start + j as u64);
            let second = if j + 1 < count { Some(self.draw(start + j as u64 + 1)) } else { None };
            self.pack(&mut buf, &ha, second.as_ref().map(|s| s.0.as_slice()));
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            out.push(buf.iter().map(|v| v.re + ca).collect());
            if let Some((_, cb)) = second {
                out.push(buf.iter().map(|v| v.im + cb).collect());
            }
            j += 2;
        }
        out
    }
}

impl FieldSampler for CircleSampler {
    fn geometry(&self) -> Geometry {
        Geometry::Circle
    }
    fn seed(&self) -> u64 {
        self.spec.seed
    }
    fn grid_len(&self) -> usize {
        self.n
    }
    fn cell_areas(&self) -> &Arc<[f64]> {
        &self.areas
    }
    fn variance(&self) -> f64 {
        self.variance
    }
    fn robin_constant(&self) -> f64 {
        0.0
    }

    fn map_samples<T, F>(&self, start: u64, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &[f64]) -> T + Sync,
    {
        map_aligned(start, count, BATCH, |s, c| self.synth_batch(s, c), f)
    }
}

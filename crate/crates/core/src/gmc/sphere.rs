use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::circle::{harmonic, smooth_at_least};
use super::field::{map_aligned, FieldSampler, Geometry};
use crate::error::{LcftError, Result};
use crate::special::quadrature::gauss_legendre;
use crate::stats::sample_rng;

/// `X_L = sqrt(2 pi) sum_{1 <= l <= L} sum_{|m| <= l} a_lm Y_lm / sqrt(l (l + 1))`
/// with real orthonormal harmonics on the unit sphere.
///
/// Coefficients are drawn per sample in the order `l = 1..=L`, `m = 0..=l`,
/// cosine part then (for `m > 0`) sine part. Degree is outermost, so the
/// fields at two cutoffs with the same seed share their low modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereFieldSpec {
    pub lmax: usize,
    pub seed: u64,
    /// Gauss-Legendre latitude rings; defaults to `lmax + 1`.
    #[serde(default)]
    pub nlat: Option<usize>,
    /// Uniform longitudes; defaults to the smallest 5-smooth integer `>= 2 lmax + 2`.
    #[serde(default)]
    pub nlon: Option<usize>,
}

impl SphereFieldSpec {
    pub fn new(lmax: usize, seed: u64) -> Self {
        SphereFieldSpec { lmax, seed, nlat: None, nlon: None }
    }

    pub fn nlat(&self) -> usize {
        self.nlat.unwrap_or(self.lmax + 1)
    }

    pub fn nlon(&self) -> usize {
        self.nlon.unwrap_or_else(|| smooth_at_least(2 * self.lmax + 2))
    }
}

/// `sum_{l=1}^{L} (2l + 1) / (2 l (l + 1)) P_l(t)`.
pub fn sphere_truncated_covariance(lmax: usize, cos_angle: f64) -> f64 {
    let t = cos_angle.clamp(-1.0, 1.0);
    let (mut p0, mut p1) = (1.0, t);
    let mut s = 0.0;
    for l in 1..=lmax {
        let lf = l as f64;
        s += (2.0 * lf + 1.0) / (2.0 * lf * (lf + 1.0)) * p1;
        let p2 = ((2.0 * lf + 1.0) * t * p1 - lf * p0) / (lf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    s
}

/// `C_L(x, x) = (H_L + H_{L+1} - 1) / 2`.
pub fn sphere_truncated_variance(lmax: usize) -> f64 {
    0.5 * (harmonic(lmax) + harmonic(lmax + 1) - 1.0)
}

/// Gauss-Legendre latitudes times uniform longitudes. Cell `(i, k)` is stored
/// at `i * nlon + k`; rings run from south (`cos theta` near -1) to north.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub lmax: usize,
    pub nlat: usize,
    pub nlon: usize,
    pub cos_theta: Vec<f64>,
    pub lat_weights: Vec<f64>,
    pub areas: Arc<[f64]>,
}

impl SphereGrid {
    pub fn new(lmax: usize, nlat: usize, nlon: usize) -> Result<Self> {
        if lmax == 0 {
            return Err(LcftError::config("sphere field needs lmax >= 1"));
        }
        if nlon < 2 * lmax + 1 {
            return Err(LcftError::config(format!(
                "{nlon} longitudes cannot resolve degree {lmax} (need >= {})",
                2 * lmax + 1
            )));
        }
        if nlat < lmax + 1 {
            return Err(LcftError::config(format!(
                "{nlat} latitude rings cannot resolve degree {lmax} (need >= {})",
                lmax + 1
            )));
        }
        let (x, w) = gauss_legendre(nlat);
        let dphi = 2.0 * PI / nlon as f64;
        let areas: Vec<f64> = w.iter().flat_map(|&wi| std::iter::repeat(wi * dphi).take(nlon)).collect();
        Ok(SphereGrid { lmax, nlat, nlon, cos_theta: x, lat_weights: w, areas: areas.into() })
    }

    pub fn len(&self) -> usize {
        self.nlat * self.nlon
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn phi(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.nlon as f64
    }

    pub fn unit_vector(&self, cell: usize) -> [f64; 3] {
        let (i, k) = (cell / self.nlon, cell % self.nlon);
        let z = self.cos_theta[i];
        let s = (1.0 - z * z).max(0.0).sqrt();
        let p = self.phi(k);
        [s * p.cos(), s * p.sin(), z]
    }

    pub fn unit_vectors(&self) -> Vec<[f64; 3]> {
        (0..self.len()).map(|c| self.unit_vector(c)).collect()
    }
}

/// Normalised associated Legendre functions `Pbar_l^m(x)` for `l = m..=lmax`,
/// with `int Pbar^2 dx = 1 / (2 pi)` (no Condon-Shortley sign).
pub fn legendre_column(m: usize, lmax: usize, x: f64, out: &mut [f64]) {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
    }
    out[0] = pmm;
    if lmax == m {
        return;
    }
    let mf = m as f64;
    out[1] = (2.0 * mf + 3.0).sqrt() * x * pmm;
    for l in (m + 2)..=lmax {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
        out[l - m] = a * (x * out[l - m - 1] - b * out[l - m - 2]);
    }
}

pub struct SphereSampler {
    spec: SphereFieldSpec,
    grid: SphereGrid,
    fft: Arc<dyn Fft<f64>>,
    variance: f64,
    batch: usize,
    /// `sqrt(2 pi / (l (l + 1)))`, zero at `l = 0`.
    scale: Vec<f64>,
    /// Legendre recursion coefficients per `m`: `(a_lm, a_lm b_lm)` for `l >= m + 2`.
    recur: Vec<Vec<(f64, f64)>>,
    /// `Pbar_m^m` at the northern rings, per `m`.
    seeds: Vec<Vec<f64>>,
    /// Northern ring cosines, equator last when `nlat` is odd.
    north_x: Vec<f64>,
}

impl SphereSampler {
    pub fn new(spec: SphereFieldSpec) -> Result<Self> {
        let grid = SphereGrid::new(spec.lmax, spec.nlat(), spec.nlon())?;
        let fft = FftPlanner::new().plan_fft_inverse(grid.nlon);
        let variance = sphere_truncated_variance(spec.lmax);
        // keep the per-batch spectral buffer near 2^24 complex entries
        let per = grid.nlat * (spec.lmax + 1);
        let batch = ((1usize << 24) / per).clamp(2, 64) & !1;
        let scale = (0..=spec.lmax)
            .map(|l| if l == 0 { 0.0 } else { (2.0 * PI / (l * (l + 1)) as f64).sqrt() })
            .collect();
        let lmax = spec.lmax;
        let nh = grid.nlat.div_ceil(2);
        let north_x: Vec<f64> = (0..nh).map(|j| grid.cos_theta[grid.nlat - 1 - j]).collect();
        let recur = (0..=lmax)
            .map(|m| {
                let mf = m as f64;
                ((m + 2)..=lmax)
                    .map(|l| {
                        let lf = l as f64;
                        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                        let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
                        (a, a * b)
                    })
                    .collect()
            })
            .collect();
        let mut seeds = Vec::with_capacity(lmax + 1);
        let mut cur: Vec<f64> = vec![1.0 / (4.0 * PI).sqrt(); nh];
        let sin: Vec<f64> = north_x.iter().map(|x| (1.0 - x * x).max(0.0).sqrt()).collect();
        for m in 0..=lmax {
            if m > 0 {
                let f = ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
                cur.iter_mut().zip(&sin).for_each(|(c, s)| *c *= f * s);
            }
            seeds.push(cur.clone());
        }
        Ok(SphereSampler { spec, grid, fft, variance, batch, scale, recur, seeds, north_x })
    }

    pub fn spec(&self) -> &SphereFieldSpec {
        &self.spec
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn batch_size(&self) -> usize {
        self.batch
    }

    /// Scaled coefficients per `m`, split by the parity of `l - m`; each is a
    /// row-major `(rows x 2B)` matrix with columns `(cos, sin)` per sample.
    fn draw_batch(&self, start: u64, count: usize) -> Vec<[Vec<f64>; 2]> {
        let lmax = self.spec.lmax;
        let w = 2 * count;
        let mut coef: Vec<[Vec<f64>; 2]> = (0..=lmax)
            .map(|m| {
                let n = lmax - m + 1;
                [vec![0.0; n.div_ceil(2) * w], vec![0.0; (n / 2) * w]]
            })
            .collect();
        for b in 0..count {
            let mut rng = sample_rng(self.spec.seed, start + b as u64);
            for l in 1..=lmax {
                for (m, cm) in coef.iter_mut().enumerate().take(l + 1) {
                    let amp = if m == 0 { 1.0 } else { std::f64::consts::SQRT_2 };
                    let row = (l - m) / 2;
                    let par = (l - m) % 2;
                    let s = self.scale[l] * amp;
                    let c: f64 = StandardNormal.sample(&mut rng);
                    cm[par][row * w + 2 * b] = s * c;
                    if m > 0 {
                        let sn: f64 = StandardNormal.sample(&mut rng);
                        cm[par][row * w + 2 * b + 1] = s * sn;
                    }
                }
            }
        }
        coef
    }

    /// `Pbar_l^m` at the northern rings, split by parity of `l - m`.
    fn legendre_tables(&self, m: usize, pe: &mut [f64], po: &mut [f64]) {
        let lmax = self.spec.lmax;
        let nh = self.north_x.len();
        let x = &self.north_x;
        pe[..nh].copy_from_slice(&self.seeds[m]);
        if lmax == m {
            return;
        }
        let c = (2.0 * m as f64 + 3.0).sqrt();
        for j in 0..nh {
            po[j] = c * x[j] * pe[j];
        }
        for (k, &(a, ab)) in self.recur[m].iter().enumerate() {
            let l_off = k + 2;
            let (dst, p1, p2) = if l_off % 2 == 0 {
                let (lo, hi) = pe.split_at_mut((l_off / 2) * nh);
                (&mut hi[..nh], &po[(l_off / 2 - 1) * nh..][..nh], &lo[(l_off / 2 - 1) * nh..][..nh])
            } else {
                let (lo, hi) = po.split_at_mut((l_off / 2) * nh);
                (&mut hi[..nh], &pe[(l_off / 2) * nh..][..nh], &lo[(l_off / 2 - 1) * nh..][..nh])
            };
            for j in 0..nh {
                dst[j] = a * x[j] * p1[j] - ab * p2[j];
            }
        }
    }

    fn synth_batch(&self, start: u64, count: usize) -> Vec<Vec<f64>> {
        let lmax = self.spec.lmax;
        let (nlat, nlon) = (self.grid.nlat, self.grid.nlon);
        let nh = nlat.div_ceil(2);
        let w = 2 * count;
        let coef = self.draw_batch(start, count);
        // spectrum[(ring * count + b) * (lmax + 1) + m] = (cos, sin) amplitude
        let mut spec = vec![Complex64::new(0.0, 0.0); nlat * count * (lmax + 1)];
        for (m, cm) in coef.iter().enumerate() {
            let n = lmax - m + 1;
            let (ne, no) = (n.div_ceil(2), n / 2);
            // transposed tables: pt[(l - m) / 2][j] by parity, rows over l
            let mut pe = vec![0.0; ne * nh];
            let mut po = vec![0.0; no * nh];
            self.legendre_tables(m, &mut pe, &mut po);
            let mut e = vec![0.0; nh * w];
            let mut o = vec![0.0; nh * w];
            unsafe {
                matrixmultiply::dgemm(
                    nh, ne, w, 1.0, pe.as_ptr(), 1, nh as isize, cm[0].as_ptr(), w as isize, 1, 0.0,
                    e.as_mut_ptr(), w as isize, 1,
                );
                if no > 0 {
                    matrixmultiply::dgemm(
                        nh, no, w, 1.0, po.as_ptr(), 1, nh as isize, cm[1].as_ptr(), w as isize, 1, 0.0,
                        o.as_mut_ptr(), w as isize, 1,
                    );
                }
            }
            for j in 0..nh {
                let north = nlat - 1 - j;
                let south = j;
                for b in 0..count {
                    let (ec, es) = (e[j * w + 2 * b], e[j * w + 2 * b + 1]);
                    let (oc, os) = (o[j * w + 2 * b], o[j * w + 2 * b + 1]);
                    spec[(north * count + b) * (lmax + 1) + m] = Complex64::new(ec + oc, es + os);
                    if south != north {
                        spec[(south * count + b) * (lmax + 1) + m] = Complex64::new(ec - oc, es - os);
                    }
                }
            }
        }
        let mut out = vec![vec![0.0; nlat * nlon]; count];
        let mut buf = vec![Complex64::new(0.0, 0.0); nlon];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let i = Complex64::new(0.0, 1.0);
        for ring in 0..nlat {
            let mut b = 0;
            while b < count {
                let sa = &spec[(ring * count + b) * (lmax + 1)..][..lmax + 1];
                let sb = (b + 1 < count).then(|| &spec[(ring * count + b + 1) * (lmax + 1)..][..lmax + 1]);
                buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                // f = c_0 + sum_m c_m cos m phi + s_m sin m phi as a Hermitian sum
                let hb0 = sb.map_or(0.0, |s| s[0].re);
                buf[0] = Complex64::new(sa[0].re, hb0);
                for m in 1..=lmax {
                    let ha = Complex64::new(sa[m].re, -sa[m].im) * 0.5;
                    let hb = sb.map_or(Complex64::new(0.0, 0.0), |s| Complex64::new(s[m].re, -s[m].im) * 0.5);
                    buf[m] = ha + i * hb;
                    buf[nlon - m] = ha.conj() + i * hb.conj();
                }
                self.fft.process_with_scratch(&mut buf, &mut scratch);
                let row = ring * nlon;
                for (k, v) in buf.iter().enumerate() {
                    out[b][row + k] = v.re;
                }
                if sb.is_some() {
                    for (k, v) in buf.iter().enumerate() {
                        out[b + 1][row + k] = v.im;
                    }
                }
                b += 2;
            }
        }
        out
    }
}

impl FieldSampler for SphereSampler {
    fn geometry(&self) -> Geometry {
        Geometry::Sphere
    }
    fn seed(&self) -> u64 {
        self.spec.seed
    }
    fn grid_len(&self) -> usize {
        self.grid.len()
    }
    fn cell_areas(&self) -> &Arc<[f64]> {
        &self.grid.areas
    }
    fn variance(&self) -> f64 {
        self.variance
    }
    fn robin_constant(&self) -> f64 {
        std::f64::consts::LN_2 - 0.5
    }

    fn map_samples<T, F>(&self, start: u64, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &[f64]) -> T + Sync,
    {
        map_aligned(start, count, self.batch, |s, c| self.synth_batch(s, c), f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `P_l^m` from the explicit finite sum, without Condon-Shortley sign.
    fn assoc_legendre_explicit(l: usize, m: usize, x: f64) -> f64 {
        // P_l^m = (1 - x^2)^{m/2} d^m/dx^m P_l, P_l = 2^{-l} sum_k (-1)^k C(l,k) C(2l-2k,l) x^{l-2k}
        let binom = |n: usize, k: usize| -> f64 { (0..k).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64) };
        let mut d = 0.0;
        for k in 0..=l / 2 {
            let pw = l - 2 * k;
            if pw < m {
                continue;
            }
            let falling: f64 = (0..m).map(|i| (pw - i) as f64).product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            d += sign * binom(l, k) * binom(2 * l - 2 * k, l) * falling * x.powi((pw - m) as i32);
        }
        d / 2f64.powi(l as i32) * (1.0 - x * x).powf(m as f64 / 2.0)
    }

    fn fact(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn legendre_matches_explicit() {
        let lmax = 9;
        let mut col = vec![0.0; lmax + 1];
        for m in 0..=lmax {
            for &x in &[-0.9, -0.2, 0.0, 0.35, 0.77] {
                legendre_column(m, lmax, x, &mut col);
                for l in m..=lmax {
                    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * fact(l - m) / fact(l + m)).sqrt();
                    let e = norm * assoc_legendre_explicit(l, m, x);
                    assert!((col[l - m] - e).abs() < 1e-12, "l {l} m {m} x {x}");
                }
            }
        }
    }

    #[test]
    fn synthesis_matches_direct_mode_sum() {
        let lmax = 7;
        let s = SphereSampler::new(SphereFieldSpec { lmax, seed: 5, nlat: Some(9), nlon: Some(17) }).unwrap();
        let g = s.grid();
        let fields = s.map_samples(0, 3, |_, v| v.to_vec());
        for (idx, field) in fields.iter().enumerate() {
            let mut rng = sample_rng(5, idx as u64);
            let mut terms = Vec::new();
            for l in 1..=lmax {
                for m in 0..=l {
                    let c: f64 = StandardNormal.sample(&mut rng);
                    let sn: f64 = if m > 0 { StandardNormal.sample(&mut rng) } else { 0.0 };
                    terms.push((l, m, c, sn));
                }
            }
            for cell in 0..g.len() {
                let (i, k) = (cell / g.nlon, cell % g.nlon);
                let x = g.cos_theta[i];
                let phi = g.phi(k);
                let mut v = 0.0;
                for &(l, m, c, sn) in &terms {
                    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * fact(l - m) / fact(l + m)).sqrt();
                    let p = norm * assoc_legendre_explicit(l, m, x);
                    let y = if m == 0 {
                        c * p
                    } else {
                        std::f64::consts::SQRT_2 * p * (c * (m as f64 * phi).cos() + sn * (m as f64 * phi).sin())
                    };
                    v += (2.0 * PI / (l * (l + 1)) as f64).sqrt() * y;
                }
                assert!((v - field[cell]).abs() < 1e-10, "sample {idx} cell {cell}");
            }
        }
    }

    #[test]
    fn addition_theorem_gives_covariance() {
        // sum_m Y_lm(x) Y_lm(y) = (2l+1)/(4 pi) P_l(x . y), checked through the grid synthesis
        let lmax = 6;
        let mut col_a = vec![0.0; lmax + 1];
        let mut col_b = vec![0.0; lmax + 1];
        let (xa, pa, xb, pb) = (0.3f64, 0.4f64, -0.5f64, 2.0f64);
        let mut cov = 0.0;
        for m in 0..=lmax {
            legendre_column(m, lmax, xa, &mut col_a);
            legendre_column(m, lmax, xb, &mut col_b);
            for l in m.max(1)..=lmax {
                let w = if m == 0 { 1.0 } else { 2.0 * (m as f64 * (pa - pb)).cos() };
                cov += 2.0 * PI / (l * (l + 1)) as f64 * w * col_a[l - m] * col_b[l - m];
            }
        }
        let ua = [(1.0 - xa * xa).sqrt() * pa.cos(), (1.0 - xa * xa).sqrt() * pa.sin(), xa];
        let ub = [(1.0 - xb * xb).sqrt() * pb.cos(), (1.0 - xb * xb).sqrt() * pb.sin(), xb];
        let dot: f64 = ua.iter().zip(&ub).map(|(a, b)| a * b).sum();
        assert!((cov - sphere_truncated_covariance(lmax, dot)).abs() < 1e-13);
        assert!((sphere_truncated_covariance(lmax, 1.0) - sphere_truncated_variance(lmax)).abs() < 1e-13);
    }

    #[test]
    fn cutoffs_are_nested() {
        // with the same seed the higher cutoff adds independent modes only
        let lo = SphereSampler::new(SphereFieldSpec { lmax: 4, seed: 2, nlat: Some(9), nlon: Some(20) }).unwrap();
        let hi = SphereSampler::new(SphereFieldSpec { lmax: 8, seed: 2, nlat: Some(9), nlon: Some(20) }).unwrap();
        let a = lo.sample(0).values;
        let b = hi.sample(0).values;
        let mut rng = sample_rng(2, 0);
        let mut high = vec![0.0; a.len()];
        let g = hi.grid();
        let mut terms = Vec::new();
        for l in 1..=8usize {
            for m in 0..=l {
                let c: f64 = StandardNormal.sample(&mut rng);
                let sn: f64 = if m > 0 { StandardNormal.sample(&mut rng) } else { 0.0 };
                if l > 4 {
                    terms.push((l, m, c, sn));
                }
            }
        }
        let mut col = vec![0.0; 9];
        for (cell, h) in high.iter_mut().enumerate() {
            let (i, k) = (cell / g.nlon, cell % g.nlon);
            for &(l, m, c, sn) in &terms {
                legendre_column(m, 8, g.cos_theta[i], &mut col);
                let ph = m as f64 * g.phi(k);
                let y = if m == 0 { c } else { std::f64::consts::SQRT_2 * (c * ph.cos() + sn * ph.sin()) };
                *h += (2.0 * PI / (l * (l + 1)) as f64).sqrt() * col[l - m] * y;
            }
        }
        for i in 0..a.len() {
            assert!((a[i] + high[i] - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn grid_areas_sum_to_sphere() {
        let g = SphereGrid::new(16, 17, 34).unwrap();
        let total: f64 = g.areas.iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
        assert!(SphereGrid::new(16, 17, 32).is_err());
        assert!(SphereGrid::new(16, 10, 40).is_err());
    }

    #[test]
    fn batch_boundaries_do_not_matter() {
        let s = SphereSampler::new(SphereFieldSpec::new(12, 9)).unwrap();
        let all = s.map_samples(0, s.batch_size() + 3, |_, v| v.to_vec());
        let tail = s.map_samples(s.batch_size() as u64 + 1, 2, |_, v| v.to_vec());
        assert_eq!(all[s.batch_size() + 1], tail[0]);
        assert_eq!(s.sample(2).values, all[2]);
    }
}

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{LcftError, Result};
use crate::params::CFTParams;
use crate::special::dozz::{dozz, round_metric};
use crate::special::quadrature::CompositeGaussLegendre;
use crate::special::upsilon::UpsilonEvaluator;
use crate::virasoro::{block_coefficients, CoefficientCache, GramCache};

/// Gauss-Legendre panels on `[0, p_max]` plus the block truncation level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralQuadrature {
    pub p_max: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
    /// Highest descendant level kept in the blocks.
    pub level: usize,
    /// Allowed relative size of the `p > p_max` tail.
    #[serde(default = "default_tail_tolerance")]
    pub tail_tolerance: f64,
}

fn default_tail_tolerance() -> f64 {
    1e-8
}

impl Default for SpectralQuadrature {
    fn default() -> Self {
        SpectralQuadrature { p_max: 12.0, panels: 12, nodes_per_panel: 16, level: 10, tail_tolerance: 1e-8 }
    }
}

impl SpectralQuadrature {
    pub fn new(p_max: f64, panels: usize, nodes_per_panel: usize, level: usize) -> Result<Self> {
        let q = SpectralQuadrature { p_max, panels, nodes_per_panel, level, tail_tolerance: default_tail_tolerance() };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_max > 0.0 && self.p_max.is_finite()) {
            return Err(LcftError::config(format!("p_max must be positive, got {}", self.p_max)));
        }
        if self.panels == 0 || self.nodes_per_panel == 0 {
            return Err(LcftError::config("spectral quadrature needs at least one panel and one node"));
        }
        if !(self.tail_tolerance > 0.0) {
            return Err(LcftError::config("tail_tolerance must be positive"));
        }
        Ok(())
    }

    /// Same panels with twice the nodes in each.
    pub fn refined(&self) -> Self {
        SpectralQuadrature { nodes_per_panel: 2 * self.nodes_per_panel, ..self.clone() }
    }

    pub fn nodes(&self) -> Vec<(f64, f64)> {
        CompositeGaussLegendre::new(self.nodes_per_panel, self.panels).points(0.0, self.p_max)
    }
}

/// Placement of the four insertions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// `(0, z, 1, infinity)` in the flat metric.
    #[default]
    Unit,
    /// `(0, z, 2, infinity)` with the block normalised by
    /// `2^{-(Delta + Delta3 + Delta4)}` and descendant factors taken at 2.
    Paper,
}

/// `z`-dependent metric factor multiplying the flat-frame value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricFactor {
    #[default]
    Flat,
    /// Moves the insertion at `z` to the round metric: `g(z)^{-Delta2}` with
    /// `g(z) = 4 / (1 + |z|^2)^2`.
    Round,
}

#[derive(Debug, Clone, Default)]
pub struct BootstrapOptions {
    pub frame: Frame,
    pub metric: MetricFactor,
    /// On-disk block coefficients, reused across runs.
    pub cache: Option<CoefficientCache>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegrandSample {
    pub p: f64,
    pub weight: f64,
    /// Folded integrand `Re f(p)` at the full truncation level.
    pub value: f64,
    /// Block tail estimate relative to `|F_p(z)|`.
    pub block_tail: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub z: Complex64,
    pub alphas: [f64; 4],
    pub frame: Frame,
    pub metric: MetricFactor,
    /// Four-point value without the global metric constant.
    pub value: f64,
    /// `by_level[l]`: value with blocks truncated at level `l`.
    pub by_level: Vec<f64>,
    pub samples: Vec<IntegrandSample>,
    /// Estimated relative size of the omitted `p > p_max` range.
    pub p_tail: f64,
    /// Largest relative block tail over the grid.
    pub block_tail: f64,
}

pub(crate) fn check_channel(alphas: &[f64; 4], params: &CFTParams) -> Result<()> {
    let q = params.q();
    for (j, &a) in alphas.iter().enumerate() {
        if !(a > 0.0 && a < q) {
            return Err(LcftError::domain(format!("alpha_{} = {a} outside (0, Q = {q})", j + 1)));
        }
    }
    if alphas[0] + alphas[1] <= q || alphas[2] + alphas[3] <= q {
        return Err(LcftError::domain(format!(
            "channel needs alpha1 + alpha2 > Q and alpha3 + alpha4 > Q; got {} and {} with Q = {q}",
            alphas[0] + alphas[1],
            alphas[2] + alphas[3]
        )));
    }
    Ok(())
}

/// Precomputed pieces shared by every node of one evaluation.
pub(crate) struct Integrand<'a> {
    alphas: [f64; 4],
    deltas: [f64; 4],
    z_block: Complex64,
    ln_const: f64,
    level: usize,
    params: &'a CFTParams,
    ev: UpsilonEvaluator,
    gram: &'a GramCache,
    cache: Option<&'a CoefficientCache>,
}

/// Integrand at one `p`, truncated at each level up to the maximum.
pub(crate) struct NodeValue {
    pub by_level: Vec<Complex64>,
    pub block_tail: f64,
}

impl<'a> Integrand<'a> {
    pub(crate) fn new(
        z: Complex64,
        alphas: [f64; 4],
        level: usize,
        params: &'a CFTParams,
        opts: &'a BootstrapOptions,
        gram: &'a GramCache,
    ) -> Result<Self> {
        check_channel(&alphas, params)?;
        if !(z.norm() > 0.0 && z.norm() < 1.0) {
            return Err(LcftError::domain(format!("four-point function needs 0 < |z| < 1, got |z| = {}", z.norm())));
        }
        let deltas = alphas.map(|a| params.conformal_weight(a));
        let (z_block, mut ln_const) = match opts.frame {
            Frame::Unit => (z, 0.0),
            Frame::Paper => (z / 2.0, -2.0 * deltas.iter().sum::<f64>() * 2f64.ln()),
        };
        if opts.metric == MetricFactor::Round {
            ln_const -= deltas[1] * round_metric(z).ln();
        }
        Ok(Integrand {
            alphas,
            deltas,
            z_block,
            ln_const,
            level,
            params,
            ev: UpsilonEvaluator::new(params.gamma())?,
            gram,
            cache: opts.cache.as_ref(),
        })
    }

    fn coefficients(&self, p: f64) -> Result<Vec<Complex64>> {
        match self.cache {
            Some(c) => c.coefficients_with(p.abs(), self.deltas, self.level, self.params, self.gram),
            None => {
                let r = |x: f64| Complex64::new(x, 0.0);
                block_coefficients(
                    r(self.params.spectral_weight(p)),
                    self.deltas.map(r),
                    r(self.params.central_charge()),
                    self.level,
                    self.gram,
                )
            }
        }
    }

    fn ln_dozz(&self, a: Complex64, b: f64, c: f64) -> Result<Complex64> {
        let r = |x: f64| Complex64::new(x, 0.0);
        let v = dozz(a, r(b), r(c), self.params, &self.ev)?;
        match v.log_value {
            Some(l) if !v.is_pole => Ok(l),
            _ => Err(LcftError::Accuracy(format!(
                "structure constant singular on the spectrum line at {a} (pole distance {:.2e})",
                v.pole_distance
            ))),
        }
    }

    pub(crate) fn eval(&self, p: f64) -> Result<NodeValue> {
        let alpha = Complex64::new(self.params.q(), p);
        let ln_c = self.ln_dozz(alpha, self.alphas[0], self.alphas[1])?.conj()
            + self.ln_dozz(alpha, self.alphas[2], self.alphas[3])?;
        let coeffs = self.coefficients(p)?;
        let delta = self.params.spectral_weight(p);
        let z = self.z_block;
        // |z^{Delta - D1 - D2}|^2, real exponent
        let ln_pref = 2.0 * (delta - self.deltas[0] - self.deltas[1]) * z.norm().ln();
        let scale = (ln_c + ln_pref + self.ln_const).exp();
        let mut partial = Complex64::new(0.0, 0.0);
        let mut zn = Complex64::new(1.0, 0.0);
        let mut by_level = Vec::with_capacity(coeffs.len());
        for a in &coeffs {
            partial += a * zn;
            zn *= z;
            by_level.push(scale * partial.norm_sqr());
        }
        let prefactor = Complex64::new((0.5 * ln_pref).exp(), 0.0);
        let tail = crate::virasoro::block::tail_estimate(&coeffs, z, prefactor);
        let block_tail = tail / (prefactor.re * partial.norm());
        Ok(NodeValue { by_level, block_tail })
    }
}

/// `conj(C(Q+ip, a1, a2)) C(Q+ip, a3, a4) |F_p(z)|^2` with the frame and
/// metric factors of `BootstrapOptions::default()`, blocks at `quad.level`.
pub fn spectral_integrand(
    p: f64,
    z: Complex64,
    alphas: [f64; 4],
    quad: &SpectralQuadrature,
    params: &CFTParams,
) -> Result<Complex64> {
    let opts = BootstrapOptions::default();
    let gram = GramCache::new();
    let f = Integrand::new(z, alphas, quad.level, params, &opts, &gram)?;
    Ok(*f.eval(p)?.by_level.last().unwrap())
}

pub fn four_point_bootstrap(
    z: Complex64,
    alphas: [f64; 4],
    quad: &SpectralQuadrature,
    params: &CFTParams,
) -> Result<BootstrapResult> {
    four_point_bootstrap_with(z, alphas, quad, params, &BootstrapOptions::default())
}

pub fn four_point_bootstrap_with(
    z: Complex64,
    alphas: [f64; 4],
    quad: &SpectralQuadrature,
    params: &CFTParams,
    opts: &BootstrapOptions,
) -> Result<BootstrapResult> {
    let gram = GramCache::new();
    integrate(z, alphas, quad, params, opts, &gram)
}

pub(crate) fn integrate(
    z: Complex64,
    alphas: [f64; 4],
    quad: &SpectralQuadrature,
    params: &CFTParams,
    opts: &BootstrapOptions,
    gram: &GramCache,
) -> Result<BootstrapResult> {
    quad.validate()?;
    let f = Integrand::new(z, alphas, quad.level, params, opts, gram)?;
    let nodes = quad.nodes();
    let values: Vec<NodeValue> = nodes.par_iter().map(|&(p, _)| f.eval(p)).collect::<Result<_>>()?;
    let mut by_level = vec![0.0; quad.level + 1];
    let mut samples = Vec::with_capacity(nodes.len());
    let mut block_tail = 0.0f64;
    for (&(p, w), v) in nodes.iter().zip(&values) {
        for (acc, x) in by_level.iter_mut().zip(&v.by_level) {
            *acc += w * x.re / PI;
        }
        block_tail = block_tail.max(v.block_tail);
        samples.push(IntegrandSample { p, weight: w, value: v.by_level[quad.level].re, block_tail: v.block_tail });
    }
    let value = by_level[quad.level];
    // Gaussian envelope |z|^{p^2 / 2}: int_P^inf ~ f(P) / (P ln(1/|z|))
    let decay = -f.z_block.norm().ln();
    let edge = f.eval(quad.p_max)?.by_level[quad.level].re.abs() / PI;
    let p_tail = edge / (quad.p_max * decay) / value.abs();
    if !(p_tail <= quad.tail_tolerance) {
        let grow = 2.0 * (p_tail / quad.tail_tolerance).ln() / decay;
        let suggest = (quad.p_max * quad.p_max + grow.max(0.0)).sqrt();
        return Err(LcftError::Accuracy(format!(
            "spectral tail {p_tail:.2e} above tolerance {:.0e}; raise p_max to about {:.1}",
            quad.tail_tolerance,
            suggest.ceil()
        )));
    }
    Ok(BootstrapResult {
        z,
        alphas,
        frame: opts.frame,
        metric: opts.metric,
        value,
        by_level,
        samples,
        p_tail,
        block_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_params;

    fn quad(level: usize) -> SpectralQuadrature {
        SpectralQuadrature::new(10.0, 8, 8, level).unwrap()
    }

    #[test]
    fn diagonal_integrand_is_even_and_real() {
        let p = derive_params(1.0, 1.0).unwrap();
        let a = [1.9, 1.8, 1.9, 1.8];
        let z = Complex64::new(0.3, 0.1);
        let f = spectral_integrand(0.7, z, a, &quad(4), &p).unwrap();
        let g = spectral_integrand(-0.7, z, a, &quad(4), &p).unwrap();
        assert!(f.re > 0.0 && f.im.abs() < 1e-12 * f.re);
        assert!((f - g).norm() < 1e-12 * f.norm());
    }

    #[test]
    fn folded_integrand_is_real() {
        let p = derive_params(1.2, 1.0).unwrap();
        let z = Complex64::new(0.25, -0.2);
        for (a, pp) in [([1.9, 1.5, 1.2, 2.0], 0.4), ([1.4, 1.6, 2.1, 1.0], 1.3), ([2.0, 2.1, 1.7, 1.8], 2.2)] {
            let f = spectral_integrand(pp, z, a, &quad(3), &p).unwrap();
            let g = spectral_integrand(-pp, z, a, &quad(3), &p).unwrap();
            assert!((f + g).im.abs() < 1e-12 * f.norm(), "{f} {g}");
        }
    }

    #[test]
    fn integrand_decays_in_p() {
        let p = derive_params(1.0, 1.0).unwrap();
        let a = [1.9, 1.8, 1.7, 1.9];
        let z = Complex64::new(0.3, 0.0);
        let f2 = spectral_integrand(2.0, z, a, &quad(4), &p).unwrap().norm();
        let f20 = spectral_integrand(20.0, z, a, &quad(4), &p).unwrap().norm();
        assert!(f20 < 1e-3 * f2, "{f20} vs {f2}");
    }

    #[test]
    fn diagonal_value_is_positive() {
        let p = derive_params(1.0, 1.0).unwrap();
        let r = four_point_bootstrap(Complex64::new(0.4, 0.0), [1.9, 1.8, 1.9, 1.8], &quad(4), &p).unwrap();
        assert!(r.value > 0.0);
        assert!(r.samples.iter().all(|s| s.value > 0.0));
        assert_eq!(r.by_level.len(), 5);
    }

    #[test]
    fn node_doubling() {
        let p = derive_params(1.0, 1.0).unwrap();
        let z = Complex64::new(0.4, 0.0);
        let a = [1.9, 1.8, 1.7, 1.9];
        let q = quad(3);
        let r1 = four_point_bootstrap(z, a, &q, &p).unwrap().value;
        let r2 = four_point_bootstrap(z, a, &q.refined(), &p).unwrap().value;
        assert!((r1 / r2 - 1.0).abs() < 1e-4, "{r1} {r2}");
    }

    #[test]
    fn paper_frame_is_a_rescaling() {
        // the (0, z, 2, inf) value is the unit-frame value at z / 2 times 2^{-2 sum Delta}
        let p = derive_params(1.0, 1.0).unwrap();
        let a = [1.9, 1.8, 1.7, 1.9];
        let z = Complex64::new(0.6, 0.1);
        let q = quad(3);
        let opts = BootstrapOptions { frame: Frame::Paper, ..Default::default() };
        let paper = four_point_bootstrap_with(z, a, &q, &p, &opts).unwrap().value;
        let unit = four_point_bootstrap(z / 2.0, a, &q, &p).unwrap().value;
        let sd: f64 = a.iter().map(|&x| p.conformal_weight(x)).sum();
        assert!((paper / (unit * 2f64.powf(-2.0 * sd)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn short_range_reports_tail() {
        let p = derive_params(1.0, 1.0).unwrap();
        let q = SpectralQuadrature::new(1.0, 2, 8, 2).unwrap();
        let e = four_point_bootstrap(Complex64::new(0.8, 0.0), [1.9, 1.8, 1.7, 1.9], &q, &p).unwrap_err();
        assert!(matches!(e, LcftError::Accuracy(ref m) if m.contains("raise p_max")), "{e}");
    }

    #[test]
    fn inadmissible_channels() {
        let p = derive_params(1.0, 1.0).unwrap();
        let z = Complex64::new(0.3, 0.0);
        assert!(four_point_bootstrap(z, [0.5, 0.6, 1.9, 1.9], &quad(2), &p).is_err());
        assert!(four_point_bootstrap(z, [2.6, 1.0, 1.9, 1.9], &quad(2), &p).is_err());
        assert!(four_point_bootstrap(Complex64::new(1.2, 0.0), [1.9, 1.8, 1.7, 1.9], &quad(2), &p).is_err());
    }
}

use serde::{Deserialize, Serialize};

use super::covariance::{sphere_covariance_unit, LN_DET_LAPLACIAN_SPHERE, ROBIN_SPHERE, SPHERE_AREA};
use crate::error::{LcftError, Result};
use crate::gmc::chaos::{check_gamma, weighted_mass};
use crate::gmc::sphere::{sphere_truncated_covariance, SphereFieldSpec, SphereGrid, SphereSampler};
use crate::gmc::{FieldSample, FieldSampler, Geometry};
use crate::params::{check_seiberg, CFTParams, InsertionSet};
use crate::special::gamma::ln_gamma_real;
use crate::stats::{ratio_estimate, MCEstimate};

/// How the insertion drift `exp(gamma alpha_j C(x_j, x))` is discretised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InsertionKernel {
    /// Truncated covariance `C_L(x_j, x)`: the exact Cameron-Martin shift of
    /// the truncated field, bounded by the truncated variance.
    #[default]
    Truncated,
    /// Exact log kernel at grid nodes; an insertion sitting on a node is
    /// moved by half a longitude cell.
    ExactLog,
}

#[derive(Debug, Clone)]
pub struct CorrelatorJob {
    pub insertions: InsertionSet,
    pub params: CFTParams,
    pub field: SphereFieldSpec,
    pub n_samples: usize,
    pub kernel: InsertionKernel,
    /// `ln det' Delta`; only shifts the overall constant.
    pub ln_det_laplacian: f64,
    /// `s = sum alpha - 2Q`.
    pub s: f64,
}

impl CorrelatorJob {
    pub fn new(insertions: InsertionSet, params: CFTParams, field: SphereFieldSpec, n_samples: usize) -> Result<Self> {
        let report = check_seiberg(&insertions, &params, 2)?;
        if !report.passes {
            return Err(LcftError::domain(format!("Seiberg bounds fail: {}", report.violations.join("; "))));
        }
        check_gamma(params.gamma())?;
        Ok(CorrelatorJob {
            insertions,
            params,
            field,
            n_samples,
            kernel: InsertionKernel::Truncated,
            ln_det_laplacian: LN_DET_LAPLACIAN_SPHERE,
            s: report.s,
        })
    }

    pub fn with_kernel(mut self, kernel: InsertionKernel) -> Self {
        self.kernel = kernel;
        self
    }

    /// Exponent applied to the random mass, `-s / gamma`.
    pub fn exponent(&self) -> f64 {
        -self.s / self.params.gamma()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelatorEstimate {
    /// Full correlator including the prefactor.
    pub value: MCEstimate,
    /// `E[Z^{-s/gamma}]` alone.
    pub moment: MCEstimate,
    pub ln_prefactor: f64,
    pub s: f64,
}

/// Cell weights `area * exp(gamma sum_j alpha_j K_j(cell))`.
pub fn insertion_weights(grid: &SphereGrid, insertions: &InsertionSet, gamma: f64, kernel: InsertionKernel) -> Vec<f64> {
    let pts: Vec<[f64; 3]> = insertions.points().iter().map(|p| p.to_unit_vector()).collect();
    let alphas = insertions.weights();
    let dphi = 2.0 * std::f64::consts::PI / grid.nlon as f64;
    let pts: Vec<[f64; 3]> = match kernel {
        InsertionKernel::Truncated => pts,
        InsertionKernel::ExactLog => pts
            .into_iter()
            .map(|p| {
                let on_node = (0..grid.len()).any(|c| {
                    let u = grid.unit_vector(c);
                    u.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < 1e-18
                });
                if on_node {
                    let (c, s) = ((0.5 * dphi).cos(), (0.5 * dphi).sin());
                    [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
                } else {
                    p
                }
            })
            .collect(),
    };
    (0..grid.len())
        .map(|cell| {
            let u = grid.unit_vector(cell);
            let drift: f64 = pts
                .iter()
                .zip(alphas)
                .map(|(p, &a)| {
                    let k = match kernel {
                        InsertionKernel::Truncated => {
                            let dot: f64 = p.iter().zip(&u).map(|(a, b)| a * b).sum();
                            sphere_truncated_covariance(grid.lmax, dot)
                        }
                        InsertionKernel::ExactLog => sphere_covariance_unit(*p, u),
                    };
                    a * k
                })
                .sum();
            grid.areas[cell] * (gamma * drift).exp()
        })
        .collect()
}

/// Random mass `Z` of one sphere field sample with the default kernel.
pub fn z_random_mass(sample: &FieldSample, insertions: &InsertionSet, params: &CFTParams, grid: &SphereGrid) -> Result<f64> {
    if sample.geometry != Geometry::Sphere {
        return Err(LcftError::domain("random mass needs a sphere field sample"));
    }
    for &a in insertions.weights() {
        if a >= params.q() {
            return Err(LcftError::domain(format!("insertion weight {a} is not below Q = {}", params.q())));
        }
    }
    let w = insertion_weights(grid, insertions, params.gamma(), InsertionKernel::Truncated);
    Ok(weighted_mass(&sample.values, &w, params.gamma(), sample.variance[0], sample.robin_constant))
}

/// Logarithm of everything multiplying `E[Z^{-s/gamma}]`.
pub fn ln_prefactor(job: &CorrelatorJob) -> Result<f64> {
    let pts: Vec<[f64; 3]> = job.insertions.points().iter().map(|p| p.to_unit_vector()).collect();
    let a = job.insertions.weights();
    let mut ln = 0.0;
    for i in 0..a.len() {
        ln += 0.5 * a[i] * a[i] * ROBIN_SPHERE;
        for j in (i + 1)..a.len() {
            ln += a[i] * a[j] * sphere_covariance_unit(pts[i], pts[j]);
        }
    }
    let g = job.params.gamma();
    let sg = job.s / g;
    ln += ln_gamma_real(sg) - g.ln() - sg * job.params.mu().ln();
    ln -= 0.5 * (job.ln_det_laplacian - SPHERE_AREA.ln());
    Ok(ln)
}

/// Per-sample values for several jobs sharing one field (common random numbers).
#[derive(Debug, Clone)]
pub struct CrnResult {
    /// `samples[k][n] = Z_k(n)^{-s_k / gamma}`.
    pub samples: Vec<Vec<f64>>,
    pub estimates: Vec<CorrelatorEstimate>,
}

impl CrnResult {
    /// Ratio of correlator `a` to correlator `b` with a paired delta-method error.
    pub fn ratio(&self, a: usize, b: usize) -> MCEstimate {
        let r = ratio_estimate(&self.samples[a], &self.samples[b], self.estimates[a].value.seed);
        let f = (self.estimates[a].ln_prefactor - self.estimates[b].ln_prefactor).exp();
        r.scaled(f)
    }
}

/// Evaluates every job on the same field draws. All jobs must share the
/// field spec, coupling and sample count.
pub fn correlators_common(jobs: &[CorrelatorJob]) -> Result<CrnResult> {
    let first = jobs.first().ok_or_else(|| LcftError::config("no correlator jobs"))?;
    for j in jobs {
        if j.field != first.field || j.n_samples != first.n_samples || j.params.gamma() != first.params.gamma() {
            return Err(LcftError::config("common-random-number jobs need identical field spec, gamma and sample count"));
        }
    }
    let sampler = SphereSampler::new(first.field.clone())?;
    let gamma = first.params.gamma();
    let weights: Vec<Vec<f64>> = jobs
        .iter()
        .map(|j| insertion_weights(sampler.grid(), &j.insertions, gamma, j.kernel))
        .collect();
    let exps: Vec<f64> = jobs.iter().map(|j| j.exponent()).collect();
    let (var, robin) = (sampler.variance(), sampler.robin_constant());
    let per_sample: Vec<Vec<f64>> = sampler.map_samples(0, first.n_samples, |_, v| {
        weights
            .iter()
            .zip(&exps)
            .map(|(w, &p)| weighted_mass(v, w, gamma, var, robin).powf(p))
            .collect()
    });
    let mut samples = vec![Vec::with_capacity(first.n_samples); jobs.len()];
    for row in per_sample {
        for (k, v) in row.into_iter().enumerate() {
            samples[k].push(v);
        }
    }
    let seed = first.field.seed;
    let estimates = jobs
        .iter()
        .zip(&samples)
        .map(|(j, vals)| {
            let moment = MCEstimate::from_values(vals, seed);
            let lp = ln_prefactor(j)?;
            Ok(CorrelatorEstimate { value: moment.scaled(lp.exp()), moment, ln_prefactor: lp, s: j.s })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CrnResult { samples, estimates })
}

pub fn correlator_mc(job: &CorrelatorJob) -> Result<CorrelatorEstimate> {
    let mut r = correlators_common(std::slice::from_ref(job))?;
    Ok(r.estimates.pop().unwrap())
}

/// `E[Z^exponent]` for `exponent <= 0`.
pub fn negative_moment_mc(job: &CorrelatorJob, exponent: f64) -> Result<MCEstimate> {
    if exponent > 0.0 {
        return Err(LcftError::domain(format!("negative moment needs exponent <= 0, got {exponent}")));
    }
    if exponent == 0.0 {
        return Ok(MCEstimate::exact(1.0, job.n_samples, job.field.seed));
    }
    let sampler = SphereSampler::new(job.field.clone())?;
    let gamma = job.params.gamma();
    let w = insertion_weights(sampler.grid(), &job.insertions, gamma, job.kernel);
    let (var, robin) = (sampler.variance(), sampler.robin_constant());
    let vals = sampler.map_samples(0, job.n_samples, |_, v| weighted_mass(v, &w, gamma, var, robin).powf(exponent));
    Ok(MCEstimate::from_values(&vals, job.field.seed))
}

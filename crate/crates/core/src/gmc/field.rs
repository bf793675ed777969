use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::circle::{CircleFieldSpec, CircleSampler};
use super::sphere::{SphereFieldSpec, SphereSampler};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Circle,
    Sphere,
}

impl Geometry {
    /// Real dimension of the base space.
    pub fn dimension(self) -> u32 {
        match self {
            Geometry::Circle => 1,
            Geometry::Sphere => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "lowercase")]
pub enum FieldSpec {
    Circle(CircleFieldSpec),
    Sphere(SphereFieldSpec),
}

impl FieldSpec {
    pub fn geometry(&self) -> Geometry {
        match self {
            FieldSpec::Circle(_) => Geometry::Circle,
            FieldSpec::Sphere(_) => Geometry::Sphere,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            FieldSpec::Circle(s) => s.seed,
            FieldSpec::Sphere(s) => s.seed,
        }
    }
}

/// One draw of a truncated field on its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub geometry: Geometry,
    pub seed: u64,
    pub index: u64,
    pub values: Vec<f64>,
    /// Analytic truncated variance at each grid point.
    pub variance: Vec<f64>,
    /// Mass of each cell under the reference measure.
    pub cell_areas: Arc<[f64]>,
    /// Constant in `covariance = ln(1/d) + robin + o(1)`.
    pub robin_constant: f64,
}

/// Common interface of the grid samplers.
pub trait FieldSampler: Sync {
    fn geometry(&self) -> Geometry;
    fn seed(&self) -> u64;
    fn grid_len(&self) -> usize;
    fn cell_areas(&self) -> &Arc<[f64]>;
    /// Truncated pointwise variance (constant on both geometries).
    fn variance(&self) -> f64;
    fn robin_constant(&self) -> f64;

    /// Draws `start .. start + count`, calling `f(index, values)` for each and
    /// returning the results in index order.
    fn map_samples<T, F>(&self, start: u64, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &[f64]) -> T + Sync;

    fn sample(&self, index: u64) -> FieldSample {
        let mut v = self.map_samples(index, 1, |_, vals| vals.to_vec());
        FieldSample {
            geometry: self.geometry(),
            seed: self.seed(),
            index,
            values: v.pop().unwrap(),
            variance: vec![self.variance(); self.grid_len()],
            cell_areas: self.cell_areas().clone(),
            robin_constant: self.robin_constant(),
        }
    }
}

/// Synthesis windows covering `start .. start + count`. Windows start at
/// multiples of `batch` (even) and end on even indices, so draws `2k` and
/// `2k + 1` always share a transform and every value is independent of the
/// requested range.
pub(crate) fn aligned_batches(start: u64, count: usize, batch: usize) -> Vec<(u64, usize)> {
    debug_assert!(batch % 2 == 0 && batch > 0);
    let end = start + count as u64;
    let end_even = end + (end & 1);
    let b = batch as u64;
    let mut out = Vec::new();
    let mut s = start / b * b;
    while s < end {
        let e = (s + b).min(end_even);
        out.push((s, (e - s) as usize));
        s += b;
    }
    out
}

/// Runs `synth` over aligned windows and applies `f` to the requested draws.
pub(crate) fn map_aligned<T, F, S>(start: u64, count: usize, batch: usize, synth: S, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &[f64]) -> T + Sync,
    S: Fn(u64, usize) -> Vec<Vec<f64>> + Sync,
{
    use rayon::prelude::*;
    let end = start + count as u64;
    aligned_batches(start, count, batch)
        .into_par_iter()
        .map(|(s, c)| {
            let fields = synth(s, c);
            fields
                .iter()
                .enumerate()
                .map(|(k, v)| (s + k as u64, v))
                .filter(|(i, _)| (start..end).contains(i))
                .map(|(i, v)| f(i, v))
                .collect::<Vec<T>>()
        })
        .collect::<Vec<Vec<T>>>()
        .into_iter()
        .flatten()
        .collect()
}

pub enum AnySampler {
    Circle(CircleSampler),
    Sphere(SphereSampler),
}

impl AnySampler {
    pub fn new(spec: &FieldSpec) -> Result<Self> {
        Ok(match spec {
            FieldSpec::Circle(s) => AnySampler::Circle(CircleSampler::new(s.clone())?),
            FieldSpec::Sphere(s) => AnySampler::Sphere(SphereSampler::new(s.clone())?),
        })
    }
}

/// Dispatches a closure over the concrete sampler type.
#[macro_export]
macro_rules! with_sampler {
    ($any:expr, $s:ident => $body:expr) => {
        match $any {
            $crate::gmc::field::AnySampler::Circle($s) => $body,
            $crate::gmc::field::AnySampler::Sphere($s) => $body,
        }
    };
}

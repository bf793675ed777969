//! On-disk store for block coefficients.
//!
//! One JSON file per entry, named
//! `block-v1-g<gamma bits, hex>-L<level>-<hash>.json`, where `<hash>` is the
//! first 16 hex digits of SHA-256 over the little-endian bits of
//! `(Delta, Delta1, Delta2, Delta3, Delta4)`. The body records the inputs so
//! a hash collision is detected on load and treated as a miss. Bumping
//! `FORMAT_VERSION` invalidates old files.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::block::block_coefficients;
use super::gram::GramCache;
use crate::error::{LcftError, Result};
use crate::params::CFTParams;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Entry {
    version: u32,
    gamma: f64,
    level: usize,
    delta: f64,
    deltas: [f64; 4],
    coefficients: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct CoefficientCache {
    dir: PathBuf,
}

impl CoefficientCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(CoefficientCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, gamma: f64, level: usize, delta: f64, deltas: &[f64; 4]) -> PathBuf {
        let mut h = Sha256::new();
        for x in std::iter::once(delta).chain(deltas.iter().copied()) {
            h.update(x.to_bits().to_le_bytes());
        }
        let digest = h.finalize();
        let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        self.dir
            .join(format!("block-v{FORMAT_VERSION}-g{:016x}-L{level}-{hex}.json", gamma.to_bits()))
    }

    pub fn load(&self, gamma: f64, level: usize, delta: f64, deltas: &[f64; 4]) -> Option<Vec<Complex64>> {
        let text = fs::read_to_string(self.path(gamma, level, delta, deltas)).ok()?;
        let e: Entry = serde_json::from_str(&text).ok()?;
        let same = e.version == FORMAT_VERSION
            && e.gamma.to_bits() == gamma.to_bits()
            && e.level == level
            && e.delta.to_bits() == delta.to_bits()
            && e.deltas.iter().zip(deltas).all(|(a, b)| a.to_bits() == b.to_bits());
        same.then_some(e.coefficients)
    }

    pub fn store(&self, gamma: f64, delta: f64, deltas: &[f64; 4], coefficients: &[Complex64]) -> Result<()> {
        let level = coefficients.len().saturating_sub(1);
        let e = Entry {
            version: FORMAT_VERSION,
            gamma,
            level,
            delta,
            deltas: *deltas,
            coefficients: coefficients.to_vec(),
        };
        let text = serde_json::to_string(&e).map_err(|err| LcftError::Io(err.to_string()))?;
        let path = self.path(gamma, level, delta, deltas);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text)?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    /// Coefficients for internal weight `Delta_{Q+ip}`, from disk when present.
    pub fn coefficients(&self, p: f64, deltas: [f64; 4], level: usize, params: &CFTParams) -> Result<Vec<Complex64>> {
        self.coefficients_with(p, deltas, level, params, GramCache::global())
    }

    /// As [`coefficients`](Self::coefficients), building missing Gram levels in `gram`.
    pub fn coefficients_with(
        &self,
        p: f64,
        deltas: [f64; 4],
        level: usize,
        params: &CFTParams,
        gram: &GramCache,
    ) -> Result<Vec<Complex64>> {
        let delta = params.spectral_weight(p);
        if let Some(v) = self.load(params.gamma(), level, delta, &deltas) {
            return Ok(v);
        }
        let c = |x: f64| Complex64::new(x, 0.0);
        let v = block_coefficients(
            c(delta),
            deltas.map(c),
            c(params.central_charge()),
            level,
            gram,
        )?;
        self.store(params.gamma(), delta, &deltas, &v)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoefficientCache::new(dir.path()).unwrap();
        let params = CFTParams::new(1.1, 1.0).unwrap();
        let ds = [0.3, 0.4, 0.5, 0.6];
        let a = cache.coefficients(0.8, ds, 6, &params).unwrap();
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        let b = cache.coefficients(0.8, ds, 6, &params).unwrap();
        assert_eq!(a, b);
        let d = params.spectral_weight(0.8);
        assert!(cache.load(1.1, 5, d, &ds).is_none());
        assert!(cache.load(1.1, 6, d, &[0.3, 0.4, 0.5, 0.61]).is_none());
    }
}

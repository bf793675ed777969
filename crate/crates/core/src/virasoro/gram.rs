use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use parking_lot::RwLock;

use super::algebra::VermaModule;
use super::young::{diagrams_at_level, YoungDiagram};
use crate::error::{LcftError, Result};
use crate::linalg::{matmul, norm_inf, Lu, Matrix};

/// Condition number (after symmetric diagonal equilibration) above which a
/// level is treated as degenerate.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct GramLevel {
    pub level: usize,
    pub basis: Vec<YoungDiagram>,
    pub gram: Matrix,
    pub gram_inverse: Matrix,
    pub delta: Complex64,
    pub c: Complex64,
    /// Infinity-norm condition number of the equilibrated matrix.
    pub condition: f64,
}

impl GramLevel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

type Key = (usize, [u64; 4]);

fn key(level: usize, delta: Complex64, c: Complex64) -> Key {
    (level, [delta.re.to_bits(), delta.im.to_bits(), c.re.to_bits(), c.im.to_bits()])
}

/// Concurrent `(N, Delta, c) -> GramLevel` cache. Readers never see a
/// partially built entry; two threads may race to build the same key and the
/// first insertion wins.
#[derive(Default)]
pub struct GramCache {
    map: RwLock<HashMap<Key, Arc<GramLevel>>>,
}

impl GramCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn global() -> &'static GramCache {
        static CACHE: OnceLock<GramCache> = OnceLock::new();
        CACHE.get_or_init(GramCache::new)
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.map.write().clear();
    }

    /// Levels `0..=max_level` at `(delta, c)`.
    pub fn levels(&self, max_level: usize, delta: Complex64, c: Complex64) -> Result<Vec<Arc<GramLevel>>> {
        {
            let map = self.map.read();
            let hit: Option<Vec<_>> = (0..=max_level).map(|n| map.get(&key(n, delta, c)).cloned()).collect();
            if let Some(v) = hit {
                return Ok(v);
            }
        }
        let built = build_levels(max_level, delta, c);
        let mut map = self.map.write();
        let mut out = Vec::with_capacity(max_level + 1);
        for lvl in built {
            let lvl = lvl?;
            let entry = map.entry(key(lvl.level, delta, c)).or_insert_with(|| Arc::new(lvl));
            out.push(entry.clone());
        }
        Ok(out)
    }
}

/// Gram matrix and inverse at one level, through the global cache.
pub fn gram_level(level: usize, delta: Complex64, c: Complex64) -> Result<Arc<GramLevel>> {
    let mut v = GramCache::global().levels(level, delta, c)?;
    Ok(v.pop().unwrap())
}

/// Uncached construction; each entry fails independently on degeneracy.
pub fn build_levels(max_level: usize, delta: Complex64, c: Complex64) -> Vec<Result<GramLevel>> {
    let mut module = VermaModule::new(delta, c / 12.0);
    let grams = module.gram_matrices(max_level);
    grams
        .into_iter()
        .enumerate()
        .map(|(n, g)| finish_level(n, g, delta, c))
        .collect()
}

fn finish_level(level: usize, gram: Matrix, delta: Complex64, c: Complex64) -> Result<GramLevel> {
    let n = gram.len();
    let degenerate = |detail: String| LcftError::Degenerate { level, detail };
    // equilibrate: S = D G D with D = |G_ii|^{-1/2}
    let d: Vec<f64> = (0..n).map(|i| gram[i][i].norm().sqrt()).collect();
    if d.iter().any(|&x| x == 0.0 || !x.is_finite()) {
        return Err(degenerate(kac_report(level, delta, c)));
    }
    let scaled: Matrix = (0..n)
        .map(|i| (0..n).map(|j| gram[i][j] / (d[i] * d[j])).collect())
        .collect();
    let lu = Lu::factor(&scaled).ok_or_else(|| degenerate(kac_report(level, delta, c)))?;
    let s_inv = refine_inverse(&scaled, lu.inverse());
    let condition = norm_inf(&scaled) * norm_inf(&s_inv);
    if !(condition <= MAX_CONDITION) {
        return Err(degenerate(format!(
            "condition number {condition:.3e}; {}",
            kac_report(level, delta, c)
        )));
    }
    let gram_inverse = (0..n)
        .map(|i| (0..n).map(|j| s_inv[i][j] / (d[i] * d[j])).collect())
        .collect();
    Ok(GramLevel {
        level,
        basis: diagrams_at_level(level),
        gram,
        gram_inverse,
        delta,
        c,
        condition,
    })
}

/// One Newton step `X + X (I - S X)`.
fn refine_inverse(s: &Matrix, x: Matrix) -> Matrix {
    let n = s.len();
    let mut r = matmul(s, &x);
    for (i, row) in r.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if i == j { Complex64::new(1.0, 0.0) - *v } else { -*v };
        }
    }
    let corr = matmul(&x, &r);
    (0..n).map(|i| (0..n).map(|j| x[i][j] + corr[i][j]).collect()).collect()
}

/// Kac weight `Delta_{r,s}` for the central charge `c = 1 + 6 (b + 1/b)^2`.
pub fn kac_weight(r: u32, s: u32, c: Complex64) -> Complex64 {
    let q2 = (c - 1.0) / 6.0;
    let q = q2.sqrt();
    let b = (q - (q2 - 4.0).sqrt()) / 2.0;
    let x = b * r as f64 + s as f64 / b;
    q2 / 4.0 - x * x / 4.0
}

/// The Kac weight with `r s <= level` closest to `delta`.
pub fn nearest_kac(level: usize, delta: Complex64, c: Complex64) -> Option<(u32, u32, f64)> {
    let mut best: Option<(u32, u32, f64)> = None;
    for r in 1..=level as u32 {
        for s in 1..=(level as u32 / r) {
            let dist = (kac_weight(r, s, c) - delta).norm();
            if best.map_or(true, |b| dist < b.2) {
                best = Some((r, s, dist));
            }
        }
    }
    best
}

fn kac_report(level: usize, delta: Complex64, c: Complex64) -> String {
    match nearest_kac(level, delta, c) {
        Some((r, s, dist)) => format!(
            "Gram matrix singular at Delta = {delta}, c = {c}; nearest Kac degeneration (r, s) = ({r}, {s}), |Delta - Delta_rs| = {dist:.3e}"
        ),
        None => format!("Gram matrix singular at Delta = {delta}, c = {c}"),
    }
}

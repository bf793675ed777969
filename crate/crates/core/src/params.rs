//! Coupling constants, conformal weights and admissibility checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LcftError, Result};

/// Coupling data shared by every formula: `gamma`, background charge `q`,
/// cosmological constant `mu` and central charge `c_l`.
///
/// Built only through [`CFTParams::new`], so `q = 2/gamma + gamma/2` and
/// `c_l = 1 + 6 q^2` always hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CFTParams {
    gamma: f64,
    q: f64,
    mu: f64,
    c_l: f64,
}

impl CFTParams {
    /// Validates `0 < gamma < 2` and `mu > 0`. `gamma = 2` is rejected since
    /// the chaos measure degenerates there.
    pub fn new(gamma: f64, mu: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(LcftError::domain(format!(
                "gamma = {gamma} violates the lower bound gamma > 0"
            )));
        }
        if gamma >= 2.0 {
            return Err(LcftError::domain(format!(
                "gamma = {gamma} violates the upper bound gamma < 2 (chaos is trivial for gamma >= 2)"
            )));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(LcftError::domain(format!("mu = {mu} violates mu > 0")));
        }
        let q = 2.0 / gamma + gamma / 2.0;
        Ok(CFTParams {
            gamma,
            q,
            mu,
            c_l: 1.0 + 6.0 * q * q,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn central_charge(&self) -> f64 {
        self.c_l
    }

    /// Same coupling, different cosmological constant.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        CFTParams::new(self.gamma, mu)
    }

    pub fn conformal_weight(&self, alpha: f64) -> f64 {
        alpha / 2.0 * (self.q - alpha / 2.0)
    }

    /// Conformal weight for complex `alpha`; real on the spectrum line
    /// `alpha = Q + i p` where it equals `Q^2/4 + p^2/4`.
    pub fn conformal_weight_c(&self, alpha: Complex64) -> Complex64 {
        alpha / 2.0 * (self.q - alpha / 2.0)
    }

    /// Weight of the spectrum-line state `Q + i p`.
    pub fn spectral_weight(&self, p: f64) -> f64 {
        (self.q * self.q + p * p) / 4.0
    }
}

pub fn derive_params(gamma: f64, mu: f64) -> Result<CFTParams> {
    CFTParams::new(gamma, mu)
}

pub fn conformal_weight(alpha: Complex64, params: &CFTParams) -> Complex64 {
    params.conformal_weight_c(alpha)
}

/// A point of the Riemann sphere in stereographic coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }

    /// Unit vector in R^3 under inverse stereographic projection from the
    /// north pole; infinity maps to the north pole.
    pub fn to_unit_vector(&self) -> [f64; 3] {
        match self {
            SpherePoint::Infinity => [0.0, 0.0, 1.0],
            SpherePoint::Finite(z) => {
                let r2 = z.norm_sqr();
                let d = 1.0 + r2;
                [2.0 * z.re / d, 2.0 * z.im / d, (r2 - 1.0) / d]
            }
        }
    }

    pub fn from_unit_vector(v: [f64; 3]) -> Self {
        let denom = 1.0 - v[2];
        if denom.abs() < 1e-300 {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(Complex64::new(v[0] / denom, v[1] / denom))
        }
    }
}

/// Marked points with real weights and their conformal weights.
#[derive(Debug, Clone, PartialEq)]
pub struct InsertionSet {
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
    conformal_weights: Vec<f64>,
}

impl InsertionSet {
    pub fn new(points: Vec<SpherePoint>, weights: Vec<f64>, params: &CFTParams) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(LcftError::domain(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points_coincide(&points[i], &points[j]) {
                    return Err(LcftError::domain(format!(
                        "insertion points {i} and {j} coincide"
                    )));
                }
            }
        }
        let conformal_weights = weights.iter().map(|&a| params.conformal_weight(a)).collect();
        Ok(InsertionSet {
            points,
            weights,
            conformal_weights,
        })
    }

    /// Convenience constructor for finite points.
    pub fn finite(points: &[Complex64], weights: &[f64], params: &CFTParams) -> Result<Self> {
        InsertionSet::new(
            points.iter().map(|&z| SpherePoint::Finite(z)).collect(),
            weights.to_vec(),
            params,
        )
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn conformal_weights(&self) -> &[f64] {
        &self.conformal_weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn points_coincide(a: &SpherePoint, b: &SpherePoint) -> bool {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => true,
        (SpherePoint::Finite(x), SpherePoint::Finite(y)) => (x - y).norm() == 0.0,
        _ => false,
    }
}

/// Outcome of the Seiberg-bound check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeibergReport {
    pub passes: bool,
    /// `s = sum(alpha) - chi * Q`.
    pub s: f64,
    pub violations: Vec<String>,
}

/// Checks `sum(alpha) > chi Q` and `alpha_j < Q`. Only the sphere
/// (`euler_char = 2`) is supported.
pub fn check_seiberg(
    insertions: &InsertionSet,
    params: &CFTParams,
    euler_char: i32,
) -> Result<SeibergReport> {
    if euler_char != 2 {
        return Err(LcftError::domain(format!(
            "euler characteristic {euler_char} unsupported; only the sphere (chi = 2)"
        )));
    }
    Ok(seiberg_for_weights(insertions.weights(), params))
}

pub fn seiberg_for_weights(weights: &[f64], params: &CFTParams) -> SeibergReport {
    let q = params.q();
    let s = weights.iter().sum::<f64>() - 2.0 * q;
    let mut violations = Vec::new();
    if s <= 0.0 {
        violations.push(format!(
            "sum(alpha) > 2Q violated: sum = {:.6}, 2Q = {:.6}",
            s + 2.0 * q,
            2.0 * q
        ));
    }
    for (j, &a) in weights.iter().enumerate() {
        if a >= q {
            violations.push(format!("alpha_j < Q violated at j = {j}: alpha = {a}, Q = {q}"));
        }
    }
    SeibergReport {
        passes: violations.is_empty(),
        s,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_one() {
        let p = derive_params(1.0, 1.0).unwrap();
        assert_eq!(p.q(), 2.5);
        assert_eq!(p.central_charge(), 38.5);
    }

    #[test]
    fn gamma_sqrt2() {
        let p = derive_params(2f64.sqrt(), 1.0).unwrap();
        assert!((p.q() - 3.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((p.central_charge() - 28.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_bounds() {
        assert!(derive_params(2.0 - 1e-9, 1.0).is_ok());
        let err = derive_params(2.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("gamma < 2"));
        assert!(derive_params(0.0, 1.0).is_err());
        assert!(derive_params(-0.3, 1.0).is_err());
        let err = derive_params(1.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("mu > 0"));
    }

    #[test]
    fn weights() {
        let p = derive_params(1.0, 1.0).unwrap();
        let q = p.q();
        assert_eq!(conformal_weight(Complex64::new(0.0, 0.0), &p), Complex64::new(0.0, 0.0));
        let d = conformal_weight(Complex64::new(q, 0.0), &p);
        assert!((d.re - q * q / 4.0).abs() < 1e-15 && d.im == 0.0);
        let d = conformal_weight(Complex64::new(q, 1.3), &p);
        assert!((d.re - (q * q / 4.0 + 1.69 / 4.0)).abs() < 1e-14);
        assert!(d.im.abs() < 1e-15);
    }

    #[test]
    fn seiberg_pass() {
        let p = derive_params(1.0, 1.0).unwrap();
        let z = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let ins = InsertionSet::finite(&z, &[1.9, 1.9, 1.9], &p).unwrap();
        let rep = check_seiberg(&ins, &p, 2).unwrap();
        assert!(rep.passes);
        assert!((rep.s - 0.7).abs() < 1e-12);
    }

    #[test]
    fn seiberg_alpha_above_q() {
        let p = derive_params(1.0, 1.0).unwrap();
        let rep = seiberg_for_weights(&[2.6, 1.9, 1.9], &p);
        assert!(!rep.passes);
        assert!(rep.violations.iter().any(|v| v.contains("alpha_j < Q violated")));
    }

    #[test]
    fn two_insertions_never_admissible() {
        let p = derive_params(1.0, 1.0).unwrap();
        for a in [0.5, 1.5, 2.4, 2.49] {
            let rep = seiberg_for_weights(&[a, a], &p);
            assert!(!rep.passes);
        }
    }

    #[test]
    fn non_sphere_rejected() {
        let p = derive_params(1.0, 1.0).unwrap();
        let ins = InsertionSet::finite(&[Complex64::new(0.0, 0.0)], &[1.0], &p).unwrap();
        assert!(check_seiberg(&ins, &p, 0).is_err());
    }

    #[test]
    fn coincident_points_rejected() {
        let p = derive_params(1.0, 1.0).unwrap();
        let z = Complex64::new(0.3, 0.1);
        assert!(InsertionSet::finite(&[z, z], &[1.0, 1.0], &p).is_err());
    }

    #[test]
    fn stereographic_round_trip() {
        for z in [Complex64::new(0.3, -0.7), Complex64::new(-2.0, 5.0), Complex64::new(0.0, 0.0)] {
            let v = SpherePoint::Finite(z).to_unit_vector();
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-14);
            let back = SpherePoint::from_unit_vector(v).as_finite().unwrap();
            assert!((back - z).norm() < 1e-12);
        }
    }

    proptest::proptest! {
        #[test]
        fn weight_reflection(alpha in -10.0f64..10.0, gamma in 0.05f64..1.999) {
            let p = derive_params(gamma, 1.0).unwrap();
            let a = p.conformal_weight(alpha);
            let b = p.conformal_weight(2.0 * p.q() - alpha);
            proptest::prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn q_above_two(gamma in 0.01f64..1.9999) {
            let p = derive_params(gamma, 1.0).unwrap();
            proptest::prop_assert!(p.q() > 2.0);
        }
    }
}

use std::f64::consts::{LN_2, PI};

use crate::error::{LcftError, Result};
use crate::params::SpherePoint;

/// Constant term of the covariance, `ln 2 - 1/2`.
pub const ROBIN_SPHERE: f64 = LN_2 - 0.5;

pub const SPHERE_AREA: f64 = 4.0 * PI;

/// `ln det' Delta` for the unit round sphere, `1/2 - 4 zeta'(-1)`, from the
/// spectral zeta function `sum_{l>=1} (2l + 1) (l (l + 1))^{-s}`.
pub const LN_DET_LAPLACIAN_SPHERE: f64 = 1.161_684_574_801_803_7;

/// `ln(1 / |x - y|) + ln 2 - 1/2` for unit vectors (chordal distance).
pub fn sphere_covariance_unit(x: [f64; 3], y: [f64; 3]) -> f64 {
    let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
    -0.5 * d2.ln() + ROBIN_SPHERE
}

pub fn sphere_covariance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    let (u, v) = (x.to_unit_vector(), y.to_unit_vector());
    let d2: f64 = u.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum();
    if d2 < 1e-28 {
        return Err(LcftError::domain("covariance at coincident points; use the Robin constant"));
    }
    Ok(sphere_covariance_unit(u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quadrature::gauss_legendre;
    use num_complex::Complex64;

    #[test]
    fn antipodal_and_symmetry() {
        let a = SpherePoint::finite(0.0, 0.0);
        let b = SpherePoint::Infinity;
        assert!((sphere_covariance(&a, &b).unwrap() + 0.5).abs() < 1e-15);
        let p = SpherePoint::Finite(Complex64::new(0.3, -1.2));
        let q = SpherePoint::Finite(Complex64::new(2.0, 0.5));
        assert_eq!(sphere_covariance(&p, &q).unwrap(), sphere_covariance(&q, &p).unwrap());
        assert!(sphere_covariance(&p, &p).is_err());
    }

    #[test]
    fn zero_spherical_mean() {
        // by symmetry put x at the north pole; the average over the sphere is
        // a 1-D integral in cos(theta). With 1 - cos(theta) = 2 w^4 the log
        // singularity becomes w^3 ln w.
        let (t, w) = gauss_legendre(40);
        let north = [0.0, 0.0, 1.0];
        let mut acc = 0.0;
        for (ti, wi) in t.iter().zip(&w) {
            let v = 0.5 * (ti + 1.0);
            let theta = 2.0 * (v * v).asin();
            let y = [theta.sin(), 0.0, theta.cos()];
            acc += 0.5 * wi * 8.0 * v.powi(3) * sphere_covariance_unit(north, y);
        }
        // (1 / 4 pi) * 2 pi * int dx = acc / 2
        assert!((acc / 2.0).abs() < 1e-8, "{}", acc / 2.0);
    }

    #[test]
    fn det_constant() {
        let zp = crate::special::dozz::ZETA_PRIME_MINUS_ONE;
        assert!((LN_DET_LAPLACIAN_SPHERE - (0.5 - 4.0 * zp)).abs() < 1e-15);
    }
}

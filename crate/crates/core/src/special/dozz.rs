//! The DOZZ structure constant and the round-metric three-point function.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use super::gamma::ln_l;
use super::upsilon::UpsilonEvaluator;
use crate::error::{LcftError, Result};
use crate::params::{seiberg_for_weights, CFTParams};

/// Arguments closer than this to a zero of a denominator `Upsilon` are poles.
pub const POLE_TOLERANCE: f64 = 1e-8;

/// `zeta_R'(-1)`.
pub const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_929_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DozzValue {
    pub value: Complex64,
    /// `ln C`, absent at poles and zeros.
    pub log_value: Option<Complex64>,
    pub is_pole: bool,
    /// Smallest distance of a denominator argument to the `Upsilon` zero set.
    pub pole_distance: f64,
}

/// `ln(pi mu l(gamma^2/4) (gamma/2)^(2 - gamma^2/2))`, the base of the
/// `mu`-dependent prefactor.
pub fn ln_prefactor_base(params: &CFTParams) -> f64 {
    let g = params.gamma();
    (PI * params.mu()).ln()
        + ln_l(Complex64::new(g * g / 4.0, 0.0)).re
        + (2.0 - g * g / 2.0) * (g / 2.0).ln()
}

/// Evaluates the DOZZ formula at complex weights.
pub fn dozz(
    a1: Complex64,
    a2: Complex64,
    a3: Complex64,
    params: &CFTParams,
    ev: &UpsilonEvaluator,
) -> Result<DozzValue> {
    check_evaluator(params, ev)?;
    let q = params.q();
    let g = params.gamma();
    let abar = a1 + a2 + a3;
    let half = abar / 2.0;
    let denom = [half - q, half - a1, half - a2, half - a3];
    let pole_distance = denom
        .iter()
        .map(|&w| ev.zero_distance(w))
        .fold(f64::INFINITY, f64::min);
    if pole_distance < POLE_TOLERANCE {
        return Ok(DozzValue {
            value: Complex64::new(f64::INFINITY, 0.0),
            log_value: None,
            is_pole: true,
            pole_distance,
        });
    }
    let mut ln_c = (2.0 * q - abar) / g * ln_prefactor_base(params) + ev.ln_upsilon_prime_zero()?;
    for a in [a1, a2, a3] {
        match ev.ln_upsilon(a)? {
            Some(v) => ln_c += v,
            None => {
                return Ok(DozzValue {
                    value: Complex64::new(0.0, 0.0),
                    log_value: None,
                    is_pole: false,
                    pole_distance,
                })
            }
        }
    }
    for w in denom {
        let v = ev
            .ln_upsilon(w)?
            .ok_or_else(|| LcftError::Accuracy(format!("denominator zero at {w} missed by pole check")))?;
        ln_c -= v;
    }
    Ok(DozzValue {
        value: ln_c.exp(),
        log_value: Some(ln_c),
        is_pole: false,
        pole_distance,
    })
}

/// Real weights give a real constant; the imaginary part is set to zero
/// (the log carries `i pi` when the value is negative).
pub fn dozz_real(a1: f64, a2: f64, a3: f64, params: &CFTParams, ev: &UpsilonEvaluator) -> Result<DozzValue> {
    let mut v = dozz(
        Complex64::new(a1, 0.0),
        Complex64::new(a2, 0.0),
        Complex64::new(a3, 0.0),
        params,
        ev,
    )?;
    v.value.im = 0.0;
    Ok(v)
}

fn check_evaluator(params: &CFTParams, ev: &UpsilonEvaluator) -> Result<()> {
    if (ev.gamma() - params.gamma()).abs() > 1e-15 {
        return Err(LcftError::config(format!(
            "Upsilon evaluator built for gamma = {} but params carry gamma = {}",
            ev.gamma(),
            params.gamma()
        )));
    }
    Ok(())
}

/// `ln C_0 = ln sqrt(pi) - 1/4 + 2 zeta'(-1) - Q^2 (1 - 2 ln 2)`.
pub fn ln_c0(params: &CFTParams) -> f64 {
    let q = params.q();
    0.5 * PI.ln() - 0.25 + 2.0 * ZETA_PRIME_MINUS_ONE - q * q * (1.0 - 2.0 * 2f64.ln())
}

/// Round-metric conformal factor `g(z) = 4 / (1 + |z|^2)^2`.
pub fn round_metric(z: Complex64) -> f64 {
    4.0 / (1.0 + z.norm_sqr()).powi(2)
}

/// Log of the three-point function on the round sphere at finite points.
pub fn ln_three_point_fixed(
    z: [Complex64; 3],
    alpha: [f64; 3],
    params: &CFTParams,
    ev: &UpsilonEvaluator,
) -> Result<Complex64> {
    let rep = seiberg_for_weights(&alpha, params);
    if !rep.passes {
        return Err(LcftError::domain(format!(
            "three-point function outside the Seiberg bounds: {}",
            rep.violations.join("; ")
        )));
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            if (z[i] - z[j]).norm() == 0.0 {
                return Err(LcftError::domain("three-point insertion points must be distinct"));
            }
        }
    }
    let d: Vec<f64> = alpha.iter().map(|&a| params.conformal_weight(a)).collect();
    let l12 = (z[0] - z[1]).norm().ln();
    let l13 = (z[0] - z[2]).norm().ln();
    let l23 = (z[1] - z[2]).norm().ln();
    let mut ln_pos = 2.0 * (d[2] - d[0] - d[1]) * l12
        + 2.0 * (d[1] - d[0] - d[2]) * l13
        + 2.0 * (d[0] - d[1] - d[2]) * l23;
    for i in 0..3 {
        ln_pos -= d[i] * round_metric(z[i]).ln();
    }
    let c = dozz_real(alpha[0], alpha[1], alpha[2], params, ev)?;
    let ln_c = c
        .log_value
        .ok_or_else(|| LcftError::domain("structure constant is singular at these weights"))?;
    Ok(ln_c + ln_pos + ln_c0(params))
}

/// The round-sphere three-point function at distinct finite points.
pub fn three_point_fixed(
    z: [Complex64; 3],
    alpha: [f64; 3],
    params: &CFTParams,
    ev: &UpsilonEvaluator,
) -> Result<Complex64> {
    Ok(ln_three_point_fixed(z, alpha, params, ev)?.exp())
}

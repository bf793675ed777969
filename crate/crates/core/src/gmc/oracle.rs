//! Deterministic reference values for circle chaos moments.

use std::f64::consts::PI;

use crate::special::gamma::ln_gamma_real;

/// Double-exponential (tanh-sinh) rule on `[0, 1]`: `(d0, d1, w)` with
/// `d0, d1` the exact distances to the two endpoints.
pub fn tanh_sinh_nodes(step: f64) -> Vec<(f64, f64, f64)> {
    let half_pi = 0.5 * PI;
    let kmax = (4.0 / step).ceil() as i64;
    (-kmax..=kmax)
        .map(|k| {
            let t = k as f64 * step;
            let u = half_pi * t.sinh();
            let e = (2.0 * u).exp();
            // x = (1 + tanh u) / 2
            let d0 = 1.0 / (1.0 + 1.0 / e);
            let d1 = 1.0 / (1.0 + e);
            let w = step * 0.5 * half_pi * t.cosh() / u.cosh().powi(2);
            (d1, d0, w)
        })
        .filter(|&(a, b, w)| a > 0.0 && b > 0.0 && w > 0.0)
        .collect()
}

/// `int_a^b f` for `f` with integrable power singularities at both ends.
/// The integrand receives `(x - a, b - x)` so that singular factors can be
/// evaluated without cancellation.
pub fn endpoint_singular<F: FnMut(f64, f64) -> f64>(mut f: F, a: f64, b: f64, nodes: &[(f64, f64, f64)]) -> f64 {
    let len = b - a;
    nodes.iter().map(|&(d0, d1, w)| w * f(len * d0, len * d1)).sum::<f64>() * len
}

/// `|1 - e^{iu}|^{-gamma^2}` given `u` and `2 pi - u`, both computed exactly
/// by the caller.
fn chord_power(u: f64, u_comp: f64, gamma: f64) -> f64 {
    (2.0 * (0.5 * u.min(u_comp)).sin()).powf(-gamma * gamma)
}

/// `(1/2 pi) int_0^{2 pi} |1 - e^{i theta}|^{-gamma^2} d theta`.
pub fn circle_second_moment(gamma: f64) -> f64 {
    let nodes = tanh_sinh_nodes(1.0 / 64.0);
    endpoint_singular(|da, db| chord_power(da, db, gamma), 0.0, 2.0 * PI, &nodes) / (2.0 * PI)
}

/// `(2 pi)^{-3} int_{[0, 2 pi]^3} prod_{i<j} |e^{i theta_i} - e^{i theta_j}|^{-gamma^2}`,
/// reduced to two angles by rotation invariance.
pub fn circle_third_moment(gamma: f64) -> f64 {
    let nodes = tanh_sinh_nodes(1.0 / 64.0);
    let cp = |x: f64, comp: f64| chord_power(x, comp, gamma);
    // outer angle u with complement ru = 2 pi - u; inner v split at u
    let inner = |u: f64, ru: f64| -> f64 {
        // v in [0, u]: v = dv, u - v = r
        let left = endpoint_singular(|dv, r| cp(dv, ru + r) * cp(r, ru + dv), 0.0, u, &nodes);
        // v in [u, 2 pi]: v - u = dv, 2 pi - v = r
        let right = endpoint_singular(|dv, r| cp(r, u + dv) * cp(dv, u + r), 0.0, ru, &nodes);
        cp(u, ru) * (left + right)
    };
    endpoint_singular(inner, 0.0, 2.0 * PI, &nodes) / (4.0 * PI * PI)
}

/// Closed form `Gamma(1 - k gamma^2 / 2) / Gamma(1 - gamma^2 / 2)^k`.
pub fn circle_moment_closed_form(k: u32, gamma: f64) -> f64 {
    let b = 0.5 * gamma * gamma;
    (ln_gamma_real(1.0 - k as f64 * b) - k as f64 * ln_gamma_real(1.0 - b)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_matches_closed_form() {
        for g in [0.3, 0.5, 0.8] {
            let m2 = circle_second_moment(g);
            assert!((m2 - circle_moment_closed_form(2, g)).abs() < 1e-10, "gamma {g}: {m2}");
        }
        for g in [0.3, 0.5, 0.6] {
            let m3 = circle_third_moment(g);
            assert!((m3 - circle_moment_closed_form(3, g)).abs() < 1e-8, "gamma {g}: {m3}");
        }
        assert!((circle_second_moment(0.5) - 1.0320669).abs() < 1e-7);
    }
}

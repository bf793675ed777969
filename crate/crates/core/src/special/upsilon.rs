//! Zamolodchikov's `Upsilon_{gamma/2}` function.
//!
//! Inside the strip `0 < Re z < Q` the logarithm is a convergent integral;
//! elsewhere the two shift relations carry the argument back into the strip.

use num_complex::Complex64;
use serde::Serialize;

use super::gamma::ln_l;
use super::quadrature::{adaptive_gk, CompositeGaussLegendre};
use crate::error::{LcftError, Result};

/// Integration scheme for the strip integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum QuadRule {
    /// Globally adaptive G10/K21 panels.
    AdaptiveKronrod,
    /// Fixed composite Gauss-Legendre: `nodes` per panel, `panels_per_unit`
    /// panels per unit length of `t`.
    CompositeLegendre { nodes: usize, panels_per_unit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadSpec {
    pub rule: QuadRule,
    /// Absolute tolerance on `ln Upsilon`.
    pub tolerance: f64,
    /// Below this `t` the integrand is replaced by its Taylor polynomial.
    pub small_t: f64,
    pub max_panels: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rule: QuadRule::AdaptiveKronrod,
            tolerance: 1e-13,
            small_t: 1e-3,
            max_panels: 4000,
        }
    }
}

/// One application of a shift relation, named by how it moves the argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    DownHalfGamma,
    UpHalfGamma,
    DownTwoOverGamma,
    UpTwoOverGamma,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpsilonEvaluator {
    gamma: f64,
    q: f64,
    quad: QuadSpec,
    max_shifts: usize,
}

impl UpsilonEvaluator {
    pub fn new(gamma: f64) -> Result<Self> {
        UpsilonEvaluator::with_spec(gamma, QuadSpec::default(), 10_000)
    }

    pub fn with_spec(gamma: f64, quad: QuadSpec, max_shifts: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 2.0) {
            return Err(LcftError::domain(format!("gamma = {gamma} outside (0, 2)")));
        }
        Ok(UpsilonEvaluator {
            gamma,
            q: 2.0 / gamma + gamma / 2.0,
            quad,
            max_shifts,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn quad_spec(&self) -> &QuadSpec {
        &self.quad
    }

    fn integrand(&self, a: Complex64, t: f64) -> Complex64 {
        let b = self.gamma / 4.0;
        let c = 1.0 / self.gamma;
        // sinh^2 is even, so work with Re(u) >= 0
        let mut u = a * (t / 2.0);
        if u.re < 0.0 {
            u = -u;
        }
        let ratio = if t < 2.0 {
            let s = u.sinh();
            s * s / ((b * t).sinh() * (c * t).sinh())
        } else {
            let e2u = (-2.0 * u).exp();
            let one = Complex64::new(1.0, 0.0);
            (2.0 * u - (b + c) * t).exp() * (one - e2u) * (one - e2u)
                / ((1.0 - (-2.0 * b * t).exp()) * (1.0 - (-2.0 * c * t).exp()))
        };
        (a * a * (-t).exp() - ratio) / t
    }

    /// Exact integral of the Taylor polynomial of the integrand over `[0, eps]`.
    fn small_t_piece(&self, a: Complex64, eps: f64) -> Complex64 {
        let g = self.gamma;
        let g2 = g * g;
        let a2 = a * a;
        let c0 = -a2;
        let c1 = a2 * (g2 * (-8.0 * a2 + g2 + 48.0) + 16.0) / (96.0 * g2);
        let c2 = -a2 / 6.0;
        let c3 = a2
            * (1280.0 * a2 * g2 + g2 * g2 * (-256.0 * a2 * a2 + 80.0 * a2 * g2 - 7.0 * g2 * g2 + 3680.0)
                - 1792.0)
            / (92160.0 * g2 * g2);
        c0 * eps + c1 * eps.powi(2) / 2.0 + c2 * eps.powi(3) / 3.0 + c3 * eps.powi(4) / 4.0
    }

    /// Point beyond which the discarded tail is below `tol`.
    fn cutoff(&self, a: Complex64, tol: f64) -> Result<f64> {
        let lambda = self.q / 2.0 - a.re.abs();
        if lambda <= 0.0 {
            return Err(LcftError::domain("argument outside the strip"));
        }
        let b = self.gamma / 4.0;
        let c = 1.0 / self.gamma;
        let bound = |t: f64| {
            let k = (1.0 + (-a.re.abs() * t).exp()).powi(2)
                / ((1.0 - (-2.0 * b * t).exp()) * (1.0 - (-2.0 * c * t).exp()));
            k * (-lambda * t).exp() / (lambda * t) + a.norm_sqr() * (-t).exp() / t
        };
        let mut t = 4.0;
        while bound(t) > tol {
            t *= 1.25;
            if t > 1e7 {
                return Err(LcftError::Accuracy(format!(
                    "Upsilon tail does not reach tolerance {tol:e} (decay rate {lambda:e})"
                )));
            }
        }
        Ok(t)
    }

    /// `ln Upsilon(z)` by direct quadrature; requires `0 < Re z < Q`.
    pub fn log_upsilon(&self, z: Complex64) -> Result<Complex64> {
        if !(z.re > 0.0 && z.re < self.q) {
            return Err(LcftError::domain(format!(
                "log_upsilon needs 0 < Re z < Q = {}; got {z}; use upsilon() for continuation",
                self.q
            )));
        }
        let a = Complex64::new(self.q / 2.0, 0.0) - z;
        if a == Complex64::new(0.0, 0.0) {
            return Ok(a);
        }
        let tol = self.quad.tolerance;
        let eps = self.quad.small_t;
        let t_max = self.cutoff(a, 0.1 * tol)?;
        let head = self.small_t_piece(a, eps);
        let body = match self.quad.rule {
            QuadRule::AdaptiveKronrod => {
                // geometric panels so the adaptive loop starts on a sensible mesh
                let mut acc = Complex64::new(0.0, 0.0);
                let mut lo = eps;
                let mut hi: f64 = 1.0;
                let mut budget = self.quad.max_panels;
                while lo < t_max {
                    let top = hi.min(t_max);
                    let r = adaptive_gk(|t| self.integrand(a, t), lo, top, 0.05 * tol, 1e-15, budget);
                    if !r.converged {
                        return Err(LcftError::Accuracy(format!(
                            "Upsilon quadrature on [{lo}, {top}] stalled with error {:e}",
                            r.error
                        )));
                    }
                    budget = budget.saturating_sub(r.panels).max(16);
                    acc += r.value;
                    lo = top;
                    hi *= 2.0;
                }
                acc
            }
            QuadRule::CompositeLegendre { nodes, panels_per_unit } => {
                let panels = ((t_max - eps) * panels_per_unit as f64).ceil() as usize;
                CompositeGaussLegendre::new(nodes, panels.max(1))
                    .integrate(eps, t_max, |t| self.integrand(a, t))
            }
        };
        Ok(head + body)
    }

    /// Distance from `z` to the zero set `-(gamma/2)N - (2/gamma)N` union
    /// `Q + (gamma/2)N + (2/gamma)N`.
    pub fn zero_distance(&self, z: Complex64) -> f64 {
        let h = self.gamma / 2.0;
        let k = 2.0 / self.gamma;
        // lower lattice: points -(m h + n k)
        let lower = |x: f64| -> f64 {
            // distance from x >= 0 to the set {m h + n k}
            if x < 0.0 {
                return -x;
            }
            let mut best = f64::INFINITY;
            let nmax = (x / k).floor() as i64 + 1;
            for n in 0..=nmax {
                let r = x - n as f64 * k;
                if r < -best {
                    continue;
                }
                let m = (r / h).round().max(0.0);
                best = best.min((r - m * h).abs());
            }
            best
        };
        let d1 = lower(-z.re);
        let d2 = lower(z.re - self.q);
        (d1.min(d2).powi(2) + z.im * z.im).sqrt()
    }

    fn in_strip(&self, z: Complex64) -> bool {
        z.re > 0.0 && z.re < self.q
    }

    /// Log of the shift factor `l(gamma w / 2) (gamma/2)^(1 - gamma w)`.
    fn ln_factor_half(&self, w: Complex64) -> Complex64 {
        let g = self.gamma;
        ln_l(w * (g / 2.0)) + (1.0 - g * w) * (g / 2.0).ln()
    }

    /// Log of the shift factor `l(2 w / gamma) (gamma/2)^(4 w / gamma - 1)`.
    fn ln_factor_two(&self, w: Complex64) -> Complex64 {
        let g = self.gamma;
        ln_l(w * (2.0 / g)) + (w * (4.0 / g) - 1.0) * (g / 2.0).ln()
    }

    /// Applies `route` to move `z`, then evaluates directly. Returns `None`
    /// when `z` is a zero of `Upsilon` (within `1e-8`).
    pub fn ln_upsilon_route(&self, z: Complex64, route: &[Shift]) -> Result<Option<Complex64>> {
        if self.zero_distance(z) < 1e-8 {
            return Ok(None);
        }
        let h = self.gamma / 2.0;
        let k = 2.0 / self.gamma;
        let mut w = z;
        let mut acc = Complex64::new(0.0, 0.0);
        for s in route {
            match s {
                // U(w) = U(w - h) * f_h(w - h)
                Shift::DownHalfGamma => {
                    w -= h;
                    acc += self.ln_factor_half(w);
                }
                // U(w) = U(w + h) / f_h(w)
                Shift::UpHalfGamma => {
                    acc -= self.ln_factor_half(w);
                    w += h;
                }
                Shift::DownTwoOverGamma => {
                    w -= k;
                    acc += self.ln_factor_two(w);
                }
                Shift::UpTwoOverGamma => {
                    acc -= self.ln_factor_two(w);
                    w += k;
                }
            }
        }
        if !self.in_strip(w) {
            return Err(LcftError::domain(format!(
                "route ends at {w}, outside the strip 0 < Re z < {}",
                self.q
            )));
        }
        let base = self.log_upsilon(w)?;
        let v = base + acc;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(LcftError::Accuracy(format!(
                "continuation route for {z} passes through a zero or pole of a shift factor"
            )));
        }
        Ok(Some(v))
    }

    /// Default continuation route: lands in `[1/gamma, 1/gamma + gamma/2]`,
    /// a window centred on `Q/2` where the integrand decays fastest.
    pub fn default_route(&self, z: Complex64) -> Result<Vec<Shift>> {
        let h = self.gamma / 2.0;
        let k = 2.0 / self.gamma;
        let lo = 1.0 / self.gamma;
        let hi = lo + h;
        let mut route = Vec::new();
        let mut x = z.re;
        while x > hi {
            if x - k >= lo {
                x -= k;
                route.push(Shift::DownTwoOverGamma);
            } else {
                x -= h;
                route.push(Shift::DownHalfGamma);
            }
            if route.len() > self.max_shifts {
                return Err(LcftError::Resource(format!(
                    "Upsilon continuation of {z} needs more than {} shifts",
                    self.max_shifts
                )));
            }
        }
        while x < lo {
            if x + k <= hi {
                x += k;
                route.push(Shift::UpTwoOverGamma);
            } else {
                x += h;
                route.push(Shift::UpHalfGamma);
            }
            if route.len() > self.max_shifts {
                return Err(LcftError::Resource(format!(
                    "Upsilon continuation of {z} needs more than {} shifts",
                    self.max_shifts
                )));
            }
        }
        Ok(route)
    }

    /// `ln Upsilon(z)` on the whole plane; `None` at zeros.
    pub fn ln_upsilon(&self, z: Complex64) -> Result<Option<Complex64>> {
        let route = self.default_route(z)?;
        self.ln_upsilon_route(z, &route)
    }

    /// `Upsilon(z)` on the whole plane (entire; zero on the zero lattice).
    pub fn upsilon(&self, z: Complex64) -> Result<Complex64> {
        Ok(match self.ln_upsilon(z)? {
            Some(l) => l.exp(),
            None => Complex64::new(0.0, 0.0),
        })
    }

    /// `Upsilon'(0)`. The `gamma/2` shift relation at `z -> 0` gives
    /// `Upsilon(z) ~ z Upsilon(gamma/2)`.
    pub fn ln_upsilon_prime_zero(&self) -> Result<f64> {
        Ok(self.log_upsilon(Complex64::new(self.gamma / 2.0, 0.0))?.re)
    }
}

//! Four-point functions from the spectral (bootstrap) representation
//!
//! `G(z) = (1 / 2 pi) int_R conj(C(Q+ip, a1, a2)) C(Q+ip, a3, a4) |F_p(z)|^2 dp`
//!
//! The integrand at `-p` is the conjugate of the one at `p`, so the line
//! integral is folded to `(1 / pi) int_0^inf Re(...) dp` and evaluated with
//! Gauss-Legendre panels on `[0, P_max]`. Global metric constants are left
//! out; every comparison made with these values is a ratio.

mod crossing;
mod spectral;

pub use crossing::{crossing_check, Channel, CrossingReport};
pub use spectral::{
    four_point_bootstrap, four_point_bootstrap_with, spectral_integrand, BootstrapOptions, BootstrapResult, Frame,
    IntegrandSample, MetricFactor, SpectralQuadrature,
};

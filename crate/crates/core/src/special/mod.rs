//! Special functions: complex Gamma, quadrature, `Upsilon`, DOZZ.

pub mod dozz;
pub mod gamma;
pub mod quadrature;
pub mod upsilon;

pub use dozz::{dozz, dozz_real, ln_three_point_fixed, three_point_fixed, DozzValue};
pub use upsilon::{QuadRule, QuadSpec, Shift, UpsilonEvaluator};

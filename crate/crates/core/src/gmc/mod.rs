//! Truncated Gaussian free fields on the circle and the round sphere, and
//! the Gaussian multiplicative chaos built from them.

pub mod chaos;
pub mod circle;
pub mod field;
pub mod oracle;
pub mod sphere;

pub use chaos::{chaos_measure, chaos_moment, ChaosMeasure, Renormalization};
pub use circle::{CircleFieldSpec, CircleSampler};
pub use field::{FieldSample, FieldSampler, FieldSpec, Geometry};
pub use sphere::{SphereFieldSpec, SphereGrid, SphereSampler};

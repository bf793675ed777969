pub mod bootstrap;
pub mod correlators;
pub mod error;
pub mod gmc;
pub mod linalg;
pub mod params;
pub mod special;
pub mod stats;
pub mod virasoro;

pub use error::{LcftError, Result};
pub use params::{CFTParams, InsertionSet, SpherePoint};

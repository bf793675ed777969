//! Verma-module combinatorics and truncated four-point blocks.

pub mod algebra;
pub mod block;
pub mod coeff_cache;
pub mod gram;
pub mod young;

pub use algebra::{descendant_3pt, virasoro_pairing, Ring, VermaModule};
pub use block::{block, block_coefficients, block_with_cache, BlockEval};
pub use coeff_cache::CoefficientCache;
pub use gram::{gram_level, GramCache, GramLevel};
pub use young::{diagrams_at_level, YoungDiagram};

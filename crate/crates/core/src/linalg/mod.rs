//! Dense complex linear algebra and subspace arithmetic.

mod matrix;
mod subspace;
mod svd;
mod tolerance;

pub use matrix::CMatrix;
pub use subspace::{intersect, nullspace, span_union, Subspace};
pub use svd::{operator_norm, svd, Svd};
pub use tolerance::{ToleranceConfig, SIGMA_FLOOR};

//! Extremality analysis for tuples of commuting contractions.
//!
//! A tuple of commuting contractions is *extremal* when every extension of
//! it within the class is an extension by direct sum. This crate decides
//! extremality for three classical families -- the Parrott tuples built
//! from unitaries, the fixed 8x8 Crabb-Davie triple, and the Varopoulos
//! triples built from vectors in the unit ball -- and constructs explicit,
//! machine-checkable extension certificates in every non-extremal case it
//! recognizes. It also evaluates analytic polynomials at tuples and
//! brackets polydisc sup norms, so von Neumann inequality defects can be
//! certified numerically.
//!
//! Modules:
//! - [`linalg`]: dense complex matrices, SVD, subspaces, tolerances.
//! - [`tuples`]: operator tuples and the class-membership predicates.
//! - [`extensions`]: extension certificates, the two general
//!   non-extremality constructions, a randomized probe, the validator.
//! - [`parrott`], [`crabb_davie`], [`varopoulos`]: the three families.
//! - [`vonneumann`]: polynomial evaluation, torus sup brackets, violation
//!   search.
//! - [`sampling`]: seeded random unitaries and commuting tuples.

pub mod crabb_davie;
pub mod error;
pub mod extensions;
pub mod linalg;
pub mod parrott;
pub mod sampling;
pub mod tuples;
pub mod varopoulos;
pub mod vonneumann;

pub use error::{CoreError, Result};
pub use linalg::{CMatrix, Subspace, ToleranceConfig};
pub use tuples::{OperatorTuple, PredicateReport};

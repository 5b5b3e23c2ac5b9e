//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by constructors and operations across the crate.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("operator count mismatch: {left} vs {right}")]
    TupleLenMismatch { left: usize, right: usize },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix entries must be finite (no NaN or infinity)")]
    NonFinite,

    #[error("operator {index} is not unitary (residual {residual:.3e})")]
    NonUnitaryInput { index: usize, residual: f64 },

    #[error("subspace is not invariant under operator {index} (residual {residual:.3e})")]
    InvarianceViolation { index: usize, residual: f64 },

    #[error("subspace has dimension zero; restriction is undefined")]
    EmptySubspace,

    #[error("gap subspace (Ran T)^perp intersect Ker T is trivial")]
    EmptyGap,

    #[error("every operator already has norm 1 within tolerance; no strict contraction to rescale")]
    AllNormsOne,

    #[error("commutator kernel is trivial; the tuple is extremal and admits no kernel extension")]
    ExtremalNoKernel,

    #[error("lambda matrix has a trivial kernel; no kernel certificate exists")]
    TrivialKernel,

    #[error("vector {index} lies outside the unit ball (norm {norm})")]
    NormExceeded { index: usize, norm: f64 },

    #[error("pivot index {pivot} out of range for a tuple of {n} operators")]
    BadPivot { pivot: usize, n: usize },

    #[error("variable count mismatch: polynomial has {poly}, tuple has {tuple}")]
    VarCountMismatch { poly: usize, tuple: usize },

    #[error("tuple does not commute (worst residual {residual:.3e})")]
    NonCommutingTuple { residual: f64 },

    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },
}

impl CoreError {
    pub fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        CoreError::Invalid {
            what,
            why: why.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;

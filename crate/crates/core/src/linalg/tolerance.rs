//! Numerical tolerance policy.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Absolute floor under which a largest singular value means "this matrix
/// is zero". Guards relative rank decisions against the all-zero matrix.
pub const SIGMA_FLOOR: f64 = 1e-14;

/// Tolerances used by every predicate and rank decision in the crate.
///
/// Rank decisions are always relative to the largest singular value of the
/// matrix at hand; `eps_rank` is that relative cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Commutator / invariance residual bound.
    pub eps_comm: f64,
    /// Allowed excess over norm 1 for contractions.
    pub eps_contr: f64,
    /// Relative singular-value cutoff for rank and kernel decisions.
    pub eps_rank: f64,
    /// Orthonormality residual bound for stored subspace bases.
    pub eps_orth: f64,
    /// Relative threshold for "determinant is zero" decisions.
    pub eps_det: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eps_comm: 1e-10,
            eps_contr: 1e-10,
            eps_rank: 1e-9,
            eps_orth: 1e-12,
            eps_det: 1e-9,
        }
    }
}

impl ToleranceConfig {
    /// All tolerances must be strictly positive.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps_comm", self.eps_comm),
            ("eps_contr", self.eps_contr),
            ("eps_rank", self.eps_rank),
            ("eps_orth", self.eps_orth),
            ("eps_det", self.eps_det),
        ];
        for (name, value) in fields {
            if value <= 0.0 || !value.is_finite() {
                return Err(CoreError::invalid(
                    "tolerance",
                    format!("{name} must be strictly positive, got {value}"),
                ));
            }
        }
        Ok(())
    }

    /// Singular values at or below this threshold count as zero.
    /// `sigma_max` at or below the absolute floor means the zero matrix,
    /// in which case every singular value counts as zero.
    pub fn rank_cutoff(&self, sigma_max: f64) -> f64 {
        if sigma_max <= SIGMA_FLOOR {
            f64::INFINITY
        } else {
            self.eps_rank * sigma_max
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ToleranceConfig::default().validate().unwrap();
    }

    #[test]
    fn zero_tolerance_is_rejected() {
        let tol = ToleranceConfig {
            eps_rank: 0.0,
            ..Default::default()
        };
        assert!(tol.validate().is_err());
    }

    #[test]
    fn cutoff_floors_the_zero_matrix() {
        let tol = ToleranceConfig::default();
        assert!(tol.rank_cutoff(0.0).is_infinite());
        assert!(tol.rank_cutoff(1e-20).is_infinite());
        assert!((tol.rank_cutoff(2.0) - 2e-9).abs() < 1e-24);
    }
}

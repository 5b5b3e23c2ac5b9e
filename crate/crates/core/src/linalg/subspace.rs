//! Subspaces of C^d stored through orthonormal column bases.

use serde::{Deserialize, Serialize};

use super::matrix::CMatrix;
use super::svd::svd;
use super::tolerance::ToleranceConfig;
use crate::error::{CoreError, Result};

/// A subspace of `C^ambient_dim`, held as a matrix whose columns form an
/// orthonormal basis. The zero subspace has a basis with zero columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: CMatrix,
}

impl Subspace {
    /// The zero subspace of `C^ambient_dim`.
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: CMatrix::zeros(ambient_dim, 0),
        }
    }

    /// All of `C^ambient_dim`.
    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: CMatrix::identity(ambient_dim),
        }
    }

    /// Column span of an arbitrary matrix, orthonormalized through the SVD.
    /// Columns whose singular value falls at or below the relative rank
    /// cutoff are dropped.
    pub fn from_spanning(columns: &CMatrix, tol: &ToleranceConfig) -> Self {
        let decomposition = svd(columns);
        let sigma_max = decomposition
            .singular_values
            .first()
            .copied()
            .unwrap_or(0.0);
        let cutoff = tol.rank_cutoff(sigma_max);
        let rank = decomposition
            .singular_values
            .iter()
            .take_while(|&&s| s > cutoff)
            .count();
        Subspace {
            ambient_dim: columns.rows(),
            basis: decomposition.u.block(0, columns.rows(), 0, rank),
        }
    }

    /// Wrap a matrix whose columns are already orthonormal, verifying the
    /// orthonormality residual against `eps_orth`.
    pub fn from_orthonormal(basis: CMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let gram = basis.adjoint().mul(&basis);
        let residual = gram.sub(&CMatrix::identity(basis.cols())).max_abs();
        if residual > tol.eps_orth {
            return Err(CoreError::invalid(
                "subspace basis",
                format!("columns are not orthonormal (residual {residual:.3e})"),
            ));
        }
        Ok(Subspace {
            ambient_dim: basis.rows(),
            basis,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> CMatrix {
        self.basis.mul(&self.basis.adjoint())
    }

    /// Orthogonal complement, computed as the nullspace of `basis^H`.
    pub fn complement(&self, tol: &ToleranceConfig) -> Subspace {
        nullspace(&self.basis.adjoint(), tol)
    }

    /// Residual of `v` against the subspace: norm of `(I - P)v`.
    pub fn residual_of(&self, v: &CMatrix) -> f64 {
        let projected = self.basis.mul(&self.basis.adjoint().mul(v));
        v.sub(&projected).frobenius_norm()
    }
}

/// Orthonormal basis of the right nullspace of `m`. A singular value is
/// treated as zero iff it is at or below `eps_rank * sigma_max`, with the
/// absolute floor sending the all-zero matrix to the full space.
pub fn nullspace(m: &CMatrix, tol: &ToleranceConfig) -> Subspace {
    if m.cols() == 0 {
        return Subspace::zero(0);
    }
    if m.rows() == 0 {
        return Subspace::full(m.cols());
    }
    let decomposition = svd(m);
    let sigma_max = decomposition.singular_values[0];
    let cutoff = tol.rank_cutoff(sigma_max);
    let rank = decomposition
        .singular_values
        .iter()
        .take_while(|&&s| s > cutoff)
        .count();
    Subspace {
        ambient_dim: m.cols(),
        basis: decomposition.v.block(0, m.cols(), rank, m.cols()),
    }
}

/// Intersection of two subspaces, computed as the nullspace of the stacked
/// complementary projectors `(I - P1; I - P2)`.
pub fn intersect(s1: &Subspace, s2: &Subspace, tol: &ToleranceConfig) -> Result<Subspace> {
    if s1.ambient_dim != s2.ambient_dim {
        return Err(CoreError::AmbientMismatch {
            left: s1.ambient_dim,
            right: s2.ambient_dim,
        });
    }
    let identity = CMatrix::identity(s1.ambient_dim);
    let q1 = identity.sub(&s1.projector());
    let q2 = identity.sub(&s2.projector());
    Ok(nullspace(&q1.vstack(&q2), tol))
}

/// Closed span of a family of subspaces of the same ambient space.
pub fn span_union(spaces: &[Subspace], tol: &ToleranceConfig) -> Result<Subspace> {
    let first = spaces
        .first()
        .ok_or_else(|| CoreError::invalid("span_union", "empty list of subspaces"))?;
    let ambient = first.ambient_dim;
    let mut stacked = first.basis.clone();
    for s in &spaces[1..] {
        if s.ambient_dim != ambient {
            return Err(CoreError::AmbientMismatch {
                left: ambient,
                right: s.ambient_dim,
            });
        }
        stacked = stacked.hstack(&s.basis);
    }
    Ok(Subspace::from_spanning(&stacked, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn canonical(ambient: usize, axes: &[usize]) -> Subspace {
        let m = CMatrix::from_fn(ambient, axes.len(), |i, j| {
            if i == axes[j] {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        });
        Subspace::from_orthonormal(m, &tol()).unwrap()
    }

    #[test]
    fn nullspace_of_zero_map_is_everything() {
        let z = CMatrix::zeros(2, 3);
        assert_eq!(nullspace(&z, &tol()).dim(), 3);
    }

    #[test]
    fn nullspace_of_identity_is_trivial() {
        assert_eq!(nullspace(&CMatrix::identity(4), &tol()).dim(), 0);
    }

    #[test]
    fn nullspace_of_rank_one_matrix() {
        // Hand elimination: kernel of [[1,1],[1,1]] is spanned by (1,-1)/sqrt(2).
        let m = CMatrix::from_int_rows(&[&[1, 1], &[1, 1]]);
        let ker = nullspace(&m, &tol());
        assert_eq!(ker.dim(), 1);
        let expected = CMatrix::from_rows(vec![
            vec![c(1.0 / 2.0_f64.sqrt(), 0.0)],
            vec![c(-1.0 / 2.0_f64.sqrt(), 0.0)],
        ])
        .unwrap();
        assert!(ker.residual_of(&expected) <= 1e-12);
    }

    #[test]
    fn intersect_with_itself_keeps_dimension() {
        let s = canonical(4, &[0, 2]);
        let i = intersect(&s, &s, &tol()).unwrap();
        assert_eq!(i.dim(), 2);
    }

    #[test]
    fn orthogonal_lines_intersect_trivially() {
        let e1 = canonical(2, &[0]);
        let e2 = canonical(2, &[1]);
        assert_eq!(intersect(&e1, &e2, &tol()).unwrap().dim(), 0);
    }

    #[test]
    fn intersect_rejects_ambient_mismatch() {
        let a = canonical(2, &[0]);
        let b = canonical(3, &[0]);
        assert!(matches!(
            intersect(&a, &b, &tol()),
            Err(CoreError::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn span_union_absorbs_zero_and_duplicates() {
        let z = Subspace::zero(3);
        let s = canonical(3, &[1]);
        let u = span_union(&[z, s.clone()], &tol()).unwrap();
        assert_eq!(u.dim(), 1);
        let dup = span_union(&[s.clone(), s.clone()], &tol()).unwrap();
        assert_eq!(dup.dim(), 1);
        let both = span_union(&[canonical(3, &[0]), canonical(3, &[1])], &tol()).unwrap();
        assert_eq!(both.dim(), 2);
    }

    #[test]
    fn complement_dimensions_add_up() {
        let s = canonical(5, &[0, 3]);
        let comp = s.complement(&tol());
        assert_eq!(comp.dim(), 3);
        // complement really is orthogonal to s
        let overlap = s.basis().adjoint().mul(comp.basis()).max_abs();
        assert!(overlap <= 1e-12);
    }
}

//! The Parrott family: tuples `T_i = [[0, 0], [U_i, 0]]` built from
//! unitaries `U_1, ..., U_n`. These commute for every choice of unitaries
//! (all products `T_i T_j` vanish), and extremality is decided by the joint
//! commutator kernel of the normalized unitaries `W_j = U_k^{-1} U_j`.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::extensions::{validate_certificate_in_place, ExtensionCertificate, Provenance};
use crate::linalg::{intersect, nullspace, CMatrix, Subspace, ToleranceConfig};
use crate::tuples::OperatorTuple;

/// Unitarity residual bound for constructor inputs.
pub const UNITARITY_TOL: f64 = 1e-10;

/// A validated n-tuple of unitaries of equal dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParrottInputWire", into = "ParrottInputWire")]
pub struct ParrottInput {
    unitaries: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ParrottInputWire {
    unitaries: Vec<CMatrix>,
}

impl TryFrom<ParrottInputWire> for ParrottInput {
    type Error = CoreError;

    fn try_from(wire: ParrottInputWire) -> Result<Self> {
        ParrottInput::new(wire.unitaries)
    }
}

impl From<ParrottInput> for ParrottInputWire {
    fn from(input: ParrottInput) -> Self {
        ParrottInputWire {
            unitaries: input.unitaries,
        }
    }
}

impl ParrottInput {
    pub fn new(unitaries: Vec<CMatrix>) -> Result<Self> {
        let first = unitaries
            .first()
            .ok_or_else(|| CoreError::invalid("parrott input", "needs at least one unitary"))?;
        let dim = first.rows();
        if dim == 0 {
            return Err(CoreError::invalid("parrott input", "dimension must be at least 1"));
        }
        for (index, u) in unitaries.iter().enumerate() {
            if !u.is_square() || u.rows() != dim {
                return Err(CoreError::DimMismatch {
                    context: "parrott input",
                    expected: dim,
                    got: u.rows().max(u.cols()),
                });
            }
            let residual = u
                .adjoint()
                .mul(u)
                .sub(&CMatrix::identity(dim))
                .max_abs();
            if residual > UNITARITY_TOL {
                return Err(CoreError::NonUnitaryInput { index, residual });
            }
        }
        Ok(ParrottInput { unitaries })
    }

    pub fn n(&self) -> usize {
        self.unitaries.len()
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].rows()
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }
}

/// The tuple `T_i = [[0, 0], [U_i, 0]]` on `C^{2d}`.
pub fn build_parrott(input: &ParrottInput) -> OperatorTuple {
    let d = input.dim();
    let zero = CMatrix::zeros(d, d);
    let ops = input
        .unitaries
        .iter()
        .map(|u| CMatrix::from_blocks(&zero, &zero, u, &zero))
        .collect();
    OperatorTuple::new(ops).expect("blocks are square")
}

/// Joint commutator kernel with the given pivot (0-based):
/// the intersection of `ker [W_i, W_j]` over all pairs, `W_j = U_pivot^* U_j`.
pub fn commutator_kernel(
    input: &ParrottInput,
    pivot: usize,
    tol: &ToleranceConfig,
) -> Result<Subspace> {
    let n = input.n();
    if pivot >= n {
        return Err(CoreError::BadPivot { pivot, n });
    }
    let pivot_adj = input.unitaries[pivot].adjoint();
    let w: Vec<CMatrix> = input
        .unitaries
        .iter()
        .map(|u| pivot_adj.mul(u))
        .collect();
    let mut kernel = Subspace::full(input.dim());
    for i in 0..n {
        for j in (i + 1)..n {
            let commutator_kernel = nullspace(&w[i].commutator(&w[j]), tol);
            kernel = intersect(&kernel, &commutator_kernel, tol)?;
            if kernel.is_zero() {
                return Ok(kernel);
            }
        }
    }
    Ok(kernel)
}

/// Extremality criterion: the Parrott tuple is extremal iff the commutator
/// kernel with the last pivot is trivial.
pub fn parrott_is_extremal(input: &ParrottInput, tol: &ToleranceConfig) -> bool {
    commutator_kernel(input, input.n() - 1, tol)
        .expect("last pivot is in range")
        .is_zero()
}

/// Explicit non-trivial extension on `C^{2d} (+) K` when the commutator
/// kernel K is non-trivial: `X_i = [[0, 0, W_i A_n], [U_i, 0, 0], [0, 0, 0]]`
/// with `A_n` the inclusion of K.
pub fn parrott_extension(
    input: &ParrottInput,
    tol: &ToleranceConfig,
) -> Result<ExtensionCertificate> {
    let n = input.n();
    let d = input.dim();
    let kernel = commutator_kernel(input, n - 1, tol)?;
    if kernel.is_zero() {
        return Err(CoreError::ExtremalNoKernel);
    }
    let k = kernel.dim();
    let pivot_adj = input.unitaries[n - 1].adjoint();
    let a_blocks: Vec<CMatrix> = input
        .unitaries
        .iter()
        .map(|u| {
            let w = pivot_adj.mul(u);
            w.mul(kernel.basis()).vstack(&CMatrix::zeros(d, k))
        })
        .collect();
    let b_blocks = vec![CMatrix::zeros(k, k); n];
    let mut cert = ExtensionCertificate::new(
        build_parrott(input),
        a_blocks,
        b_blocks,
        Provenance::ParrottKernel,
    )?;
    validate_certificate_in_place(&mut cert, tol);
    Ok(cert)
}

/// Pivot independence: the set of pivots with trivial commutator kernel is
/// either all of them or none of them, so the apparent favoritism of the
/// last unitary is superficial. Returns whether that holds for this input.
pub fn favoritism_check(input: &ParrottInput, tol: &ToleranceConfig) -> bool {
    let trivial_count = (0..input.n())
        .filter(|&pivot| {
            commutator_kernel(input, pivot, tol)
                .expect("pivot in range")
                .is_zero()
        })
        .count();
    trivial_count == 0 || trivial_count == input.n()
}

/// The 2x2 unitaries `[[0,1],[1,0]]`, `[[1,0],[0,-1]]`, `I`: a desk-scale
/// triple with trivial joint commutator kernel, hence an extremal Parrott
/// tuple. The pair also stands in for unitaries generating a free group,
/// where the criterion reduces to `ker [U_1, U_2] = {0}`.
pub fn pauli_like_triple() -> ParrottInput {
    ParrottInput::new(vec![
        CMatrix::from_int_rows(&[&[0, 1], &[1, 0]]),
        CMatrix::from_int_rows(&[&[1, 0], &[0, -1]]),
        CMatrix::identity(2),
    ])
    .expect("literal unitaries")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_unitary;
    use crate::tuples::{check_commuting, check_partial_isometries};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn scalar_unit_builds_the_nilpotent_shift() {
        let input = ParrottInput::new(vec![CMatrix::identity(1)]).unwrap();
        let t = build_parrott(&input);
        assert_eq!(t.op(0), &CMatrix::from_int_rows(&[&[0, 0], &[1, 0]]));
    }

    #[test]
    fn non_unitary_input_is_rejected_with_index() {
        let err = ParrottInput::new(vec![
            CMatrix::identity(2),
            CMatrix::identity(2).scale_re(0.5),
        ])
        .unwrap_err();
        assert!(matches!(err, CoreError::NonUnitaryInput { index: 1, .. }));
    }

    #[test]
    fn products_vanish_so_any_unitaries_commute() {
        let input = pauli_like_triple();
        let t = build_parrott(&input);
        for i in 0..t.n() {
            for j in 0..t.n() {
                assert_eq!(t.op(i).mul(t.op(j)).max_abs(), 0.0);
            }
        }
        assert!(check_commuting(&t, &tol()).passed);
        assert!(check_partial_isometries(&t).passed);
    }

    #[test]
    fn commuting_unitaries_give_full_kernel_and_non_extremality() {
        let input = ParrottInput::new(vec![
            CMatrix::diagonal(&[1.0, -1.0]),
            CMatrix::diagonal(&[-1.0, 1.0]),
        ])
        .unwrap();
        let kernel = commutator_kernel(&input, 1, &tol()).unwrap();
        assert_eq!(kernel.dim(), 2);
        assert!(!parrott_is_extremal(&input, &tol()));
    }

    #[test]
    fn pauli_like_triple_is_extremal() {
        let input = pauli_like_triple();
        let kernel = commutator_kernel(&input, 2, &tol()).unwrap();
        assert_eq!(kernel.dim(), 0);
        assert!(parrott_is_extremal(&input, &tol()));
        assert!(matches!(
            parrott_extension(&input, &tol()),
            Err(CoreError::ExtremalNoKernel)
        ));
    }

    #[test]
    fn repeated_unitary_pair_has_full_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = random_unitary(3, &mut rng);
        let input = ParrottInput::new(vec![u.clone(), u]).unwrap();
        let kernel = commutator_kernel(&input, 1, &tol()).unwrap();
        assert_eq!(kernel.dim(), 3);
    }

    #[test]
    fn identity_triple_extension_on_c3_validates() {
        let input = ParrottInput::new(vec![
            CMatrix::identity(1),
            CMatrix::identity(1),
            CMatrix::identity(1),
        ])
        .unwrap();
        let cert = parrott_extension(&input, &tol()).unwrap();
        assert_eq!(cert.ext_dim, 1);
        assert_eq!(cert.base.dim() + cert.ext_dim, 3);
        let verdicts = cert.verdicts.as_ref().unwrap();
        assert!(verdicts.all_passed() && verdicts.nontrivial);
    }

    #[test]
    fn identical_unitaries_extend_with_full_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let u = random_unitary(2, &mut rng);
        let input = ParrottInput::new(vec![u.clone(), u.clone(), u]).unwrap();
        let cert = parrott_extension(&input, &tol()).unwrap();
        assert_eq!(cert.ext_dim, 2);
        assert!(cert.verdicts.as_ref().unwrap().all_passed());
    }

    #[test]
    fn favoritism_holds_for_extreme_cases() {
        assert!(favoritism_check(&pauli_like_triple(), &tol()));
        let commuting = ParrottInput::new(vec![
            CMatrix::diagonal(&[1.0, 1.0]),
            CMatrix::diagonal(&[1.0, -1.0]),
        ])
        .unwrap();
        assert!(favoritism_check(&commuting, &tol()));
    }

    #[test]
    fn probe_on_parrott_finds_solutions_only_with_nontrivial_kernel() {
        // Contractivity forces the middle block of any extension to zero,
        // so the probe's systems are solvable exactly when the commutator
        // kernel is non-trivial, including for non-zero sampled B-tuples.
        let extremal = build_parrott(&pauli_like_triple());
        let report = crate::extensions::probe_with_report(&extremal, 10, 1, 31, &tol());
        assert!(report.certificate.is_none());
        assert!(report.solution_dims.iter().all(|&d| d == 0));

        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let u = random_unitary(2, &mut rng);
        let repeated = ParrottInput::new(vec![u.clone(), u]).unwrap();
        let tuple = build_parrott(&repeated);
        let report = crate::extensions::probe_with_report(&tuple, 3, 1, 31, &tol());
        let cert = report.certificate.expect("full kernel admits extensions");
        let verdicts = cert.verdicts.as_ref().unwrap();
        assert!(verdicts.all_passed() && verdicts.nontrivial);
    }

    #[test]
    fn bad_pivot_is_reported() {
        let input = pauli_like_triple();
        assert!(matches!(
            commutator_kernel(&input, 3, &tol()),
            Err(CoreError::BadPivot { pivot: 3, n: 3 })
        ));
    }
}

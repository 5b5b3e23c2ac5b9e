//! Property-based tests of the numerical invariants: norm symmetry,
//! nullspace orthogonality, subspace arithmetic, conjugation bilinearity,
//! torus-sup bracketing, scaling-extension identities, certificate
//! validity, and pivot independence of the Parrott criterion.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use extremal_core::extensions::{extend_by_scaling, probe_with_report};
use extremal_core::linalg::{intersect, nullspace, operator_norm, svd, CMatrix, Subspace};
use extremal_core::parrott::{favoritism_check, ParrottInput};
use extremal_core::sampling::{random_commuting_tuple, random_matrix, random_unitary};
use extremal_core::tuples::{check_commuting, check_contractive, direct_sum, restrict};
use extremal_core::vonneumann::{torus_sup, MultiPolynomial};
use extremal_core::{OperatorTuple, ToleranceConfig};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Strategy: complex matrix with entries in the unit square.
fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |entries| {
        CMatrix::from_fn(rows, cols, |i, j| {
            let (re, im) = entries[i * cols + j];
            Complex64::new(re, im)
        })
    })
}

fn vector_strategy(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operator_norm_is_adjoint_invariant(m in matrix_strategy(4, 3)) {
        let direct = operator_norm(&m);
        let adjoint = operator_norm(&m.adjoint());
        prop_assert!((direct - adjoint).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn nullspace_is_orthogonal_to_row_space(m in matrix_strategy(3, 5)) {
        let t = tol();
        let kernel = nullspace(&m, &t);
        prop_assert!(kernel.dim() >= 2);
        let sigma_max = operator_norm(&m);
        let residual = operator_norm(&m.mul(kernel.basis()));
        prop_assert!(residual <= 10.0 * t.eps_rank * sigma_max.max(1.0));
    }

    #[test]
    fn intersection_is_commutative_and_contained(
        a in matrix_strategy(4, 3),
        b in matrix_strategy(4, 3),
    ) {
        let t = tol();
        let s1 = Subspace::from_spanning(&a, &t);
        let s2 = Subspace::from_spanning(&b, &t);
        let left = intersect(&s1, &s2, &t).unwrap();
        let right = intersect(&s2, &s1, &t).unwrap();
        prop_assert_eq!(left.dim(), right.dim());
        // contained in both arguments: projecting the basis onto each
        // argument changes nothing
        for arg in [&s1, &s2] {
            let projected = arg.projector().mul(left.basis());
            let residual = projected.sub(left.basis()).max_abs();
            prop_assert!(residual <= 1e-9);
        }
    }

    #[test]
    fn intersection_dimension_matches_rank_count(seed in 0u64..200) {
        // dim(S1 ^ S2) = dim S1 + dim S2 - rank [B1 B2] for random inputs
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = tol();
        let b1 = random_matrix(4, 3, &mut rng);
        let b2 = random_matrix(4, 3, &mut rng);
        let s1 = Subspace::from_spanning(&b1, &t);
        let s2 = Subspace::from_spanning(&b2, &t);
        let meet = intersect(&s1, &s2, &t).unwrap();

        let stacked = s1.basis().hstack(s2.basis());
        let singular_values = svd(&stacked).singular_values;
        let cutoff = t.rank_cutoff(singular_values.first().copied().unwrap_or(0.0));
        let rank = singular_values.iter().take_while(|&&s| s > cutoff).count();
        prop_assert_eq!(meet.dim(), s1.dim() + s2.dim() - rank);
    }

    #[test]
    fn conjugation_is_bilinear_not_sesquilinear(
        x in vector_strategy(5),
        y in vector_strategy(5),
    ) {
        // conj(x)* y = conj(y)* x: both sides are sum_k x_k y_k
        let conj_x_y: Complex64 = x.iter().zip(&y).map(|(a, b)| a.conj().conj() * b).sum();
        let conj_y_x: Complex64 = y.iter().zip(&x).map(|(a, b)| a.conj().conj() * b).sum();
        prop_assert!((conj_x_y - conj_y_x).norm() <= 1e-12);
        // and as matrices: conj is an involution
        let m = CMatrix::from_fn(5, 1, |i, _| x[i]);
        prop_assert_eq!(m.conjugate().conjugate(), m);
    }

    #[test]
    fn torus_bracket_orders_and_width_formula(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
    ) {
        let alphas: [Vec<u32>; 6] = [
            vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 0], vec![0, 2],
        ];
        let p = MultiPolynomial::from_terms(
            2,
            alphas.iter().cloned().zip(
                coeffs.iter().map(|&(re, im)| Complex64::new(re, im)),
            ),
        ).unwrap();
        for grid in [8usize, 16, 32] {
            let bracket = torus_sup(&p, grid);
            prop_assert!(bracket.lower <= bracket.upper);
            let rho = std::f64::consts::PI * 2.0f64.sqrt() / grid as f64;
            let expected_width = p.gradient_bound() * rho;
            prop_assert!((bracket.upper - bracket.lower - expected_width).abs() <= 1e-12);
            // the grid value at z = (1, 1) is a lower witness
            let at_one = p.eval_scalar(&[Complex64::ONE, Complex64::ONE]).norm();
            prop_assert!(bracket.lower >= at_one - 1e-12);
        }
    }
}

proptest! {
    // Heavier cases: fewer iterations.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_extension_obeys_the_norm_bound(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let norms = [
            0.2 + 0.75 * (seed as f64 * 0.618).fract(),
            1.0,
            0.5,
        ];
        let t = random_commuting_tuple(3, &norms, &mut rng);
        let (cert, params) = extend_by_scaling(&t, &tol()).unwrap();
        let verdicts = cert.verdicts.as_ref().unwrap();
        prop_assert!(verdicts.commuting.passed);
        prop_assert!(verdicts.contractive.passed);
        prop_assert!(verdicts.nontrivial);
        for i in 0..3 {
            let x_norm = operator_norm(&cert.assembled_op(i));
            let t_norm = operator_norm(t.op(i));
            if t_norm > 0.0 {
                let bound = params.norm_bound_factor(i) * t_norm * t_norm;
                prop_assert!(x_norm * x_norm <= bound + 1e-9,
                    "component {i}: {x_norm}^2 vs bound {bound}");
            }
        }
    }

    #[test]
    fn probe_certificates_always_validate(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_commuting_tuple(2, &[0.8, 0.6], &mut rng);
        let report = probe_with_report(&t, 2, 1, seed, &tol());
        if let Some(cert) = &report.certificate {
            let verdicts = cert.verdicts.as_ref().unwrap();
            prop_assert!(verdicts.commuting.passed);
            prop_assert!(verdicts.contractive.passed);
            prop_assert!(verdicts.restriction.passed);
            prop_assert!(verdicts.nontrivial && !verdicts.reducing);
        }
    }

    #[test]
    fn favoritism_is_pivot_independent(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = ParrottInput::new(vec![
            random_unitary(2, &mut rng),
            random_unitary(2, &mut rng),
            random_unitary(2, &mut rng),
        ]).unwrap();
        prop_assert!(favoritism_check(&input, &tol()));
    }

    #[test]
    fn direct_sum_then_restrict_is_identity(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_commuting_tuple(2, &[0.9, 0.4], &mut rng);
        let s = random_commuting_tuple(2, &[0.7, 1.0], &mut rng);
        let sum = direct_sum(&t, &s).unwrap();
        prop_assert!(check_commuting(&sum, &tol()).passed);
        prop_assert!(check_contractive(&sum, &tol()).passed);
        let leading = Subspace::from_orthonormal(
            CMatrix::from_fn(sum.dim(), t.dim(), |i, j| {
                if i == j { Complex64::ONE } else { Complex64::ZERO }
            }),
            &tol(),
        ).unwrap();
        let back = restrict(&sum, &leading, &tol()).unwrap();
        for i in 0..t.n() {
            prop_assert!(back.op(i).sub(t.op(i)).max_abs() <= 1e-14);
        }
    }

    #[test]
    fn tuple_json_round_trips_to_identical_values(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_commuting_tuple(3, &[1.0, 0.3], &mut rng);
        let text = serde_json::to_string(&t).unwrap();
        let back: OperatorTuple = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, t);
    }
}

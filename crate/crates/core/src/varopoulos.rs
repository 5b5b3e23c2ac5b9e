//! The Varopoulos family: triples on `C (+) C^J (+) C` built from three
//! vectors `x_1, x_2, x_3` in the unit ball of `C^J`,
//!
//! ```text
//!         [ 0      0    0 ]
//!   T_i = [ x_i    0    0 ]      with (xbar_i)^* h = sum_a x_i(a) h(a).
//!         [ 0  (xbar_i)^* 0 ]
//! ```
//!
//! The module computes the subspace `R` spanned by the vectors and their
//! conjugates, a conjugation-fixed (real-entried) orthonormal basis of it,
//! the coefficient matrix `a` and the 6 x 3r constraint matrix `Lambda`
//! whose kernel detects non-extremality, and then decides extremality by a
//! five-branch criterion, emitting a validated extension certificate in
//! every non-extremal branch.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::extensions::{
    extend_by_gap, extend_by_scaling, scale_into_contraction, validate_certificate_in_place,
    ExtensionCertificate, Provenance,
};
use crate::linalg::{nullspace, operator_norm, CMatrix, ToleranceConfig};
use crate::tuples::OperatorTuple;

/// Slack allowed over exact unit norm for input vectors.
pub const NORM_SLACK: f64 = 1e-12;

/// Three vectors in the unit ball of `C^J`, equal lengths, norms
/// at most `1 + NORM_SLACK`.
#[derive(Debug, Clone, PartialEq)]
pub struct VaropoulosInput {
    x: [Vec<Complex64>; 3],
}

impl VaropoulosInput {
    pub fn new(x1: Vec<Complex64>, x2: Vec<Complex64>, x3: Vec<Complex64>) -> Result<Self> {
        let j = x1.len();
        if j == 0 {
            return Err(CoreError::invalid("varopoulos input", "J must be at least 1"));
        }
        let x = [x1, x2, x3];
        for (index, xi) in x.iter().enumerate() {
            if xi.len() != j {
                return Err(CoreError::DimMismatch {
                    context: "varopoulos input",
                    expected: j,
                    got: xi.len(),
                });
            }
            if xi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(CoreError::NonFinite);
            }
            let norm = vec_norm(xi);
            if norm > 1.0 + NORM_SLACK {
                return Err(CoreError::NormExceeded { index, norm });
            }
        }
        Ok(VaropoulosInput { x })
    }

    /// Convenience constructor from real coordinates.
    pub fn from_real(x1: &[f64], x2: &[f64], x3: &[f64]) -> Result<Self> {
        let lift = |v: &[f64]| v.iter().map(|&re| Complex64::new(re, 0.0)).collect();
        VaropoulosInput::new(lift(x1), lift(x2), lift(x3))
    }

    pub fn j_size(&self) -> usize {
        self.x[0].len()
    }

    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.x[i]
    }

    pub fn vector_norms(&self) -> [f64; 3] {
        [
            vec_norm(&self.x[0]),
            vec_norm(&self.x[1]),
            vec_norm(&self.x[2]),
        ]
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// The triple on `C (+) C^J (+) C`.
pub fn build_varopoulos(input: &VaropoulosInput) -> OperatorTuple {
    let j = input.j_size();
    let dim = j + 2;
    let ops = (0..3)
        .map(|i| {
            let xi = input.vector(i);
            CMatrix::from_fn(dim, dim, |row, col| {
                if (1..=j).contains(&row) && col == 0 {
                    xi[row - 1]
                } else if row == j + 1 && (1..=j).contains(&col) {
                    // bottom row is (xbar_i)^*, whose entries are the
                    // unconjugated coordinates of x_i
                    xi[col - 1]
                } else {
                    Complex64::ZERO
                }
            })
        })
        .collect();
    OperatorTuple::new(ops).expect("square by construction")
}

/// Linear data of the analysis: the conjugation-fixed basis of R, the
/// coefficients of the x_i in that basis, and the constraint matrix Lambda.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaData {
    /// J x r matrix with real entries; columns are the basis of R.
    pub basis: CMatrix,
    /// dim R.
    pub r: usize,
    /// 3 x r coefficient matrix, `a[(i, l)] = <x_i, e_l>`.
    pub coefficients: CMatrix,
    /// The 6 x 3r constraint matrix.
    pub lambda: CMatrix,
    /// det Lambda, only defined when r = 2 (Lambda is then square).
    #[serde(with = "opt_complex_pair")]
    pub lambda_det: Option<Complex64>,
}

/// Extremality decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Extremal,
    NotExtremal(NonExtremalReason),
}

/// Which branch of the criterion fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonExtremalReason {
    /// Some `||x_i|| < 1`: rescaling extension.
    #[serde(rename = "subunit norm")]
    SubunitNorm,
    /// `R` is a proper subspace of `C^J`: gap extension.
    #[serde(rename = "R proper")]
    ProperR,
    /// `r >= 3`, so Lambda is wider than tall and has a kernel.
    #[serde(rename = "3r > 6")]
    WideLambda,
    /// `r = 1`: all three vectors are unimodular multiples of the first.
    #[serde(rename = "rank one")]
    RankOne,
    /// `r = 2` but Lambda is singular.
    #[serde(rename = "lambda singular")]
    SingularLambda,
}

/// Decision plus the certificate backing it (for non-extremal outcomes).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecisionOutcome {
    pub decision: Decision,
    pub certificate: Option<ExtensionCertificate>,
    /// Scaling factor applied to the kernel certificate's C-blocks, when
    /// the lambda-kernel route was used.
    pub certificate_scale: Option<f64>,
}

/// Full analysis record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VaropoulosAnalysis {
    #[serde(flatten)]
    pub lambda_data: LambdaData,
    pub decision: Decision,
    pub certificate: Option<ExtensionCertificate>,
    pub certificate_scale: Option<f64>,
}

/// Compute R, its conjugation-fixed orthonormal basis, the coefficients and
/// Lambda. When the basis fills all of `C^J` the canonical coordinates are
/// used unchanged, which reproduces the classical determinant values; in
/// general the real and imaginary parts of the x_i are orthonormalized over
/// the reals in declaration order.
pub fn compute_lambda(input: &VaropoulosInput, tol: &ToleranceConfig) -> LambdaData {
    let j = input.j_size();

    // Real candidates spanning R = span{x_i, conj(x_i)} over C.
    let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(6);
    for i in 0..3 {
        candidates.push(input.vector(i).iter().map(|z| z.re).collect());
        candidates.push(input.vector(i).iter().map(|z| z.im).collect());
    }
    let scale = candidates
        .iter()
        .map(|v| real_norm(v))
        .fold(1.0_f64, f64::max);
    let drop_tol = tol.eps_rank * scale;

    let mut basis_vectors: Vec<Vec<f64>> = Vec::new();
    for mut v in candidates {
        for _ in 0..2 {
            for e in &basis_vectors {
                let proj: f64 = e.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (ve, ee) in v.iter_mut().zip(e) {
                    *ve -= proj * ee;
                }
            }
        }
        let norm = real_norm(&v);
        if norm > drop_tol {
            for ve in &mut v {
                *ve /= norm;
            }
            basis_vectors.push(v);
        }
    }
    let r = basis_vectors.len();

    let basis = if r == j {
        CMatrix::identity(j)
    } else {
        CMatrix::from_fn(j, r, |row, col| Complex64::new(basis_vectors[col][row], 0.0))
    };

    let coefficients = CMatrix::from_fn(3, r, |i, l| {
        input
            .vector(i)
            .iter()
            .enumerate()
            .map(|(alpha, &z)| z * basis[(alpha, l)].re)
            .sum()
    });

    let lambda = assemble_lambda(&coefficients, r);
    let lambda_det = (r == 2).then(|| lambda.determinant());

    LambdaData {
        basis,
        r,
        coefficients,
        lambda,
        lambda_det,
    }
}

fn real_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Row layout of the 6 x 3r system: rows 0-2 encode `C_i^* x_i = 0`
/// (coefficients of x_i in block i), rows 3-5 encode the conjugation
/// constraints for the pairs (1,2), (1,3), (2,3): conjugated coefficients
/// of x_j in block i and negated conjugated coefficients of x_i in block j.
fn assemble_lambda(coefficients: &CMatrix, r: usize) -> CMatrix {
    let mut lambda = CMatrix::zeros(6, 3 * r);
    for i in 0..3 {
        for l in 0..r {
            lambda[(i, i * r + l)] = coefficients[(i, l)];
        }
    }
    let pairs = [(0, 1), (0, 2), (1, 2)];
    for (row, &(i, j)) in pairs.iter().enumerate() {
        for l in 0..r {
            lambda[(3 + row, i * r + l)] = coefficients[(j, l)].conj();
            lambda[(3 + row, j * r + l)] = -coefficients[(i, l)].conj();
        }
    }
    lambda
}

/// Five-branch extremality decision. Branch order fixes precedence among
/// overlapping failure reasons: norms first, then the size of R, then the
/// shape and kernel of Lambda.
pub fn decide(
    input: &VaropoulosInput,
    data: &LambdaData,
    tol: &ToleranceConfig,
) -> DecisionOutcome {
    let tuple = build_varopoulos(input);
    let norms = tuple.norms();
    let min_norm = norms.iter().copied().fold(f64::INFINITY, f64::min);

    if min_norm < 1.0 - tol.eps_contr {
        let (certificate, _params) =
            extend_by_scaling(&tuple, tol).expect("a strictly contractive component exists");
        return DecisionOutcome {
            decision: Decision::NotExtremal(NonExtremalReason::SubunitNorm),
            certificate: Some(certificate),
            certificate_scale: None,
        };
    }

    if data.r < input.j_size() {
        let certificate = extend_by_gap(&tuple, tol).expect("R proper gives a non-trivial gap");
        return DecisionOutcome {
            decision: Decision::NotExtremal(NonExtremalReason::ProperR),
            certificate: Some(certificate),
            certificate_scale: None,
        };
    }

    if data.r >= 3 {
        let (certificate, scale) = lambda_kernel_certificate(input, data, tol)
            .expect("3r > 6 forces a non-trivial kernel");
        return DecisionOutcome {
            decision: Decision::NotExtremal(NonExtremalReason::WideLambda),
            certificate: Some(certificate),
            certificate_scale: Some(scale),
        };
    }

    if data.r == 1 {
        let certificate = rank_one_certificate(input, data, &tuple, tol);
        return DecisionOutcome {
            decision: Decision::NotExtremal(NonExtremalReason::RankOne),
            certificate: Some(certificate),
            certificate_scale: None,
        };
    }

    // r = 2: extremal iff Lambda is nonsingular, judged relative to the
    // scale of Lambda (a 6x6 determinant grows like the sixth power).
    let det = data.lambda_det.expect("r = 2 has a square Lambda");
    let scale = operator_norm(&data.lambda).powi(6).max(1.0);
    if det.norm() > tol.eps_det * scale {
        DecisionOutcome {
            decision: Decision::Extremal,
            certificate: None,
            certificate_scale: None,
        }
    } else {
        // With the default tolerances a vanishing determinant always comes
        // with a kernel vector. A caller can force eps_det and eps_rank
        // apart, in which case the determinant rule fires without a
        // numerical kernel to build the certificate from; the decision is
        // then reported without one.
        match lambda_kernel_certificate(input, data, tol) {
            Ok((certificate, cert_scale)) => DecisionOutcome {
                decision: Decision::NotExtremal(NonExtremalReason::SingularLambda),
                certificate: Some(certificate),
                certificate_scale: Some(cert_scale),
            },
            Err(_) => DecisionOutcome {
                decision: Decision::NotExtremal(NonExtremalReason::SingularLambda),
                certificate: None,
                certificate_scale: None,
            },
        }
    }
}

/// Full pipeline: compute the linear data and run the decision.
pub fn analyze(input: &VaropoulosInput, tol: &ToleranceConfig) -> VaropoulosAnalysis {
    let lambda_data = compute_lambda(input, tol);
    let outcome = decide(input, &lambda_data, tol);
    VaropoulosAnalysis {
        lambda_data,
        decision: outcome.decision,
        certificate: outcome.certificate,
        certificate_scale: outcome.certificate_scale,
    }
}

/// Certificate from a kernel vector of Lambda: with `M = C`, the kernel
/// coordinates `h^(i)_l` assemble the columns `C_i = sum_l e_l conj(h^(i)_l)`
/// which satisfy `x_i^* C_i = 0` and the conjugation constraints by
/// construction; the top functional and B-blocks are zero. The C-blocks are
/// rescaled by bisection until every assembled operator is a contraction,
/// and the factor is returned alongside.
pub fn lambda_kernel_certificate(
    input: &VaropoulosInput,
    data: &LambdaData,
    tol: &ToleranceConfig,
) -> Result<(ExtensionCertificate, f64)> {
    let kernel = nullspace(&data.lambda, tol);
    if kernel.is_zero() {
        return Err(CoreError::TrivialKernel);
    }
    let h = kernel.basis().column(0);
    let j = input.j_size();
    let r = data.r;
    let dim = j + 2;

    let a_blocks: Vec<CMatrix> = (0..3)
        .map(|i| {
            CMatrix::from_fn(dim, 1, |row, _| {
                if (1..=j).contains(&row) {
                    (0..r)
                        .map(|l| data.basis[(row - 1, l)] * h[i * r + l].conj())
                        .sum()
                } else {
                    Complex64::ZERO
                }
            })
        })
        .collect();
    let b_blocks = vec![CMatrix::zeros(1, 1); 3];

    let tuple = build_varopoulos(input);
    let scale = scale_into_contraction(&tuple, &a_blocks, &b_blocks)
        .ok_or(CoreError::TrivialKernel)?;
    let scaled: Vec<CMatrix> = a_blocks.iter().map(|a| a.scale_re(scale)).collect();
    let mut cert =
        ExtensionCertificate::new(tuple, scaled, b_blocks, Provenance::VaropoulosLambda)?;
    validate_certificate_in_place(&mut cert, tol);
    Ok((cert, scale))
}

/// Rank-one branch: all x_i are unimodular multiples `x_i = c_i x_1`, and
/// placing the phases in the top functional slot gives the extension.
fn rank_one_certificate(
    input: &VaropoulosInput,
    data: &LambdaData,
    tuple: &OperatorTuple,
    tol: &ToleranceConfig,
) -> ExtensionCertificate {
    let j = input.j_size();
    let dim = j + 2;
    let base_coeff = data.coefficients[(0, 0)];
    let a_blocks: Vec<CMatrix> = (0..3)
        .map(|i| {
            let ratio = data.coefficients[(i, 0)] / base_coeff;
            let phase = ratio / ratio.norm();
            CMatrix::from_fn(dim, 1, |row, _| {
                if row == 0 {
                    phase
                } else {
                    Complex64::ZERO
                }
            })
        })
        .collect();
    let b_blocks = vec![CMatrix::zeros(1, 1); 3];
    let mut cert = ExtensionCertificate::new(
        tuple.clone(),
        a_blocks,
        b_blocks,
        Provenance::VaropoulosRankOne,
    )
    .expect("rank-one blocks have matching shapes");
    validate_certificate_in_place(&mut cert, tol);
    cert
}

// Wire format: {"J": ..., "x": [[..re/im pairs..], ...]}.
#[derive(Serialize, Deserialize)]
struct VaropoulosWire {
    #[serde(rename = "J")]
    j: usize,
    x: [Vec<[f64; 2]>; 3],
}

impl Serialize for VaropoulosInput {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let encode = |v: &[Complex64]| v.iter().map(|z| [z.re, z.im]).collect();
        VaropoulosWire {
            j: self.j_size(),
            x: [
                encode(&self.x[0]),
                encode(&self.x[1]),
                encode(&self.x[2]),
            ],
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for VaropoulosInput {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = VaropoulosWire::deserialize(deserializer)?;
        let decode = |v: &Vec<[f64; 2]>| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        let input = VaropoulosInput::new(
            decode(&wire.x[0]),
            decode(&wire.x[1]),
            decode(&wire.x[2]),
        )
        .map_err(D::Error::custom)?;
        if input.j_size() != wire.j {
            return Err(D::Error::custom(format!(
                "declared J={} but vectors have length {}",
                wire.j,
                input.j_size()
            )));
        }
        Ok(input)
    }
}

mod opt_complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        value: &Option<Complex64>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        value.map(|z| [z.re, z.im]).serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Option<Complex64>, D::Error> {
        let pair: Option<[f64; 2]> = Option::deserialize(deserializer)?;
        Ok(pair.map(|[re, im]| Complex64::new(re, im)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuples::{check_commuting, check_partial_isometries};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn remark_extremal_input() -> VaropoulosInput {
        VaropoulosInput::from_real(&[1.0, 0.0], &[INV_SQRT2, INV_SQRT2], &[0.0, 1.0]).unwrap()
    }

    fn remark_singular_input() -> VaropoulosInput {
        VaropoulosInput::from_real(&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]).unwrap()
    }

    #[test]
    fn repeated_unit_vector_builds_commuting_partial_isometries() {
        let input = VaropoulosInput::from_real(&[1.0], &[1.0], &[1.0]).unwrap();
        let t = build_varopoulos(&input);
        assert_eq!(t.dim(), 3);
        assert_eq!(t.op(0), t.op(1));
        assert!(check_commuting(&t, &tol()).passed);
        assert!(check_partial_isometries(&t).passed);
    }

    #[test]
    fn operator_norms_equal_vector_norms() {
        let input =
            VaropoulosInput::from_real(&[1.0, 0.0], &[0.5, 0.0], &[0.0, 1.0]).unwrap();
        let t = build_varopoulos(&input);
        let norms = t.norms();
        assert!((norms[0] - 1.0).abs() <= 1e-12);
        assert!((norms[1] - 0.5).abs() <= 1e-12);
        assert!((norms[2] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn oversized_vector_is_rejected() {
        let err = VaropoulosInput::from_real(&[1.0], &[1.1], &[1.0]).unwrap_err();
        assert!(matches!(err, CoreError::NormExceeded { index: 1, .. }));
    }

    #[test]
    fn extremal_remark_input_has_det_one() {
        let data = compute_lambda(&remark_extremal_input(), &tol());
        assert_eq!(data.r, 2);
        let det = data.lambda_det.unwrap();
        assert!((det - Complex64::ONE).norm() <= 1e-9, "det = {det}");
    }

    #[test]
    fn singular_remark_input_has_det_zero() {
        let data = compute_lambda(&remark_singular_input(), &tol());
        assert_eq!(data.r, 2);
        assert!(data.lambda_det.unwrap().norm() <= 1e-9);
    }

    #[test]
    fn real_spanning_vectors_give_wide_lambda() {
        let input = VaropoulosInput::from_real(
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
        )
        .unwrap();
        let data = compute_lambda(&input, &tol());
        assert_eq!(data.r, 3);
        assert_eq!((data.lambda.rows(), data.lambda.cols()), (6, 9));
    }

    #[test]
    fn decision_branches_fire_in_order() {
        // (1) subunit norm
        let sub = VaropoulosInput::from_real(&[0.5], &[1.0], &[1.0]).unwrap();
        let analysis = analyze(&sub, &tol());
        assert_eq!(
            analysis.decision,
            Decision::NotExtremal(NonExtremalReason::SubunitNorm)
        );

        // (2) R proper
        let proper = VaropoulosInput::from_real(
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[INV_SQRT2, INV_SQRT2, 0.0],
        )
        .unwrap();
        let analysis = analyze(&proper, &tol());
        assert_eq!(
            analysis.decision,
            Decision::NotExtremal(NonExtremalReason::ProperR)
        );

        // (3) wide lambda
        let wide = VaropoulosInput::from_real(
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
        )
        .unwrap();
        let analysis = analyze(&wide, &tol());
        assert_eq!(
            analysis.decision,
            Decision::NotExtremal(NonExtremalReason::WideLambda)
        );

        // (4) rank one
        let rank_one = VaropoulosInput::from_real(&[1.0], &[1.0], &[1.0]).unwrap();
        let analysis = analyze(&rank_one, &tol());
        assert_eq!(
            analysis.decision,
            Decision::NotExtremal(NonExtremalReason::RankOne)
        );

        // (5) r = 2, extremal and singular
        assert_eq!(analyze(&remark_extremal_input(), &tol()).decision, Decision::Extremal);
        assert_eq!(
            analyze(&remark_singular_input(), &tol()).decision,
            Decision::NotExtremal(NonExtremalReason::SingularLambda)
        );
    }

    #[test]
    fn every_nonextremal_branch_certificate_validates() {
        let inputs = [
            VaropoulosInput::from_real(&[0.5], &[1.0], &[1.0]).unwrap(),
            VaropoulosInput::from_real(
                &[1.0, 0.0, 0.0],
                &[0.0, 1.0, 0.0],
                &[INV_SQRT2, INV_SQRT2, 0.0],
            )
            .unwrap(),
            VaropoulosInput::from_real(
                &[1.0, 0.0, 0.0],
                &[0.0, 1.0, 0.0],
                &[0.0, 0.0, 1.0],
            )
            .unwrap(),
            VaropoulosInput::from_real(&[1.0], &[1.0], &[1.0]).unwrap(),
            remark_singular_input(),
        ];
        for input in &inputs {
            let analysis = analyze(input, &tol());
            let cert = analysis.certificate.expect("non-extremal branch");
            let verdicts = cert.verdicts.as_ref().unwrap();
            assert!(
                verdicts.all_passed() && verdicts.nontrivial,
                "input {input:?}: {verdicts:?}"
            );
        }
    }

    #[test]
    fn conjugation_fixed_basis_is_real_and_reconstructs() {
        let input = VaropoulosInput::new(
            vec![
                Complex64::new(INV_SQRT2, 0.0),
                Complex64::new(0.0, INV_SQRT2),
            ],
            vec![Complex64::new(1.0, 0.0), Complex64::ZERO],
            vec![Complex64::ZERO, Complex64::new(0.0, 1.0)],
        )
        .unwrap();
        let data = compute_lambda(&input, &tol());
        for entry in data.basis.entries() {
            assert!(entry.im.abs() <= 1e-12);
        }
        // x_i = sum_l a_il e_l
        for i in 0..3 {
            let mut residual = 0.0_f64;
            for alpha in 0..input.j_size() {
                let mut reconstructed = Complex64::ZERO;
                for l in 0..data.r {
                    reconstructed += data.coefficients[(i, l)] * data.basis[(alpha, l)].re;
                }
                residual = residual.max((reconstructed - input.vector(i)[alpha]).norm());
            }
            assert!(residual <= 1e-10, "vector {i}: residual {residual}");
        }
    }

    #[test]
    fn kernel_certificate_fails_on_extremal_input() {
        let input = remark_extremal_input();
        let data = compute_lambda(&input, &tol());
        assert!(matches!(
            lambda_kernel_certificate(&input, &data, &tol()),
            Err(CoreError::TrivialKernel)
        ));
    }

    #[test]
    fn extremal_instance_survives_the_rank_one_probe() {
        // Cross-check of the determinant criterion: the probe's linear
        // systems have only the zero solution on the extremal instance.
        let tuple = build_varopoulos(&remark_extremal_input());
        let report = crate::extensions::probe_with_report(&tuple, 8, 1, 99, &tol());
        assert!(report.certificate.is_none());
        assert!(report.solution_dims.iter().all(|&d| d == 0));
    }

    #[test]
    fn proper_r_gap_is_the_middle_complement() {
        // For R a proper subspace of C^J the gap subspace is
        // {0} (+) R-perp (+) {0} inside C (+) C^J (+) C.
        let input = VaropoulosInput::from_real(
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[INV_SQRT2, INV_SQRT2, 0.0],
        )
        .unwrap();
        let tuple = build_varopoulos(&input);
        let gap = crate::extensions::gap_subspace(&tuple, &tol());
        assert_eq!(gap.dim(), 1);
        // the only R-perp direction is the third coordinate of the middle
        // block, i.e. coordinate 3 of C^5
        let expected = CMatrix::from_fn(5, 1, |i, _| {
            if i == 3 {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        });
        assert!(gap.residual_of(&expected) <= 1e-12);
    }

    #[test]
    fn input_json_round_trip() {
        let input = remark_extremal_input();
        let text = serde_json::to_string(&input).unwrap();
        assert!(text.contains("\"J\":2"));
        let back: VaropoulosInput = serde_json::from_str(&text).unwrap();
        assert_eq!(back, input);
    }
}

//! Extension certificates and the general non-extremality constructions.
//!
//! An extension of a tuple `T` on `H` lives on `H (+) M` in the block form
//! `X_i = [[T_i, A_i], [0, B_i]]`, with `H` always the leading summand. The
//! extension is trivial (a direct sum) exactly when every `A_i` vanishes.
//! This module provides the two general ways of producing a non-trivial
//! extension when one exists -- the gap construction on
//! `(Ran T)^perp intersect Ker T` and the rescaling of a strictly
//! contractive component -- together with a randomized one-sided probe that
//! searches for rank-k extensions by solving the commutation equations, and
//! the validator every certificate must pass.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::linalg::{
    intersect, nullspace, operator_norm, CMatrix, Subspace, ToleranceConfig, SIGMA_FLOOR,
};
use crate::sampling::{random_disk_point, random_unitary};
use crate::tuples::{
    check_commuting, check_contractive, is_reducing, restrict, OperatorTuple, PredicateReport,
};

/// A-blocks with norm above this threshold make the extension non-trivial.
pub const NONTRIVIAL_TOL: f64 = 1e-10;

/// Entrywise tolerance for "the restriction of X to H equals T".
pub const RESTRICTION_TOL: f64 = 1e-12;

/// Norm bound for sampled B-tuples in the probe; strict contractivity
/// guarantees the solved A-blocks can be scaled into a contraction.
const PROBE_B_RADIUS: f64 = 0.9;

const BISECTION_STEPS: usize = 40;
const BISECTION_REL_WIDTH: f64 = 1e-12;

/// Where a certificate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    GapLemma,
    ScalingLemma,
    RankOneProbe,
    ParrottKernel,
    VaropoulosLambda,
    VaropoulosRankOne,
    Manual,
}

/// The four validator verdicts attached to a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateVerdicts {
    /// (a) the assembled tuple commutes.
    pub commuting: PredicateReport,
    /// (b) the assembled tuple is contractive.
    pub contractive: PredicateReport,
    /// (c) restricting the assembled tuple back to H reproduces the base.
    pub restriction: PredicateReport,
    /// Largest A-block norm.
    pub a_norm_max: f64,
    /// (d) the non-triviality claim: `a_norm_max > 1e-10`.
    pub nontrivial: bool,
    /// Whether the embedded copy of H reduces the assembled tuple.
    pub reducing: bool,
    /// The three triviality views agree: nontrivial iff not reducing.
    pub triviality_consistent: bool,
}

impl CertificateVerdicts {
    /// All four checks pass (non-triviality itself is reported separately).
    pub fn all_passed(&self) -> bool {
        self.commuting.passed
            && self.contractive.passed
            && self.restriction.passed
            && self.triviality_consistent
    }
}

/// A candidate extension `X_i = [[T_i, A_i], [0, B_i]]` of `base` by a
/// k-dimensional space, plus validation verdicts once computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionCertificate {
    pub base: OperatorTuple,
    pub ext_dim: usize,
    #[serde(rename = "A")]
    pub a_blocks: Vec<CMatrix>,
    #[serde(rename = "B")]
    pub b_blocks: Vec<CMatrix>,
    pub provenance: Provenance,
    pub verdicts: Option<CertificateVerdicts>,
    pub seed: Option<u64>,
}

impl ExtensionCertificate {
    pub fn new(
        base: OperatorTuple,
        a_blocks: Vec<CMatrix>,
        b_blocks: Vec<CMatrix>,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = base.n();
        let d = base.dim();
        if a_blocks.len() != n || b_blocks.len() != n {
            return Err(CoreError::TupleLenMismatch {
                left: n,
                right: a_blocks.len().min(b_blocks.len()),
            });
        }
        let k = b_blocks[0].rows();
        for (a, b) in a_blocks.iter().zip(&b_blocks) {
            if a.rows() != d || a.cols() != k || b.rows() != k || b.cols() != k {
                return Err(CoreError::invalid(
                    "extension certificate",
                    format!(
                        "blocks must be {d}x{k} and {k}x{k}, got {}x{} and {}x{}",
                        a.rows(),
                        a.cols(),
                        b.rows(),
                        b.cols()
                    ),
                ));
            }
        }
        Ok(ExtensionCertificate {
            base,
            ext_dim: k,
            a_blocks,
            b_blocks,
            provenance,
            verdicts: None,
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// The assembled extension operator `X_i`.
    pub fn assembled_op(&self, i: usize) -> CMatrix {
        let d = self.base.dim();
        let k = self.ext_dim;
        CMatrix::from_blocks(
            self.base.op(i),
            &self.a_blocks[i],
            &CMatrix::zeros(k, d),
            &self.b_blocks[i],
        )
    }

    /// The assembled extension tuple on `H (+) M`.
    pub fn assembled(&self) -> OperatorTuple {
        OperatorTuple::new((0..self.base.n()).map(|i| self.assembled_op(i)).collect())
            .expect("assembled blocks are square")
    }

    /// Largest operator norm among the A-blocks.
    pub fn max_a_norm(&self) -> f64 {
        self.a_blocks
            .iter()
            .map(operator_norm)
            .fold(0.0, f64::max)
    }

    /// The certificate claims non-triviality iff some A-block is
    /// numerically non-zero.
    pub fn claims_nontrivial(&self) -> bool {
        self.max_a_norm() > NONTRIVIAL_TOL
    }

    /// The embedded copy of H inside `H (+) M`: the leading `dim` canonical
    /// coordinates.
    pub fn embedded_base_space(&self) -> Subspace {
        let d = self.base.dim();
        let total = d + self.ext_dim;
        let basis = CMatrix::from_fn(total, d, |i, j| {
            if i == j {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        });
        Subspace::from_orthonormal(basis, &ToleranceConfig::default())
            .expect("canonical basis is orthonormal")
    }
}

/// The gap subspace `(Ran T)^perp intersect Ker T`.
pub fn gap_subspace(t: &OperatorTuple, tol: &ToleranceConfig) -> Subspace {
    let range = crate::tuples::big_range(t, tol);
    let kernel = crate::tuples::big_kernel(t, tol);
    intersect(&range.complement(tol), &kernel, tol).expect("both live on the same space")
}

/// Extension supported on the gap subspace: `X_i = [[T_i, V], [0, 0]]` with
/// `V` the inclusion of the gap. Non-trivial whenever the gap is.
pub fn extend_by_gap(t: &OperatorTuple, tol: &ToleranceConfig) -> Result<ExtensionCertificate> {
    let gap = gap_subspace(t, tol);
    if gap.is_zero() {
        return Err(CoreError::EmptyGap);
    }
    let k = gap.dim();
    let a_blocks = vec![gap.basis().clone(); t.n()];
    let b_blocks = vec![CMatrix::zeros(k, k); t.n()];
    let mut cert = ExtensionCertificate::new(t.clone(), a_blocks, b_blocks, Provenance::GapLemma)?;
    validate_certificate_in_place(&mut cert, tol);
    Ok(cert)
}

/// The scaling parameters `delta_i = min(1, (1 - ||T_i||^2) / ||T_i||)`,
/// `eta_i = 1 - delta_i`, `beta_i = 1 + delta_i^2 + eta_i^2`, with
/// `delta_i = 1` at the zero operator (the limit of the formula).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub delta: Vec<f64>,
    pub eta: Vec<f64>,
    pub beta: Vec<f64>,
}

impl ScalingParams {
    pub fn from_norms(norms: &[f64]) -> Self {
        let delta: Vec<f64> = norms
            .iter()
            .map(|&norm| {
                if norm <= SIGMA_FLOOR {
                    1.0
                } else {
                    ((1.0 - norm * norm) / norm).clamp(0.0, 1.0)
                }
            })
            .collect();
        let eta: Vec<f64> = delta.iter().map(|d| 1.0 - d).collect();
        let beta: Vec<f64> = delta
            .iter()
            .zip(&eta)
            .map(|(d, e)| 1.0 + d * d + e * e)
            .collect();
        ScalingParams { delta, eta, beta }
    }

    /// The proved bound on `||X_i||^2 / ||T_i||^2`:
    /// `(beta_i + sqrt(beta_i^2 - 4 eta_i^2)) / 2`.
    pub fn norm_bound_factor(&self, i: usize) -> f64 {
        let beta = self.beta[i];
        let eta = self.eta[i];
        0.5 * (beta + (beta * beta - 4.0 * eta * eta).max(0.0).sqrt())
    }
}

/// Rescaling extension `X_i = [[T_i, delta_i T_i], [0, eta_i T_i]]`,
/// available whenever some component is strictly contractive.
pub fn extend_by_scaling(
    t: &OperatorTuple,
    tol: &ToleranceConfig,
) -> Result<(ExtensionCertificate, ScalingParams)> {
    let norms = t.norms();
    let min_norm = norms.iter().copied().fold(f64::INFINITY, f64::min);
    if min_norm >= 1.0 - tol.eps_contr {
        return Err(CoreError::AllNormsOne);
    }
    let params = ScalingParams::from_norms(&norms);
    let a_blocks: Vec<CMatrix> = t
        .ops()
        .iter()
        .zip(&params.delta)
        .map(|(op, &d)| op.scale_re(d))
        .collect();
    let b_blocks: Vec<CMatrix> = t
        .ops()
        .iter()
        .zip(&params.eta)
        .map(|(op, &e)| op.scale_re(e))
        .collect();
    let mut cert =
        ExtensionCertificate::new(t.clone(), a_blocks, b_blocks, Provenance::ScalingLemma)?;
    validate_certificate_in_place(&mut cert, tol);
    Ok((cert, params))
}

/// Largest `eps` in (0, 1] for which every `[[T_i, eps A_i], [0, B_i]]` is a
/// contraction, found by bisection. Commutation is preserved because the
/// solved system is homogeneous in the A-blocks.
pub fn scale_into_contraction(
    base: &OperatorTuple,
    a_blocks: &[CMatrix],
    b_blocks: &[CMatrix],
) -> Option<f64> {
    let feasible = |eps: f64| -> bool {
        (0..base.n()).all(|i| {
            let k = b_blocks[i].rows();
            let x = CMatrix::from_blocks(
                base.op(i),
                &a_blocks[i].scale_re(eps),
                &CMatrix::zeros(k, base.dim()),
                &b_blocks[i],
            );
            operator_norm(&x) <= 1.0 + 1e-12
        })
    };
    if feasible(1.0) {
        return Some(1.0);
    }
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= BISECTION_REL_WIDTH * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo > 0.0 {
        Some(lo)
    } else {
        None
    }
}

/// Per-sample record of the probe's homogeneous linear system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReport {
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    /// Nullspace dimension of the solved system, one entry per examined
    /// sample (the scan stops at the first success).
    pub solution_dims: Vec<usize>,
    /// Index of the sample that produced the certificate, if any.
    pub found_at_sample: Option<usize>,
    /// Scaling factor applied to the kernel solution, if any.
    pub scale: Option<f64>,
    pub certificate: Option<ExtensionCertificate>,
}

/// Randomized one-sided probe for rank-k extensions.
///
/// For each sampled commuting, strictly contractive B-tuple (the zero tuple
/// is always sample 0), solves the homogeneous system
/// `T_i A_j + A_i B_j = T_j A_i + A_j B_i` for i < j together with the range
/// constraints `(I - P_i) A_i = 0`, `P_i` projecting onto
/// `ran(I - T_i T_i^*)`. A non-zero solution is scaled into a contraction
/// and returned as a certificate. Finding nothing proves nothing: the probe
/// is sound, not complete.
pub fn probe_with_report(
    t: &OperatorTuple,
    samples: usize,
    k: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> ProbeReport {
    assert!(k >= 1, "probe needs k >= 1");
    assert!(samples >= 1, "probe needs at least one sample");
    let n = t.n();
    let d = t.dim();
    let identity = CMatrix::identity(d);

    // Range-constraint projectors are independent of the sampled B.
    let co_projectors: Vec<CMatrix> = t
        .ops()
        .iter()
        .map(|op| {
            let defect = identity.sub(&op.mul(&op.adjoint()));
            let range = Subspace::from_spanning(&defect, tol);
            identity.sub(&range.projector())
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProbeReport {
        k,
        samples,
        seed,
        solution_dims: Vec::new(),
        found_at_sample: None,
        scale: None,
        certificate: None,
    };

    for sample in 0..samples {
        let b_blocks: Vec<CMatrix> = if sample == 0 {
            vec![CMatrix::zeros(k, k); n]
        } else {
            let q = random_unitary(k, &mut rng);
            let q_adj = q.adjoint();
            (0..n)
                .map(|_| {
                    let diag = CMatrix::from_fn(k, k, |i, j| {
                        if i == j {
                            random_disk_point(PROBE_B_RADIUS, &mut rng)
                        } else {
                            Complex64::ZERO
                        }
                    });
                    q.mul(&diag).mul(&q_adj)
                })
                .collect()
        };

        let system = assemble_probe_system(t, &b_blocks, &co_projectors, k);
        let kernel = nullspace(&system, tol);
        report.solution_dims.push(kernel.dim());
        if kernel.is_zero() {
            continue;
        }

        let solution = kernel.basis().column(0);
        let mut a_blocks: Vec<CMatrix> = (0..n)
            .map(|m| CMatrix::from_fn(d, k, |r, c| solution[m * d * k + r * k + c]))
            .collect();
        let max_norm = a_blocks.iter().map(operator_norm).fold(0.0, f64::max);
        if max_norm <= SIGMA_FLOOR {
            continue;
        }
        for a in &mut a_blocks {
            *a = a.scale_re(1.0 / max_norm);
        }

        let Some(eps) = scale_into_contraction(t, &a_blocks, &b_blocks) else {
            continue;
        };
        let scaled: Vec<CMatrix> = a_blocks.iter().map(|a| a.scale_re(eps)).collect();
        let mut cert =
            ExtensionCertificate::new(t.clone(), scaled, b_blocks, Provenance::RankOneProbe)
                .expect("probe blocks have matching shapes")
                .with_seed(seed);
        let verdicts = validate_certificate_in_place(&mut cert, tol);
        if verdicts.all_passed() && verdicts.nontrivial {
            report.found_at_sample = Some(sample);
            report.scale = Some(eps);
            report.certificate = Some(cert);
            break;
        }
    }
    report
}

/// Probe returning just the certificate (first success in sample order).
pub fn rank_one_probe(
    t: &OperatorTuple,
    samples: usize,
    k: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Option<ExtensionCertificate> {
    probe_with_report(t, samples, k, seed, tol).certificate
}

fn assemble_probe_system(
    t: &OperatorTuple,
    b_blocks: &[CMatrix],
    co_projectors: &[CMatrix],
    k: usize,
) -> CMatrix {
    let n = t.n();
    let d = t.dim();
    let unknowns = n * d * k;
    let pair_rows = n * (n - 1) / 2 * d * k;
    let range_rows = n * d * k;
    let mut system = CMatrix::zeros(pair_rows + range_rows, unknowns);
    let at = |m: usize, r: usize, c: usize| m * d * k + r * k + c;

    let mut row = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            for r in 0..d {
                for c in 0..k {
                    for s in 0..d {
                        // T_i A_j - T_j A_i
                        system[(row, at(j, s, c))] += t.op(i)[(r, s)];
                        system[(row, at(i, s, c))] -= t.op(j)[(r, s)];
                    }
                    for s in 0..k {
                        // A_i B_j - A_j B_i
                        system[(row, at(i, r, s))] += b_blocks[j][(s, c)];
                        system[(row, at(j, r, s))] -= b_blocks[i][(s, c)];
                    }
                    row += 1;
                }
            }
        }
    }
    for i in 0..n {
        for r in 0..d {
            for c in 0..k {
                for s in 0..d {
                    system[(row, at(i, s, c))] += co_projectors[i][(r, s)];
                }
                row += 1;
            }
        }
    }
    debug_assert_eq!(row, pair_rows + range_rows);
    system
}

/// Run all four validator checks and attach the verdicts to the
/// certificate. Returns a copy of the verdicts.
pub fn validate_certificate_in_place(
    cert: &mut ExtensionCertificate,
    tol: &ToleranceConfig,
) -> CertificateVerdicts {
    let verdicts = validate_certificate(&cert.base, cert, tol);
    cert.verdicts = Some(verdicts.clone());
    verdicts
}

/// The four checks a certificate must pass: the assembled tuple commutes,
/// is contractive, restricts back to the base tuple on the embedded copy of
/// H, and its triviality is reported consistently by the A-block norms and
/// the reducing-subspace test.
pub fn validate_certificate(
    base: &OperatorTuple,
    cert: &ExtensionCertificate,
    tol: &ToleranceConfig,
) -> CertificateVerdicts {
    let assembled = cert.assembled();
    let commuting = check_commuting(&assembled, tol);
    let contractive = check_contractive(&assembled, tol);

    let embedded = cert.embedded_base_space();
    let restriction = match restrict(&assembled, &embedded, tol) {
        Ok(restricted) => {
            let worst = (0..base.n())
                .map(|i| restricted.op(i).sub(base.op(i)).max_abs())
                .fold(0.0, f64::max);
            PredicateReport {
                passed: worst <= RESTRICTION_TOL,
                worst_value: worst,
                worst_pair: None,
            }
        }
        Err(CoreError::InvarianceViolation { index, residual }) => PredicateReport {
            passed: false,
            worst_value: residual,
            worst_pair: Some((index, index)),
        },
        Err(_) => PredicateReport {
            passed: false,
            worst_value: f64::INFINITY,
            worst_pair: None,
        },
    };

    let a_norm_max = cert.max_a_norm();
    let nontrivial = a_norm_max > NONTRIVIAL_TOL;
    let reducing = is_reducing(&assembled, &embedded, tol);
    CertificateVerdicts {
        commuting,
        contractive,
        restriction,
        a_norm_max,
        nontrivial,
        reducing,
        triviality_consistent: nontrivial == !reducing,
    }
}

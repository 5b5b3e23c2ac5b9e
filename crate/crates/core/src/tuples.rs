//! Tuples of operators on a common finite-dimensional Hilbert space, and
//! the predicates that decide membership in the class of commuting
//! contractions: commutation, contractivity, partial isometry, joint range
//! and kernel, direct sums, restrictions and the reducing-subspace test.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoreError, Result};
use crate::linalg::{intersect, nullspace, operator_norm, span_union, CMatrix, Subspace, ToleranceConfig};

/// Residual bound for the partial-isometry predicate `T T^* T = T`.
pub const PARTIAL_ISOMETRY_TOL: f64 = 1e-10;

/// An n-tuple of d x d complex matrices acting on the same space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTuple {
    ops: Vec<CMatrix>,
}

impl OperatorTuple {
    /// Wrap a list of operators, validating squareness and equal dimensions.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| CoreError::invalid("operator tuple", "needs at least one operator"))?;
        if !first.is_square() || first.rows() == 0 {
            return Err(CoreError::invalid(
                "operator tuple",
                "operators must be square with dimension at least 1",
            ));
        }
        let dim = first.rows();
        for (i, op) in ops.iter().enumerate() {
            if !op.is_square() || op.rows() != dim {
                return Err(CoreError::DimMismatch {
                    context: "operator tuple",
                    expected: dim,
                    got: op.rows().max(op.cols()),
                });
            }
            op.check_finite().map_err(|_| {
                CoreError::invalid("operator tuple", format!("operator {i} has non-finite entries"))
            })?;
        }
        Ok(OperatorTuple { ops })
    }

    /// Number of operators.
    pub fn n(&self) -> usize {
        self.ops.len()
    }

    /// Dimension of the underlying space.
    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn op(&self, i: usize) -> &CMatrix {
        &self.ops[i]
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// Operator norms of all components.
    pub fn norms(&self) -> Vec<f64> {
        self.ops.iter().map(operator_norm).collect()
    }
}

/// Outcome of a tolerance-based predicate: the worst residual observed, the
/// pair (or repeated index) that attains it, and whether it passed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateReport {
    pub passed: bool,
    pub worst_value: f64,
    pub worst_pair: Option<(usize, usize)>,
}

impl PredicateReport {
    fn from_worst(worst: Option<(f64, (usize, usize))>, tolerance: f64) -> Self {
        match worst {
            Some((value, pair)) => PredicateReport {
                passed: value <= tolerance,
                worst_value: value,
                worst_pair: Some(pair),
            },
            None => PredicateReport {
                passed: true,
                worst_value: 0.0,
                worst_pair: None,
            },
        }
    }
}

/// Largest commutator norm over all pairs; passes iff within `eps_comm`.
pub fn check_commuting(t: &OperatorTuple, tol: &ToleranceConfig) -> PredicateReport {
    let mut worst: Option<(f64, (usize, usize))> = None;
    for i in 0..t.n() {
        for j in (i + 1)..t.n() {
            let residual = operator_norm(&t.op(i).commutator(t.op(j)));
            if worst.is_none_or(|(w, _)| residual > w) {
                worst = Some((residual, (i, j)));
            }
        }
    }
    PredicateReport::from_worst(worst, tol.eps_comm)
}

/// Largest excess of an operator norm over 1; passes iff within `eps_contr`.
/// The worst value is signed, so a strictly contractive tuple reports a
/// negative figure.
pub fn check_contractive(t: &OperatorTuple, tol: &ToleranceConfig) -> PredicateReport {
    let mut worst: Option<(f64, (usize, usize))> = None;
    for (i, norm) in t.norms().iter().enumerate() {
        let excess = norm - 1.0;
        if worst.is_none_or(|(w, _)| excess > w) {
            worst = Some((excess, (i, i)));
        }
    }
    PredicateReport::from_worst(worst, tol.eps_contr)
}

/// Partial-isometry check: residual of `T_i T_i^* T_i - T_i` per component.
pub fn check_partial_isometries(t: &OperatorTuple) -> PredicateReport {
    let mut worst: Option<(f64, (usize, usize))> = None;
    for i in 0..t.n() {
        let op = t.op(i);
        let residual = operator_norm(&op.mul(&op.adjoint()).mul(op).sub(op));
        if worst.is_none_or(|(w, _)| residual > w) {
            worst = Some((residual, (i, i)));
        }
    }
    PredicateReport::from_worst(worst, PARTIAL_ISOMETRY_TOL)
}

/// Joint range `Ran T`: the closed span of the component ranges.
pub fn big_range(t: &OperatorTuple, tol: &ToleranceConfig) -> Subspace {
    let column_spaces: Vec<Subspace> = t
        .ops()
        .iter()
        .map(|op| Subspace::from_spanning(op, tol))
        .collect();
    span_union(&column_spaces, tol).expect("components share one ambient space")
}

/// Joint kernel `Ker T`: the intersection of the component kernels.
pub fn big_kernel(t: &OperatorTuple, tol: &ToleranceConfig) -> Subspace {
    let mut kernel = nullspace(t.op(0), tol);
    for op in &t.ops()[1..] {
        kernel = intersect(&kernel, &nullspace(op, tol), tol)
            .expect("components share one ambient space");
    }
    kernel
}

/// Blockwise diagonal direct sum of two tuples with the same length.
pub fn direct_sum(t: &OperatorTuple, s: &OperatorTuple) -> Result<OperatorTuple> {
    if t.n() != s.n() {
        return Err(CoreError::TupleLenMismatch {
            left: t.n(),
            right: s.n(),
        });
    }
    let ops = t
        .ops()
        .iter()
        .zip(s.ops())
        .map(|(a, b)| {
            CMatrix::from_blocks(
                a,
                &CMatrix::zeros(a.rows(), b.cols()),
                &CMatrix::zeros(b.rows(), a.cols()),
                b,
            )
        })
        .collect();
    OperatorTuple::new(ops)
}

/// Compression of `t` to an invariant subspace, which equals the restriction
/// because the subspace is invariant. Fails with the offending component and
/// residual when invariance does not hold within `eps_comm`.
pub fn restrict(t: &OperatorTuple, s: &Subspace, tol: &ToleranceConfig) -> Result<OperatorTuple> {
    if s.ambient_dim() != t.dim() {
        return Err(CoreError::AmbientMismatch {
            left: s.ambient_dim(),
            right: t.dim(),
        });
    }
    if s.is_zero() {
        return Err(CoreError::EmptySubspace);
    }
    let identity = CMatrix::identity(t.dim());
    let projector = s.projector();
    let co_projector = identity.sub(&projector);
    for (i, op) in t.ops().iter().enumerate() {
        let residual = operator_norm(&co_projector.mul(&op.mul(&projector)));
        if residual > tol.eps_comm {
            return Err(CoreError::InvarianceViolation { index: i, residual });
        }
    }
    let basis = s.basis();
    let ops = t
        .ops()
        .iter()
        .map(|op| basis.adjoint().mul(&op.mul(basis)))
        .collect();
    OperatorTuple::new(ops)
}

/// A subspace reduces the tuple iff it and its complement are both invariant.
pub fn is_reducing(t: &OperatorTuple, s: &Subspace, tol: &ToleranceConfig) -> bool {
    if s.ambient_dim() != t.dim() {
        return false;
    }
    let identity = CMatrix::identity(t.dim());
    let projector = s.projector();
    let co_projector = identity.sub(&projector);
    t.ops().iter().all(|op| {
        let out = operator_norm(&co_projector.mul(&op.mul(&projector)));
        let into = operator_norm(&projector.mul(&op.mul(&co_projector)));
        out <= tol.eps_comm && into <= tol.eps_comm
    })
}

// Wire format: {"n": ..., "dim": ..., "ops": [...]} with redundant counts
// validated on the way in.
#[derive(Serialize, Deserialize)]
struct TupleWire {
    n: usize,
    dim: usize,
    ops: Vec<CMatrix>,
}

impl Serialize for OperatorTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TupleWire {
            n: self.n(),
            dim: self.dim(),
            ops: self.ops.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OperatorTuple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = TupleWire::deserialize(deserializer)?;
        let tuple = OperatorTuple::new(wire.ops).map_err(D::Error::custom)?;
        if tuple.n() != wire.n || tuple.dim() != wire.dim {
            return Err(D::Error::custom(format!(
                "declared n={}, dim={} but operators give n={}, dim={}",
                wire.n,
                wire.dim,
                tuple.n(),
                tuple.dim()
            )));
        }
        Ok(tuple)
    }
}

//! The Crabb-Davie triple: three fixed 8x8 commuting partial isometries
//! with integer entries. The triple is extremal, and it violates the von
//! Neumann inequality, which makes it the crate's main stress case.
//!
//! The matrices are built from explicit literal tables so every structural
//! identity (commutators, `T_i T_i^* T_i = T_i`, the diagonal of
//! `T_i T_i^*`) holds exactly in floating point: all intermediate products
//! are small integers.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::extensions::{probe_with_report, ProbeReport};
use crate::linalg::{CMatrix, ToleranceConfig};
use crate::tuples::OperatorTuple;

/// Column-to-row feed pattern of the three 8x8 matrices. Each T_i has
/// exactly five entries, all +-1: column 1 feeds rows 2-4, columns 2-4 feed
/// rows 5-7 through a signed pattern, columns 5-7 feed row 8.
const T1: [[i32; 8]; 8] = [
    [0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, -1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0],
];

const T2: [[i32; 8]; 8] = [
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, -1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0],
];

const T3: [[i32; 8]; 8] = [
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, -1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0],
];

/// The fixed triple, wrapped so its provenance is explicit in signatures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrabbDavieTriple {
    pub tuple: OperatorTuple,
}

/// Build the triple from the literal integer tables.
pub fn build_crabb_davie() -> CrabbDavieTriple {
    let to_matrix = |table: &[[i32; 8]; 8]| {
        let rows: Vec<&[i32]> = table.iter().map(|r| r.as_slice()).collect();
        CMatrix::from_int_rows(&rows)
    };
    CrabbDavieTriple {
        tuple: OperatorTuple::new(vec![to_matrix(&T1), to_matrix(&T2), to_matrix(&T3)])
            .expect("literal 8x8 matrices"),
    }
}

/// Exact structural facts about the triple, all computed in integer-valued
/// floating point so the residuals are genuinely zero, not merely small.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructuralReport {
    /// Largest absolute entry over all commutators `T_i T_j - T_j T_i`.
    pub max_commutator_entry: f64,
    /// Largest absolute entry over all `T_i T_i^* T_i - T_i`.
    pub max_partial_isometry_defect: f64,
    /// Largest deviation of `T_i T_i^*` from the expected diagonal
    /// `diag(0, d_{i1}, d_{i2}, d_{i3}, 1, 1, 1, 1)`.
    pub max_diag_identity_defect: f64,
    /// Each matrix has exactly five non-zero entries, all +-1.
    pub entry_pattern_ok: bool,
    pub exact: bool,
}

/// Verify the structural identities exactly.
pub fn structural_report(triple: &CrabbDavieTriple) -> StructuralReport {
    let t = &triple.tuple;
    let mut max_comm = 0.0_f64;
    for i in 0..3 {
        for j in (i + 1)..3 {
            max_comm = max_comm.max(t.op(i).commutator(t.op(j)).max_abs());
        }
    }

    let mut max_pi = 0.0_f64;
    let mut max_diag = 0.0_f64;
    let mut pattern_ok = true;
    for i in 0..3 {
        let op = t.op(i);
        let tta = op.mul(&op.adjoint());
        max_pi = max_pi.max(tta.mul(op).sub(op).max_abs());

        let expected = CMatrix::diagonal(&[
            0.0,
            if i == 0 { 1.0 } else { 0.0 },
            if i == 1 { 1.0 } else { 0.0 },
            if i == 2 { 1.0 } else { 0.0 },
            1.0,
            1.0,
            1.0,
            1.0,
        ]);
        max_diag = max_diag.max(tta.sub(&expected).max_abs());

        let mut nonzero = 0;
        for entry in op.entries() {
            if entry.im != 0.0 {
                pattern_ok = false;
            }
            if entry.re != 0.0 {
                nonzero += 1;
                if entry.re.abs() != 1.0 {
                    pattern_ok = false;
                }
            }
        }
        if nonzero != 5 {
            pattern_ok = false;
        }
    }

    StructuralReport {
        max_commutator_entry: max_comm,
        max_partial_isometry_defect: max_pi,
        max_diag_identity_defect: max_diag,
        entry_pattern_ok: pattern_ok,
        exact: max_comm == 0.0 && max_pi == 0.0 && max_diag == 0.0 && pattern_ok,
    }
}

/// Numerical extremality evidence from the rank-k probe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtensionEvidence {
    pub probe: ProbeReport,
    /// "consistent with extremal" when every sampled system had only the
    /// zero solution; this is one-sided evidence, not a proof.
    pub verdict: String,
}

/// Run the rank-k probe against the triple and summarize the solution-space
/// dimensions. `k` must be 1, 2 or 3.
pub fn cd_extension_evidence(
    k: usize,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<ExtensionEvidence> {
    if !(1..=3).contains(&k) {
        return Err(CoreError::invalid(
            "probe dimension",
            format!("k must be 1, 2 or 3, got {k}"),
        ));
    }
    let triple = build_crabb_davie();
    let probe = probe_with_report(&triple.tuple, samples, k, seed, tol);
    let verdict = if probe.certificate.is_none() && probe.solution_dims.iter().all(|&d| d == 0) {
        "consistent with extremal".to_string()
    } else {
        "non-extremality certificate found".to_string()
    };
    Ok(ExtensionEvidence { probe, verdict })
}

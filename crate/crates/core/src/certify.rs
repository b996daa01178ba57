//! Increasing-principal-minor certification.
//!
//! A nonzero PSD matrix `A` has `det A[I] ≤ det A[J]` for all `I ⊂ J` exactly
//! when `A` is positive definite and every diagonal entry of `A⁻¹` is at most
//! one. [`certify_increasing`] decides this in `O(m³)`; [`brute_force_increasing`]
//! enumerates all subsets and serves as the oracle. The empty set takes part
//! with `det A[∅] = 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    inverse_from_factor, ldl_factor, ldl_factor_with_threshold, Definiteness, HermitianMatrix,
    IndexSet, PIVOT_RELATIVE_THRESHOLD,
};
use crate::minors::{lex_ordered_masks, lex_ranks, MinorTable, EXHAUSTIVE_MAX_DIM};
use crate::registry::Registry;

/// `b_ii ≤ 1 + DIAGONAL_TOLERANCE` passes.
pub const DIAGONAL_TOLERANCE: f64 = 1e-9;
/// The oracle reports `det A[I] > det A[J]` only beyond
/// `det A[J]·(1 + VIOLATION_RELATIVE) + VIOLATION_ABSOLUTE`.
pub const VIOLATION_RELATIVE: f64 = 1e-9;
pub const VIOLATION_ABSOLUTE: f64 = 1e-12;
/// Diagonal entries of `A⁻¹` this close (relatively) to the maximum count as tied.
const ARGMAX_TIE_RELATIVE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Increasing,
    NotIncreasing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reason {
    DiagOk,
    NotPositiveDefinite,
    DiagonalExceedsOne,
    /// Brute force found a subset whose minor exceeds a superset's.
    MinorDecreases,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    InverseDiagonal,
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub reason: Reason,
    /// `b_00 … b_{m−1,m−1}` of `B = A⁻¹`, present when `A` is positive definite.
    pub inverse_diagonal: Option<Vec<f64>>,
    /// Smallest `i` with `b_ii > 1`.
    pub offending_index: Option<usize>,
    pub method: Method,
    /// `(I, J)` with `I ⊂ J` and `det A[I] > det A[J]`, from brute force only.
    pub witness_pair: Option<(IndexSet, IndexSet)>,
    /// Set for `m = 1`, where the criterion `a ≥ 1 ⇔ 1/a ≤ 1` is applied by extension.
    pub single_index_extension: bool,
}

impl Certificate {
    pub fn is_increasing(&self) -> bool {
        self.verdict == Verdict::Increasing
    }

    pub fn max_inverse_diagonal(&self) -> Option<f64> {
        self.inverse_diagonal
            .as_ref()
            .map(|d| d.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }
}

pub fn certify_increasing(a: &HermitianMatrix) -> Result<Certificate> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let single_index_extension = a.dim() == 1;
    let factor = ldl_factor(a);
    if !factor.is_positive_definite() {
        return Ok(Certificate {
            verdict: Verdict::NotIncreasing,
            reason: Reason::NotPositiveDefinite,
            inverse_diagonal: None,
            offending_index: None,
            method: Method::InverseDiagonal,
            witness_pair: None,
            single_index_extension,
        });
    }
    let diag = inverse_from_factor(&factor).diagonal_entries();
    let offending_index = diag.iter().position(|&b| b > 1.0 + DIAGONAL_TOLERANCE);
    let (verdict, reason) = match offending_index {
        None => (Verdict::Increasing, Reason::DiagOk),
        Some(_) => (Verdict::NotIncreasing, Reason::DiagonalExceedsOne),
    };
    Ok(Certificate {
        verdict,
        reason,
        inverse_diagonal: Some(diag),
        offending_index,
        method: Method::InverseDiagonal,
        witness_pair: None,
        single_index_extension,
    })
}

#[inline]
fn strictly_decreases(smaller: f64, larger: f64) -> bool {
    smaller > larger * (1.0 + VIOLATION_RELATIVE) + VIOLATION_ABSOLUTE
}

fn brute_force_certificate(m: usize, witness: Option<(u64, u64)>) -> Certificate {
    let (verdict, reason) = match witness {
        None => (Verdict::Increasing, Reason::DiagOk),
        Some(_) => (Verdict::NotIncreasing, Reason::MinorDecreases),
    };
    Certificate {
        verdict,
        reason,
        inverse_diagonal: None,
        offending_index: None,
        method: Method::BruteForce,
        witness_pair: witness.map(|(i, j)| (IndexSet::from_mask(i), IndexSet::from_mask(j))),
        single_index_extension: m == 1,
    }
}

/// Checks `det A[I] ≤ det A[I ∪ {j}]` for every `I` (including `∅`) and `j ∉ I`.
/// The first violation in lexicographic order of `I`, then `j`, is the witness.
pub fn brute_force_increasing(a: &HermitianMatrix) -> Result<Certificate> {
    let table = MinorTable::new(a)?;
    let m = table.dim();
    let mut witness = None;
    'outer: for i in lex_ordered_masks(m) {
        for j in 0..m {
            let bit = 1u64 << j;
            if i & bit == 0 && strictly_decreases(table.value(i), table.value(i | bit)) {
                witness = Some((i, i | bit));
                break 'outer;
            }
        }
    }
    Ok(brute_force_certificate(m, witness))
}

/// Like [`brute_force_increasing`] but compares every nested pair `I ⊊ J`,
/// not just single-element extensions. `O(3^m)`.
pub fn full_pair_increasing(a: &HermitianMatrix) -> Result<Certificate> {
    let table = MinorTable::new(a)?;
    let m = table.dim();
    let full = (1u64 << m) - 1;
    let rank = lex_ranks(m);
    let mut witness: Option<(u64, u64)> = None;
    for i in lex_ordered_masks(m) {
        let rest = full ^ i;
        // proper nonempty supersets: i | s for nonempty s ⊆ rest
        let mut s = rest;
        while s != 0 {
            let j = i | s;
            if strictly_decreases(table.value(i), table.value(j)) {
                let better = match witness {
                    None => true,
                    Some((_, wj)) => rank[j as usize] < rank[wj as usize],
                };
                if better {
                    witness = Some((i, j));
                }
            }
            s = (s - 1) & rest;
        }
        if witness.is_some() {
            break;
        }
    }
    Ok(brute_force_certificate(m, witness))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingThreshold {
    /// Smallest `t` for which `t·A` has increasing principal minors.
    pub t_star: f64,
    pub argmax_index: usize,
}

/// `t* = max_i (A⁻¹)_ii`. Ties (within relative 1e−12) go to the smallest index.
pub fn scaling_threshold(a: &HermitianMatrix) -> Result<ScalingThreshold> {
    let factor = ldl_factor(a);
    if !factor.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let diag = inverse_from_factor(&factor).diagonal_entries();
    let t_star = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax_index = diag
        .iter()
        .position(|&b| b >= t_star * (1.0 - ARGMAX_TIE_RELATIVE))
        .unwrap_or(0);
    Ok(ScalingThreshold {
        t_star,
        argmax_index,
    })
}

/// True iff every eigenvalue of `A` is at least one, decided by factoring `A − I`
/// with the pivot threshold of `A`.
pub fn eigenvalue_sufficient(a: &HermitianMatrix) -> bool {
    let threshold = PIVOT_RELATIVE_THRESHOLD * a.dim() as f64 * a.max_abs_diagonal();
    ldl_factor_with_threshold(&a.shifted(1.0), threshold).verdict() != Definiteness::Indefinite
}

pub trait Certifier: Send + Sync {
    fn name(&self) -> &'static str;
    fn certify(&self, a: &HermitianMatrix) -> Result<Certificate>;
    /// Largest dimension the method accepts, if bounded.
    fn max_dim(&self) -> Option<usize> {
        None
    }
}

pub struct InverseDiagonal;
pub struct BruteForce;

impl Certifier for InverseDiagonal {
    fn name(&self) -> &'static str {
        "inverse-diagonal"
    }
    fn certify(&self, a: &HermitianMatrix) -> Result<Certificate> {
        certify_increasing(a)
    }
}

impl Certifier for BruteForce {
    fn name(&self) -> &'static str {
        "brute-force"
    }
    fn certify(&self, a: &HermitianMatrix) -> Result<Certificate> {
        brute_force_increasing(a)
    }
    fn max_dim(&self) -> Option<usize> {
        Some(EXHAUSTIVE_MAX_DIM)
    }
}

pub fn certifiers() -> Registry<dyn Certifier> {
    let mut r: Registry<dyn Certifier> = Registry::new("certification method");
    r.register("inverse-diagonal", Box::new(InverseDiagonal));
    r.register("brute-force", Box::new(BruteForce));
    r
}

//! Principal minors, the log-determinant set function `w(I) = ln det A[I]`,
//! and exhaustive checkers for the determinantal inequalities that hold on
//! positive semidefinite matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inverse, log_determinant, principal_submatrix, Determinant, HermitianMatrix, IndexSet};
use crate::registry::Registry;

/// Largest dimension accepted by the exhaustive (2^m subset) checkers.
pub const EXHAUSTIVE_MAX_DIM: usize = 12;

/// Log-space slack for the inequality checkers.
pub const LOG_TOLERANCE: f64 = 1e-9;
pub const VALUE_RELATIVE_TOLERANCE: f64 = 1e-9;
pub const VALUE_ABSOLUTE_TOLERANCE: f64 = 1e-12;
pub const SYLVESTER_TOLERANCE: f64 = 1e-8;

const EMPTY_MINOR: Determinant = Determinant {
    value: 1.0,
    log_abs: 0.0,
    sign: 1,
};

pub fn principal_minor(a: &HermitianMatrix, set: &IndexSet) -> Result<f64> {
    Ok(principal_minor_det(a, set)?.value)
}

/// `det A[I]` with its log; `det A[∅] = 1`.
pub fn principal_minor_det(a: &HermitianMatrix, set: &IndexSet) -> Result<Determinant> {
    set.check_range(a.dim())?;
    if set.is_empty() {
        return Ok(EMPTY_MINOR);
    }
    Ok(log_determinant(&principal_submatrix(a, set)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetFunctionValue {
    pub subset: IndexSet,
    pub minor: f64,
    /// `ln det A[I]`, or `None` for a zero (or negative) minor where the log is `-inf`.
    pub log_minor: Option<f64>,
}

impl SetFunctionValue {
    /// The log with `-inf` for a vanishing minor.
    pub fn log_or_neg_inf(&self) -> f64 {
        self.log_minor.unwrap_or(f64::NEG_INFINITY)
    }
}

pub fn log_det_set_function(a: &HermitianMatrix, set: &IndexSet) -> Result<SetFunctionValue> {
    let det = principal_minor_det(a, set)?;
    Ok(SetFunctionValue {
        subset: set.clone(),
        minor: det.value,
        log_minor: (det.sign > 0).then_some(det.log_abs),
    })
}

/// Every principal minor of a small matrix, indexed by subset bitmask.
#[derive(Clone, Debug)]
pub struct MinorTable {
    m: usize,
    minors: Vec<Determinant>,
}

impl MinorTable {
    pub fn new(a: &HermitianMatrix) -> Result<Self> {
        let m = a.dim();
        if m > EXHAUSTIVE_MAX_DIM {
            return Err(Error::DimensionTooLarge {
                m,
                limit: EXHAUSTIVE_MAX_DIM,
            });
        }
        let minors = (0..1u64 << m)
            .map(|mask| principal_minor_det(a, &IndexSet::from_mask(mask)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { m, minors })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, mask: u64) -> Determinant {
        self.minors[mask as usize]
    }

    pub fn value(&self, mask: u64) -> f64 {
        self.minors[mask as usize].value
    }
}

/// Rank of every mask in the lexicographic order of its index sequence.
pub(crate) fn lex_ranks(m: usize) -> Vec<u32> {
    let mut masks: Vec<u64> = (0..1u64 << m).collect();
    masks.sort_by_key(|&mask| IndexSet::from_mask(mask));
    let mut rank = vec![0u32; masks.len()];
    for (r, &mask) in masks.iter().enumerate() {
        rank[mask as usize] = r as u32;
    }
    rank
}

/// Masks listed in lexicographic order of their index sequences.
pub(crate) fn lex_ordered_masks(m: usize) -> Vec<u64> {
    let mut masks: Vec<u64> = (0..1u64 << m).collect();
    masks.sort_by_key(|&mask| IndexSet::from_mask(mask));
    masks
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub holds: bool,
    /// Largest `ln LHS − ln RHS` over all instances. `+inf` marks a positive
    /// left side against a vanishing right side; `-inf` a vanishing left side.
    #[serde(serialize_with = "crate::serde_util::real_or_tag")]
    pub worst_violation: f64,
    pub witness: Option<(IndexSet, IndexSet)>,
    pub instances: u64,
    /// Instances decided in value space because some minor vanished.
    pub value_space_instances: u64,
}

fn is_positive(d: &Determinant) -> bool {
    d.sign > 0 && d.value > 0.0
}

/// `lhs[0]·lhs[1] ≤ rhs[0]·rhs[1]`, measured in log space.
fn product_violation(lhs: [Determinant; 2], rhs: [Determinant; 2]) -> (f64, bool) {
    if lhs.iter().chain(rhs.iter()).all(is_positive) {
        let v = (lhs[0].log_abs + lhs[1].log_abs) - (rhs[0].log_abs + rhs[1].log_abs);
        return (v, false);
    }
    let l = lhs[0].value * lhs[1].value;
    let r = rhs[0].value * rhs[1].value;
    let v = if l <= r * (1.0 + VALUE_RELATIVE_TOLERANCE) + VALUE_ABSOLUTE_TOLERANCE {
        if l <= 0.0 && r > 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    } else {
        f64::INFINITY
    };
    (v, true)
}

struct WorstTracker {
    worst: f64,
    key: (u32, u32),
    pair: Option<(u64, u64)>,
    instances: u64,
    value_space: u64,
}

impl WorstTracker {
    fn new() -> Self {
        Self {
            worst: f64::NEG_INFINITY,
            key: (u32::MAX, u32::MAX),
            pair: None,
            instances: 0,
            value_space: 0,
        }
    }

    fn offer(&mut self, v: f64, value_space: bool, key: (u32, u32), pair: (u64, u64)) {
        self.instances += 1;
        self.value_space += u64::from(value_space);
        if self.pair.is_none() || v > self.worst || (v == self.worst && key < self.key) {
            self.worst = v;
            self.key = key;
            self.pair = Some(pair);
        }
    }

    fn finish(self) -> InequalityReport {
        InequalityReport {
            holds: self.worst <= LOG_TOLERANCE,
            worst_violation: self.worst,
            witness: self
                .pair
                .map(|(i, j)| (IndexSet::from_mask(i), IndexSet::from_mask(j))),
            instances: self.instances,
            value_space_instances: self.value_space,
        }
    }
}

/// `det A[I∪J]·det A[I∩J] ≤ det A[I]·det A[J]` over every pair of subsets.
pub fn check_submodularity(a: &HermitianMatrix) -> Result<InequalityReport> {
    let table = MinorTable::new(a)?;
    Ok(submodularity_from_table(&table))
}

pub fn submodularity_from_table(table: &MinorTable) -> InequalityReport {
    let n = 1u64 << table.dim();
    let rank = lex_ranks(table.dim());
    let mut tracker = WorstTracker::new();
    for i in 0..n {
        for j in i..n {
            let (v, value_space) = product_violation(
                [table.get(i | j), table.get(i & j)],
                [table.get(i), table.get(j)],
            );
            // the inequality is symmetric; report the lexicographically smaller orientation
            let (ri, rj) = (rank[i as usize], rank[j as usize]);
            let (key, pair) = if ri <= rj {
                ((ri, rj), (i, j))
            } else {
                ((rj, ri), (j, i))
            };
            tracker.offer(v, value_space, key, pair);
        }
    }
    tracker.finish()
}

/// `det A[I ∪ {j}] ≤ a_jj·det A[I]` for every `I` and `j ∉ I`. The witness is `(I, {j})`.
pub fn check_hadamard_fischer(a: &HermitianMatrix) -> Result<InequalityReport> {
    let table = MinorTable::new(a)?;
    let n = 1u64 << table.dim();
    let rank = lex_ranks(table.dim());
    let mut tracker = WorstTracker::new();
    for i in 0..n {
        for j in 0..table.dim() {
            let bit = 1u64 << j;
            if i & bit != 0 {
                continue;
            }
            let (v, value_space) =
                product_violation([table.get(i | bit), EMPTY_MINOR], [table.get(i), table.get(bit)]);
            tracker.offer(
                v,
                value_space,
                (rank[i as usize], rank[bit as usize]),
                (i, bit),
            );
        }
    }
    Ok(tracker.finish())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SylvesterReport {
    pub max_residual: f64,
    /// The `I` attaining the maximum.
    pub worst_subset: Option<IndexSet>,
    pub holds: bool,
}

/// Largest `|det B[[m]∖I] − det A[I]/det A| / (1 + det A[I]/det A)` over proper
/// nonempty `I`, with `B = A⁻¹`.
pub fn check_sylvester(a: &HermitianMatrix) -> Result<SylvesterReport> {
    let m = a.dim();
    if m > EXHAUSTIVE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            m,
            limit: EXHAUSTIVE_MAX_DIM,
        });
    }
    let b = inverse(a)?;
    let ta = MinorTable::new(a)?;
    let tb = MinorTable::new(&b)?;
    let full = (1u64 << m) - 1;
    let log_det_a = ta.get(full).log_abs;
    let mut max_residual = 0.0f64;
    let mut worst_subset = None;
    for mask in lex_ordered_masks(m) {
        if mask == 0 || mask == full {
            continue;
        }
        let ratio = (ta.get(mask).log_abs - log_det_a).exp();
        let r = (tb.value(full ^ mask) - ratio).abs() / (1.0 + ratio);
        if worst_subset.is_none() || r > max_residual {
            max_residual = r;
            worst_subset = Some(IndexSet::from_mask(mask));
        }
    }
    Ok(SylvesterReport {
        max_residual,
        worst_subset,
        holds: max_residual <= SYLVESTER_TOLERANCE,
    })
}

/// Uniform view of any named property check, as selected from the command line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: &'static str,
    pub holds: bool,
    /// Worst log-space violation for inequalities, max residual for identities.
    #[serde(serialize_with = "crate::serde_util::real_or_tag")]
    pub statistic: f64,
    pub tolerance: f64,
    pub witness: Vec<IndexSet>,
    /// Set when the check could not run on this input (e.g. not positive definite).
    pub note: Option<String>,
}

pub trait PropertyCheck: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, a: &HermitianMatrix) -> Result<PropertyReport>;
}

impl PropertyReport {
    fn from_inequality(property: &'static str, r: InequalityReport) -> Self {
        Self {
            property,
            holds: r.holds,
            statistic: r.worst_violation,
            tolerance: LOG_TOLERANCE,
            witness: r.witness.map(|(i, j)| vec![i, j]).unwrap_or_default(),
            note: None,
        }
    }
}

pub struct Submodularity;
pub struct HadamardFischer;
pub struct Sylvester;

impl PropertyCheck for Submodularity {
    fn name(&self) -> &'static str {
        "submodularity"
    }
    fn run(&self, a: &HermitianMatrix) -> Result<PropertyReport> {
        check_submodularity(a).map(|r| PropertyReport::from_inequality(self.name(), r))
    }
}

impl PropertyCheck for HadamardFischer {
    fn name(&self) -> &'static str {
        "hadamard-fischer"
    }
    fn run(&self, a: &HermitianMatrix) -> Result<PropertyReport> {
        check_hadamard_fischer(a).map(|r| PropertyReport::from_inequality(self.name(), r))
    }
}

impl PropertyCheck for Sylvester {
    fn name(&self) -> &'static str {
        "sylvester"
    }
    fn run(&self, a: &HermitianMatrix) -> Result<PropertyReport> {
        match check_sylvester(a) {
            Ok(r) => Ok(PropertyReport {
                property: self.name(),
                holds: r.holds,
                statistic: r.max_residual,
                tolerance: SYLVESTER_TOLERANCE,
                witness: r.worst_subset.into_iter().collect(),
                note: None,
            }),
            Err(Error::NotPositiveDefinite) => Ok(PropertyReport {
                property: self.name(),
                holds: false,
                statistic: f64::NAN,
                tolerance: SYLVESTER_TOLERANCE,
                witness: Vec::new(),
                note: Some("not positive definite".into()),
            }),
            Err(e) => Err(e),
        }
    }
}

pub fn property_checks() -> Registry<dyn PropertyCheck> {
    let mut r: Registry<dyn PropertyCheck> = Registry::new("property");
    r.register("submodularity", Box::new(Submodularity));
    r.register("hadamard-fischer", Box::new(HadamardFischer));
    r.register("sylvester", Box::new(Sylvester));
    r
}

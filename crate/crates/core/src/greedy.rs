//! Cardinality-constrained maximization of `w(I) = ln det A[I]`.
//!
//! [`greedy_maxdet`] runs forward greedy from `∅`, adding at each step the
//! index with the largest marginal gain `w(I ∪ {j}) − w(I)`. Gain evaluation
//! is pluggable through [`GreedyStrategy`]; all registered strategies make the
//! same selections. [`exact_maxdet`] enumerates every subset of size at most `k`
//! and is the reference optimum for [`guarantee_report`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::Serialize;

use crate::certify::certify_increasing;
use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, IndexSet, PIVOT_RELATIVE_THRESHOLD};
use crate::minors::principal_minor_det;
use crate::registry::Registry;

/// Gains within `GAIN_TIE_TOLERANCE·(1 + |g|)` of the best gain `g` are ties,
/// resolved to the smallest index.
pub const GAIN_TIE_TOLERANCE: f64 = 1e-12;

/// Sets examined by [`exact_maxdet`] are capped at this count.
pub const EXACT_SEARCH_CAP: u128 = 2_000_000;
pub const EXACT_MAX_DIM: usize = 20;

/// `1 − e⁻¹`.
pub fn guarantee_factor() -> f64 {
    1.0 - (-1.0f64).exp()
}

fn tie_floor(best: f64) -> f64 {
    best - GAIN_TIE_TOLERANCE * (1.0 + best.abs())
}

/// One greedy run: indices in the order chosen and the gain of each step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Selection {
    pub order: Vec<usize>,
    pub gains: Vec<f64>,
    pub stopped_early: bool,
}

pub trait GreedyStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    /// Runs greedy for at most `k` steps. `k` has already been validated.
    fn select(&self, a: &HermitianMatrix, k: usize) -> Selection;
}

/// Incremental marginal-gain evaluation for the eager driver.
trait GainEvaluator {
    fn gain(&mut self, j: usize) -> f64;
    fn commit(&mut self, j: usize);
}

/// Picks the smallest index among near-maximal gains. Independent of
/// evaluation order.
fn pick(candidates: impl IntoIterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    let all: Vec<(usize, f64)> = candidates.into_iter().collect();
    let best = all.iter().map(|&(_, g)| g).fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return None;
    }
    let floor = tie_floor(best);
    all.into_iter()
        .filter(|&(_, g)| g >= floor)
        .min_by_key(|&(j, _)| j)
}

/// A best gain below this stops the run.
fn is_negative_gain(g: f64) -> bool {
    g < -GAIN_TIE_TOLERANCE
}

fn run_eager(m: usize, k: usize, eval: &mut dyn GainEvaluator) -> Selection {
    let mut chosen = vec![false; m];
    let mut out = Selection::default();
    for _ in 0..k {
        let cands: Vec<(usize, f64)> = (0..m)
            .filter(|&j| !chosen[j])
            .map(|j| (j, eval.gain(j)))
            .collect();
        match pick(cands) {
            Some((j, g)) if !is_negative_gain(g) => {
                chosen[j] = true;
                eval.commit(j);
                out.order.push(j);
                out.gains.push(g);
            }
            _ => {
                out.stopped_early = true;
                break;
            }
        }
    }
    out
}

/// `w(I ∪ {j}) − w(I)` by factoring the bordered submatrix from scratch.
pub struct Scratch;

struct ScratchEval<'a> {
    a: &'a HermitianMatrix,
    set: IndexSet,
    current: f64,
}

fn log_w(a: &HermitianMatrix, set: &IndexSet) -> f64 {
    // indices are in range by construction
    let d = principal_minor_det(a, set).expect("index in range");
    if d.sign > 0 {
        d.log_abs
    } else {
        f64::NEG_INFINITY
    }
}

impl GainEvaluator for ScratchEval<'_> {
    fn gain(&mut self, j: usize) -> f64 {
        log_w(self.a, &self.set.with(j)) - self.current
    }
    fn commit(&mut self, j: usize) {
        self.set = self.set.with(j);
        self.current = log_w(self.a, &self.set);
    }
}

impl GreedyStrategy for Scratch {
    fn name(&self) -> &'static str {
        "scratch"
    }
    fn select(&self, a: &HermitianMatrix, k: usize) -> Selection {
        let mut eval = ScratchEval {
            a,
            set: IndexSet::empty(),
            current: 0.0,
        };
        run_eager(a.dim(), k, &mut eval)
    }
}

/// Gains from the Schur complement `a_jj − cᴴ A[I]⁻¹ c`, keeping a Cholesky
/// factor of `A[I]` that grows by one row per step.
pub struct Schur;

struct SchurState<'a> {
    a: &'a HermitianMatrix,
    /// Selected indices in insertion order.
    order: Vec<usize>,
    /// Rows of the lower Cholesky factor of `A[order]`; row `r` has `r + 1` entries.
    rows: Vec<Vec<Complex64>>,
    max_diag: f64,
}

impl<'a> SchurState<'a> {
    fn new(a: &'a HermitianMatrix) -> Self {
        Self {
            a,
            order: Vec::new(),
            rows: Vec::new(),
            max_diag: 0.0,
        }
    }

    /// `(y, s)` with `R·y = A[order, j]` and `s = a_jj − ‖y‖²`.
    fn solve(&self, j: usize) -> (Vec<Complex64>, f64) {
        let n = self.order.len();
        let mut y = Vec::with_capacity(n);
        for r in 0..n {
            let mut v = self.a.get(self.order[r], j);
            for (c, yc) in y.iter().enumerate() {
                v -= self.rows[r][c] * *yc;
            }
            y.push(v / self.rows[r][r].re);
        }
        let s = self.a.get(j, j).re - y.iter().map(|z| z.norm_sqr()).sum::<f64>();
        (y, s)
    }

    fn threshold(&self, j: usize) -> f64 {
        let max_diag = self.max_diag.max(self.a.get(j, j).re.abs());
        PIVOT_RELATIVE_THRESHOLD * (self.order.len() + 1) as f64 * max_diag
    }
}

impl GainEvaluator for SchurState<'_> {
    fn gain(&mut self, j: usize) -> f64 {
        let (_, s) = self.solve(j);
        if s > self.threshold(j) {
            s.ln()
        } else {
            f64::NEG_INFINITY
        }
    }
    fn commit(&mut self, j: usize) {
        let (y, s) = self.solve(j);
        let mut row: Vec<Complex64> = y.into_iter().map(|z| z.conj()).collect();
        row.push(Complex64::new(s.max(0.0).sqrt(), 0.0));
        self.rows.push(row);
        self.order.push(j);
        self.max_diag = self.max_diag.max(self.a.get(j, j).re.abs());
    }
}

impl GreedyStrategy for Schur {
    fn name(&self) -> &'static str {
        "schur"
    }
    fn select(&self, a: &HermitianMatrix, k: usize) -> Selection {
        run_eager(a.dim(), k, &mut SchurState::new(a))
    }
}

/// Lazy evaluation: stale gains are upper bounds by submodularity, so only
/// candidates whose bound reaches the current best are re-evaluated.
pub struct Lazy;

#[derive(Debug, Clone, Copy)]
struct HeapEntry {
    bound: f64,
    index: usize,
    stamp: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // max-heap on bound, then smallest index first
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl GreedyStrategy for Lazy {
    fn name(&self) -> &'static str {
        "lazy"
    }

    fn select(&self, a: &HermitianMatrix, k: usize) -> Selection {
        let mut state = SchurState::new(a);
        let mut heap: BinaryHeap<HeapEntry> = (0..a.dim())
            .map(|j| HeapEntry {
                bound: state.gain(j),
                index: j,
                stamp: 0,
            })
            .collect();
        let mut out = Selection::default();

        for step in 0..k {
            // refresh until the top bound is current
            let mut best = loop {
                let Some(mut top) = heap.pop() else {
                    break None;
                };
                if top.stamp == step {
                    break Some(top);
                }
                top.bound = state.gain(top.index);
                top.stamp = step;
                heap.push(top);
            };
            let Some(top) = best.take() else {
                out.stopped_early = true;
                break;
            };
            // gather every candidate that can be within tie distance of the best
            let mut best_gain = top.bound;
            let mut near = vec![top];
            while let Some(&next) = heap.peek() {
                if next.bound < tie_floor(best_gain) {
                    break;
                }
                let mut e = heap.pop().unwrap();
                if e.stamp != step {
                    e.bound = state.gain(e.index);
                    e.stamp = step;
                }
                best_gain = best_gain.max(e.bound);
                near.push(e);
            }
            let floor = tie_floor(best_gain);
            let winner = near
                .iter()
                .filter(|e| e.bound >= floor)
                .min_by_key(|e| e.index)
                .copied()
                .expect("top entry is near itself");
            for e in near {
                if e.index != winner.index {
                    heap.push(e);
                }
            }
            if winner.bound == f64::NEG_INFINITY || is_negative_gain(winner.bound) {
                out.stopped_early = true;
                break;
            }
            state.commit(winner.index);
            out.order.push(winner.index);
            out.gains.push(winner.bound);
        }
        out
    }
}

pub const DEFAULT_STRATEGY: &str = "scratch";

pub fn greedy_strategies() -> Registry<dyn GreedyStrategy> {
    let mut r: Registry<dyn GreedyStrategy> = Registry::new("greedy strategy");
    r.register("scratch", Box::new(Scratch));
    r.register("schur", Box::new(Schur));
    r.register("lazy", Box::new(Lazy));
    r
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyTrace {
    pub budget: usize,
    pub strategy: &'static str,
    pub selection_order: Vec<usize>,
    /// Log-det increment of each step.
    pub marginal_gains: Vec<f64>,
    pub final_log_det: f64,
    /// Whether `A` certified as having increasing principal minors.
    pub certified: bool,
    /// `(1 − e⁻¹)·ν_k`, filled once the exact optimum is known.
    pub guarantee_bound: Option<f64>,
    /// Greedy stopped before `k` steps because no candidate had a nonnegative gain.
    pub stopped_early: bool,
    pub fingerprint: String,
}

impl GreedyTrace {
    /// `ν_k^G`: the best value over all prefixes of the selection, `∅` included.
    pub fn greedy_value(&self) -> f64 {
        let mut acc = 0.0f64;
        let mut best = 0.0f64;
        for g in &self.marginal_gains {
            acc += g;
            best = best.max(acc);
        }
        best
    }

    pub fn selected_set(&self) -> IndexSet {
        IndexSet::from_unsorted(self.selection_order.iter().copied())
    }
}

fn check_budget(a: &HermitianMatrix, k: usize) -> Result<()> {
    if k < 1 || k > a.dim() {
        return Err(Error::InvalidBudget { k, m: a.dim() });
    }
    Ok(())
}

pub fn greedy_maxdet(a: &HermitianMatrix, k: usize) -> Result<GreedyTrace> {
    greedy_maxdet_with(a, k, &Scratch)
}

pub fn greedy_maxdet_with(
    a: &HermitianMatrix,
    k: usize,
    strategy: &dyn GreedyStrategy,
) -> Result<GreedyTrace> {
    check_budget(a, k)?;
    let sel = strategy.select(a, k);
    let certified = match certify_increasing(a) {
        Ok(c) => c.is_increasing(),
        Err(Error::ZeroMatrix) => false,
        Err(e) => return Err(e),
    };
    Ok(GreedyTrace {
        budget: k,
        strategy: strategy.name(),
        final_log_det: sel.gains.iter().sum(),
        selection_order: sel.order,
        marginal_gains: sel.gains,
        certified,
        guarantee_bound: None,
        stopped_early: sel.stopped_early,
        fingerprint: a.fingerprint(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactResult {
    pub budget: usize,
    pub best_set: IndexSet,
    /// `ν_k = max_{|I| ≤ k} w(I)`.
    pub best_log_det: f64,
    pub sets_examined: u64,
    pub fingerprint: String,
}

fn binomial_prefix_sum(m: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for i in 0..=k.min(m) {
        total += c;
        c = c * (m - i) as u128 / (i + 1) as u128;
    }
    total
}

/// Exhaustive `max_{|I| ≤ k} w(I)` including `∅`. Near-ties (relative 1e−12)
/// resolve to the lexicographically smallest set.
pub fn exact_maxdet(a: &HermitianMatrix, k: usize) -> Result<ExactResult> {
    check_budget(a, k)?;
    let m = a.dim();
    let sets = binomial_prefix_sum(m, k);
    if m > EXACT_MAX_DIM || sets > EXACT_SEARCH_CAP {
        return Err(Error::SearchSpaceTooLarge {
            m,
            k,
            sets,
            cap: EXACT_SEARCH_CAP,
        });
    }
    let values: Vec<(u64, f64)> = (0..1u64 << m)
        .filter(|mask| mask.count_ones() as usize <= k)
        .map(|mask| (mask, log_w(a, &IndexSet::from_mask(mask))))
        .collect();
    let best = values.iter().map(|&(_, w)| w).fold(f64::NEG_INFINITY, f64::max);
    let floor = tie_floor(best);
    let best_set = values
        .iter()
        .filter(|&&(_, w)| w >= floor)
        .map(|&(mask, _)| IndexSet::from_mask(mask))
        .min()
        .expect("the empty set is always examined");
    Ok(ExactResult {
        budget: k,
        best_log_det: best,
        best_set,
        sets_examined: values.len() as u64,
        fingerprint: a.fingerprint(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GuaranteeReport {
    /// `ν_k^G / ν_k`, or 1 when `ν_k = 0`.
    pub ratio: f64,
    pub greedy_value: f64,
    pub optimum: f64,
    pub bound: f64,
    pub certified: bool,
    /// `ratio ≥ 1 − e⁻¹ − 1e−9`.
    pub bound_held: bool,
}

pub const GUARANTEE_TOLERANCE: f64 = 1e-9;

pub fn guarantee_report(trace: &GreedyTrace, exact: &ExactResult) -> Result<GuaranteeReport> {
    if trace.fingerprint != exact.fingerprint || trace.budget != exact.budget {
        return Err(Error::MismatchedInputs);
    }
    let greedy_value = trace.greedy_value();
    let optimum = exact.best_log_det;
    let ratio = if optimum <= 0.0 {
        1.0
    } else {
        greedy_value / optimum
    };
    let bound = guarantee_factor();
    Ok(GuaranteeReport {
        ratio,
        greedy_value,
        optimum,
        bound,
        certified: trace.certified,
        bound_held: ratio >= bound - GUARANTEE_TOLERANCE,
    })
}

/// Fills `guarantee_bound` on the trace and returns the report.
pub fn attach_guarantee(trace: &mut GreedyTrace, exact: &ExactResult) -> Result<GuaranteeReport> {
    let report = guarantee_report(trace, exact)?;
    trace.guarantee_bound = Some(report.bound * report.optimum);
    Ok(report)
}

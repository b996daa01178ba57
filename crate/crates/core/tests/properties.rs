//! Property tests over randomly drawn Hermitian matrices.

mod common;

use common::{all_subsets, gram, oracle_inverse, oracle_minor};
use minorcert::certify::DIAGONAL_TOLERANCE;
use minorcert::greedy::greedy_strategies;
use minorcert::linalg::{condition_estimate, log_determinant};
use minorcert::minors::{LOG_TOLERANCE, SYLVESTER_TOLERANCE};
use minorcert::*;
use proptest::prelude::*;

const CASES: u32 = 96;

/// `(m, cols, G entries, shift, real?)`.
fn gram_parts(
    dims: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (usize, usize, Vec<f64>, bool)> {
    dims.prop_flat_map(|m| (Just(m), 1..=m))
        .prop_flat_map(|(m, cols)| {
            (
                Just(m),
                Just(cols),
                prop::collection::vec(-2.0..2.0f64, 2 * m * cols),
                any::<bool>(),
            )
        })
}

fn build(m: usize, cols: usize, mut g: Vec<f64>, real: bool, shift: f64) -> HermitianMatrix {
    if real {
        g.iter_mut().skip(1).step_by(2).for_each(|x| *x = 0.0);
    }
    gram(m, cols, &g, shift)
}

fn pd(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = HermitianMatrix> {
    (gram_parts(dims), 1e-3..2.0f64, prop::sample::select(vec![0.1, 1.0, 10.0]))
        .prop_map(|((m, _, g, real), shift, t)| {
            // square G so the Gram part has full rank in general
            let mut g = g;
            g.resize(2 * m * m, 0.5);
            build(m, m, g, real, shift).scaled(t)
        })
}

fn psd(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = HermitianMatrix> {
    gram_parts(dims).prop_map(|(m, cols, g, real)| build(m, cols, g, real, 0.0))
}

fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * (1.0 + x.abs().max(y.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn pd_determinant_is_pivot_product(a in pd(1..=7)) {
        let f = ldl_factor(&a);
        prop_assume!(f.is_positive_definite());
        let d = determinant(&a);
        prop_assert!(d > 0.0);
        let prod: f64 = f.pivots().iter().product();
        prop_assert!((d - prod).abs() <= 1e-10 * prod.abs(), "{d} vs {prod}");
        let oracle = common::laplace_det(&a.to_rows()).re;
        prop_assert!((d - oracle).abs() <= 1e-8 * oracle.abs(), "{d} vs {oracle}");
    }

    #[test]
    fn inverse_is_an_involution(a in pd(1..=7)) {
        prop_assume!(ldl_factor(&a).is_positive_definite());
        prop_assume!(condition_estimate(&a).unwrap() <= 1e6);
        let back = inverse(&inverse(&a).unwrap()).unwrap();
        let dev = a
            .as_row_major()
            .iter()
            .zip(back.as_row_major())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        prop_assert!(dev <= 1e-6 * (1.0 + a.max_abs()), "deviation {dev}");
    }

    #[test]
    fn inverse_matches_gauss_jordan(a in pd(1..=6)) {
        prop_assume!(ldl_factor(&a).is_positive_definite());
        prop_assume!(condition_estimate(&a).unwrap() <= 1e6);
        let b = inverse(&a).unwrap();
        let oracle = oracle_inverse(&a);
        let scale = 1.0 + b.max_abs();
        for (i, row) in oracle.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                prop_assert!((b.get(i, j) - z).norm() <= 1e-6 * scale);
            }
        }
    }

    #[test]
    fn submatrix_commutes_with_nesting(a in psd(1..=6), outer in any::<u64>(), inner in any::<u64>()) {
        let m = a.dim();
        let j_mask = (outer & ((1 << m) - 1)).max(1);
        let j = IndexSet::from_mask(j_mask);
        // K ⊆ J, nonempty, given by positions within J
        let k_pos = IndexSet::from_mask((inner & ((1 << j.len()) - 1)).max(1));
        let k: Vec<usize> = k_pos.indices().iter().map(|&p| j.indices()[p]).collect();
        let k = IndexSet::new(k).unwrap();
        let nested = principal_submatrix(&principal_submatrix(&a, &j).unwrap(), &k_pos).unwrap();
        let direct = principal_submatrix(&a, &k).unwrap();
        prop_assert_eq!(nested, direct);
    }

    #[test]
    fn positive_definiteness_is_inherited(a in pd(1..=6)) {
        prop_assume!(ldl_factor(&a).is_positive_definite());
        for set in all_subsets(a.dim()).skip(1) {
            let sub = principal_submatrix(&a, &set).unwrap();
            prop_assert!(determinant(&sub) > 0.0, "{set}");
        }
    }

    #[test]
    fn minors_match_cofactor_oracle(a in psd(1..=6)) {
        let scale = a.max_abs().max(1.0);
        for set in all_subsets(a.dim()) {
            let got = principal_minor(&a, &set).unwrap();
            let want = oracle_minor(&a, &set);
            let tol = 1e-9 * scale.powi(set.len() as i32);
            prop_assert!((got - want).abs() <= tol, "{set}: {got} vs {want}");
        }
    }

    #[test]
    fn restriction_preserves_minors(a in pd(2..=6), j_bits in any::<u64>()) {
        prop_assume!(ldl_factor(&a).is_positive_definite());
        let m = a.dim();
        let j = IndexSet::from_mask((j_bits & ((1 << m) - 1)).max(1));
        let sub = principal_submatrix(&a, &j).unwrap();
        for local in all_subsets(j.len()) {
            let global = IndexSet::new(local.indices().iter().map(|&p| j.indices()[p]).collect()).unwrap();
            let x = principal_minor(&a, &global).unwrap();
            let y = principal_minor(&sub, &local).unwrap();
            prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(y.abs()), "{global}: {x} vs {y}");
        }
    }

    #[test]
    fn psd_minors_are_submodular(a in psd(1..=6)) {
        let r = check_submodularity(&a).unwrap();
        prop_assert!(r.holds, "worst {} at {:?}", r.worst_violation, r.witness);
        prop_assert!(check_hadamard_fischer(&a).unwrap().holds);
    }

    #[test]
    fn log_det_is_submodular_set_function(a in pd(1..=6), i_bits in any::<u64>(), j_bits in any::<u64>()) {
        prop_assume!(ldl_factor(&a).is_positive_definite());
        let full = (1u64 << a.dim()) - 1;
        let i = IndexSet::from_mask(i_bits & full);
        let j = IndexSet::from_mask(j_bits & full);
        let w = |s: &IndexSet| log_det_set_function(&a, s).unwrap().log_or_neg_inf();
        let lhs = w(&i) + w(&j);
        let rhs = w(&i.union(&j)) + w(&i.intersection(&j));
        prop_assert!(lhs >= rhs - LOG_TOLERANCE, "{lhs} < {rhs}");
    }

    #[test]
    fn sylvester_residual_is_small(a in pd(1..=7)) {
        prop_assume!(ldl_factor(&a).is_positive_definite());
        prop_assume!(condition_estimate(&a).unwrap() <= 1e6);
        let r = check_sylvester(&a).unwrap();
        prop_assert!(r.max_residual <= SYLVESTER_TOLERANCE, "{}", r.max_residual);
    }

    #[test]
    fn certificate_agrees_with_brute_force(a in prop_oneof![pd(1..=6), psd(2..=6)]) {
        prop_assume!(!a.is_zero());
        let fast = certify_increasing(&a).unwrap();
        let slow = brute_force_increasing(&a).unwrap();
        prop_assert_eq!(fast.verdict, slow.verdict);
        if fast.is_increasing() {
            prop_assert_eq!(fast.reason, Reason::DiagOk);
            for b in fast.inverse_diagonal.as_ref().unwrap() {
                prop_assert!(*b <= 1.0 + DIAGONAL_TOLERANCE);
            }
        }
        if let Some((i, j)) = &slow.witness_pair {
            prop_assert!(i.is_subset_of(j) && i != j);
            let (mi, mj) = (oracle_minor(&a, i), oracle_minor(&a, j));
            prop_assert!(mi > mj, "{mi} <= {mj}");
        }
    }

    #[test]
    fn single_extensions_cover_all_pairs(a in prop_oneof![pd(1..=6), psd(2..=6)]) {
        let cover = brute_force_increasing(&a).unwrap();
        let full = full_pair_increasing(&a).unwrap();
        prop_assert_eq!(cover.verdict, full.verdict);
    }

    #[test]
    fn scaling_threshold_is_sharp(a in pd(1..=7), over in 1e-12..10.0f64, under in 1e-3..0.99f64) {
        prop_assume!(ldl_factor(&a).is_positive_definite());
        let t = scaling_threshold(&a).unwrap();
        let inv = certify_increasing(&a).unwrap().inverse_diagonal.unwrap();
        prop_assert_eq!(t.t_star, inv.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        prop_assert!(inv[t.argmax_index] >= t.t_star * (1.0 - 1e-12));
        let above = t.t_star * (1.0 + 1e-12) * (1.0 + over);
        prop_assert!(certify_increasing(&a.scaled(above)).unwrap().is_increasing());
        let below = t.t_star * (1.0 - 1e-3) * (1.0 - under);
        prop_assert!(!certify_increasing(&a.scaled(below)).unwrap().is_increasing());
        let scaled = scaling_threshold(&a.scaled(7.0)).unwrap();
        prop_assert_eq!(scaled.argmax_index, t.argmax_index);
    }

    #[test]
    fn increasing_forces_small_cofactor_ratios(a in prop_oneof![pd(1..=6), psd(2..=6)]) {
        prop_assume!(!a.is_zero());
        if brute_force_increasing(&a).unwrap().is_increasing() {
            prop_assert!(ldl_factor(&a).is_positive_definite());
            let m = a.dim();
            let det = oracle_minor(&a, &IndexSet::full(m));
            for i in 0..m {
                let drop_i = IndexSet::singleton(i).complement(m);
                let b_ii = oracle_minor(&a, &drop_i) / det;
                prop_assert!(b_ii <= 1.0 + 1e-9, "b_{i}{i} = {b_ii}");
            }
        }
    }

    #[test]
    fn eigenvalue_condition_implies_increasing(a in pd(1..=6), shift in 0.0..3.0f64) {
        let a = a.shifted(-shift);
        prop_assume!(!a.is_zero());
        if eigenvalue_sufficient(&a) {
            prop_assert!(certify_increasing(&a).unwrap().is_increasing());
        }
    }

    #[test]
    fn greedy_gains_do_not_increase(a in prop_oneof![pd(1..=7), psd(2..=7)], k_frac in 0.0..1.0f64) {
        let k = 1 + ((a.dim() - 1) as f64 * k_frac) as usize;
        for (name, strategy) in greedy_strategies().iter() {
            let t = greedy_maxdet_with(&a, k, strategy).unwrap();
            for w in t.marginal_gains.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0].abs()), "{name}: {:?}", t.marginal_gains);
            }
        }
    }

    #[test]
    fn strategies_make_identical_selections(a in prop_oneof![pd(1..=8), psd(2..=8)], k_frac in 0.0..1.0f64) {
        let k = 1 + ((a.dim() - 1) as f64 * k_frac) as usize;
        let reference = greedy_maxdet(&a, k).unwrap();
        for (name, strategy) in greedy_strategies().iter() {
            let t = greedy_maxdet_with(&a, k, strategy).unwrap();
            prop_assert_eq!(&t.selection_order, &reference.selection_order, "{}", name);
            for (x, y) in t.marginal_gains.iter().zip(&reference.marginal_gains) {
                prop_assert!(close(*x, *y, 1e-9), "{name}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn greedy_is_exact_on_diagonals(d in prop::collection::vec(0.0..5.0f64, 1..=8)) {
        let a = HermitianMatrix::diagonal(&d);
        prop_assume!(!a.is_zero());
        for k in 1..=a.dim() {
            let trace = greedy_maxdet(&a, k).unwrap();
            let exact = exact_maxdet(&a, k).unwrap();
            prop_assert!(close(trace.greedy_value(), exact.best_log_det, 1e-12));
        }
    }

    #[test]
    fn greedy_commutes_with_permutation(a in pd(2..=7), k_frac in 0.0..1.0f64, perm_seed in any::<u64>()) {
        prop_assume!(ldl_factor(&a).is_positive_definite());
        let m = a.dim();
        let k = 1 + ((m - 1) as f64 * k_frac) as usize;
        let mut perm: Vec<usize> = (0..m).collect();
        let mut s = perm_seed;
        for i in (1..m).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let pa = a.permuted(&perm);
        let t = greedy_maxdet(&a, k).unwrap();
        let tp = greedy_maxdet(&pa, k).unwrap();
        prop_assert!(close(t.final_log_det, tp.final_log_det, 1e-9));
        if strict_steps(&a, &t.selection_order) {
            // entry i of PᵀAP is entry perm[i] of A
            let image: Vec<usize> = tp.selection_order.iter().map(|&i| perm[i]).collect();
            prop_assert_eq!(image, t.selection_order);
        }
    }

    #[test]
    fn greedy_is_scale_covariant(a in pd(2..=7), k_frac in 0.0..1.0f64, t in 0.05..20.0f64) {
        prop_assume!(ldl_factor(&a).is_positive_definite());
        let k = 1 + ((a.dim() - 1) as f64 * k_frac) as usize;
        let base = greedy_maxdet(&a, k).unwrap();
        let scaled = greedy_maxdet(&a.scaled(t), k).unwrap();
        prop_assume!(!base.stopped_early && !scaled.stopped_early);
        let expected = base.final_log_det + k as f64 * t.ln();
        prop_assert!(close(scaled.final_log_det, expected, 1e-9), "{} vs {expected}", scaled.final_log_det);
        if strict_steps(&a, &base.selection_order) {
            prop_assert_eq!(scaled.selection_order, base.selection_order);
        }
    }

    #[test]
    fn random_pd_is_positive_definite(m in 1usize..=12, seed in any::<u64>(), scale in 1e-3..1e3f64) {
        let a = generate(&GenSpec::new(Family::RandomPd, m, seed).scale(scale)).unwrap();
        prop_assert!(ldl_factor(&a).is_positive_definite());
    }

    #[test]
    fn generation_is_deterministic(m in 1usize..=8, seed in any::<u64>(), fam in 0usize..6) {
        let spec = GenSpec::new(Family::ALL[fam], m, seed).deficit(m.saturating_sub(1).min(1));
        prop_assume!(!(Family::ALL[fam] == Family::RandomPsd && m == 1));
        let x = generate(&spec).unwrap();
        let y = generate(&spec).unwrap();
        let bits = |a: &HermitianMatrix| a.as_row_major().iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect::<Vec<_>>();
        prop_assert_eq!(bits(&x), bits(&y));
    }

    #[test]
    fn inverse_correlation_certifies(m in 1usize..=10, rho in 0.0..=(1.0 - 1e-6)) {
        let a = generate(&GenSpec::new(Family::InverseOfCorrelation, m, 0).rho(rho)).unwrap();
        prop_assert!(certify_increasing(&a).unwrap().is_increasing());
    }
}

/// True when, at every greedy step along `order`, the winning gain beats
/// every other candidate by a clear margin (computed with the dense oracle).
fn strict_steps(a: &HermitianMatrix, order: &[usize]) -> bool {
    let m = a.dim();
    let mut chosen = IndexSet::empty();
    for &pick in order {
        let base = log_determinant(&principal_submatrix(a, &chosen).unwrap_or_else(|_| HermitianMatrix::identity(1))).log_abs;
        let base = if chosen.is_empty() { 0.0 } else { base };
        let gain = |j: usize| oracle_minor(a, &chosen.with(j)).ln() - base;
        let best = gain(pick);
        let runner_up = (0..m)
            .filter(|&j| j != pick && !chosen.contains(j))
            .map(gain)
            .fold(f64::NEG_INFINITY, f64::max);
        let clear = best - runner_up > 1e-6 * (1.0 + best.abs());
        if !clear {
            return false;
        }
        chosen = chosen.with(pick);
    }
    true
}

mod common;

use common::{all_paths, brute_optimum, instance, simple_v_paths};
use dualworld_core::dewn::{csms, Verdict};
use dualworld_core::exact::{basic_dp, kp_to_drop, min_cost_path, Query};
use dualworld_core::paths::{shortest_path, yen_k_shortest};
use dualworld_core::space::Space;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basic_dp_matches_enumeration(seed in any::<u64>(), nodes in 3usize..=6, per in 1usize..=3) {
        let (space, q) = instance(seed, nodes, per);
        let want = brute_optimum(&space, &q);
        match basic_dp(&space, &q) {
            Ok(p) => {
                let (l, _) = want.expect("enumeration finds a feasible path too");
                prop_assert!((p.length - l).abs() < 1e-9, "dp {} brute {}", p.length, l);
                prop_assert!(p.cost <= q.budget + 1e-9);
                prop_assert!(p.is_consistent(&space));
            }
            Err(_) => prop_assert!(want.is_none()),
        }
    }

    #[test]
    fn min_cost_path_is_cheapest(seed in any::<u64>(), nodes in 3usize..=6, per in 1usize..=3) {
        let (space, q) = instance(seed, nodes, per);
        let cheapest = all_paths(&space, &q).into_iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        match min_cost_path(&space, &q) {
            Some(p) => prop_assert!((p.cost - cheapest).abs() < 1e-9),
            None => prop_assert!(cheapest.is_infinite()),
        }
    }

    #[test]
    fn knapsack_reduction_decodes_to_optimum(
        items in prop::collection::vec((1u32..=20, 1u32..=20), 1..=10),
        frac in 0.0f64..=1.0,
    ) {
        let total: u32 = items.iter().map(|i| i.0).sum();
        let cap = (total as f64 * frac).floor() as u32;
        let n = items.len();
        let best = (0u32..1 << n)
            .filter_map(|m| {
                let (w, v) = (0..n).filter(|i| m >> i & 1 == 1).fold((0, 0), |(w, v), i| (w + items[i].0, v + items[i].1));
                (w <= cap).then_some(v)
            })
            .max()
            .unwrap();
        let red = kp_to_drop(&items, cap);
        let p = basic_dp(&red.space, &red.query).unwrap();
        let chosen = red.decode(&p);
        let w: u32 = chosen.iter().map(|&i| items[i].0).sum();
        let v: u32 = chosen.iter().map(|&i| items[i].1).sum();
        prop_assert!(w <= cap);
        prop_assert_eq!(v, best);
    }

    #[test]
    fn multiplier_maximizes_the_dual(seed in any::<u64>(), nodes in 4usize..=9) {
        let (space, q) = instance(seed, nodes, 3);
        let g = space.graph();
        let range = space.mil_range(0.1);
        let (s, t) = (q.start.v_loc, q.target);
        let m = csms(g, s, t, q.budget, &range, None);
        let dual = |r: f64| shortest_path(g, s, t, |_, _, l| Some(l + r * range.alpha(l)).filter(|w| w.is_finite())).map(|p| p.weight - r * q.budget);
        let paths = simple_v_paths(g, s, t);
        let alpha_sum = |p: &Vec<u32>| p.windows(2).map(|w| range.alpha(g.edge_length(w[0], w[1]).unwrap())).sum::<f64>();
        let len = |p: &Vec<u32>| p.windows(2).map(|w| g.edge_length(w[0], w[1]).unwrap()).sum::<f64>();
        let constrained = paths.iter().filter(|p| alpha_sum(p) <= q.budget + 1e-9).map(len).fold(f64::INFINITY, f64::min);
        if m.verdict == Verdict::Multipliers {
            let a = m.alpha.as_ref().unwrap();
            let at_star = dual(a.r_star).unwrap();
            let scan = (0..=400).map(|i| dual(0.05 * i as f64).unwrap()).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(at_star >= scan - 1e-6, "dual at r* {} < scanned {}", at_star, scan);
            prop_assert!(m.length_lower_bound(q.budget) <= constrained + 1e-9);
        }
        if m.verdict == Verdict::Infeasible {
            prop_assert!(constrained.is_infinite());
        }
    }

    #[test]
    fn yen_lists_the_k_shortest_simple_paths(seed in any::<u64>(), nodes in 3usize..=8, k in 1usize..=6) {
        let (space, q) = instance(seed, nodes, 1);
        let g = space.graph();
        let mut want: Vec<f64> = simple_v_paths(g, q.start.v_loc, q.target)
            .iter()
            .map(|p| p.windows(2).map(|w| g.edge_length(w[0], w[1]).unwrap()).sum())
            .collect();
        want.sort_by(f64::total_cmp);
        want.truncate(k);
        let got: Vec<f64> = yen_k_shortest(g, q.start.v_loc, q.target, k).iter().map(|p| p.weight).collect();
        prop_assert_eq!(got.len(), want.len());
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn zero_budget_forces_free_transitions() {
    let (space, q) = instance(3, 5, 3);
    let q0 = Query::new(q.start, q.target, 0.0);
    if let Ok(p) = basic_dp(&space, &q0) {
        assert_eq!(p.cost, 0.0);
    }
}

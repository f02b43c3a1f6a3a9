use dualworld_core::geom::{Point, Rect};
use dualworld_core::grid::PhysicalGrid;
use dualworld_core::kinematic::{GainGrids, KinematicSpace};
use dualworld_core::kinematics::{apply_sequence, operation_cost, CostKind, CostModel, RwOp, Worlds};
use dualworld_core::mil::MilRange;
use dualworld_core::orient::OrientationSet;
use dualworld_core::space::{Hop, Space};
use dualworld_core::world::{build_visibility_graph, Poi, VirtualWorld};
use proptest::prelude::*;

fn space(k: u16, kind: CostKind, reset: f64) -> KinematicSpace {
    let pois = [(0.0, 0.0), (0.6, 0.0), (0.6, 0.6), (0.0, 0.6), (1.2, 0.6)]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Poi { name: format!("p{i}"), pos: Point::new(x, y) })
        .collect();
    let world = VirtualWorld::new(Rect::new(Point::new(-1.0, -1.0), Point::new(2.0, 2.0)), Vec::new(), pois);
    let graph = build_visibility_graph(&world, 0.9).unwrap();
    let grid = PhysicalGrid::from_rows(Point::new(0.0, 0.0), 0.3, &["######", "#....#", "#..#.#", "#....#", "######"]).unwrap();
    let model = CostModel { reset_cost: reset, ..CostModel::with_kind(kind) };
    let gains = GainGrids::from_model(&model, 3);
    KinematicSpace::new(Worlds { graph, grid, orient: OrientationSet::new(k) }, model, gains)
}

#[test]
fn every_hop_replays_through_its_operations() {
    for (k, kind) in [(4, CostKind::DetectionThreshold), (8, CostKind::DetectionLikelihood), (4, CostKind::UsageCount)] {
        let sp = space(k, kind, 1.0);
        let mut hops: Vec<Hop> = Vec::new();
        let mut checked = 0;
        for st in sp.all_states() {
            hops.clear();
            sp.successors(st, &mut hops);
            for h in &hops {
                let ops = sp.operations(st, h.to).expect("every successor has operations");
                assert!((ops.total_cost - h.cost).abs() < 1e-9, "{st:?} -> {:?}: ops {} hop {}", h.to, ops.total_cost, h.cost);
                let end = apply_sequence(st, &ops.ops, sp.worlds()).expect("operations apply");
                assert_eq!(end, h.to);
                assert!((h.length - sp.graph().edge_length(st.v_loc, h.to.v_loc).unwrap()).abs() < 1e-12);
                checked += 1;
            }
        }
        assert!(checked > 100, "{checked}");
    }
}

#[test]
fn mil_range_matches_brute_force() {
    for reset in [0.0, 1.0, 3.0] {
        let sp = space(4, CostKind::DetectionThreshold, reset);
        let all = sp.all_states();
        let brute = MilRange::from_sources(&all, 0.1, |s, out| sp.successors(s, out));
        let got = sp.mil_range(0.1);
        let a: Vec<(f64, f64, f64)> = got.iter().collect();
        let b: Vec<(f64, f64, f64)> = brute.iter().collect();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9 && (x.2 - y.2).abs() < 1e-9, "{x:?} vs {y:?}");
        }
    }
}

#[test]
fn zero_reset_cost_frees_the_best_case() {
    let sp = space(4, CostKind::DetectionThreshold, 0.0);
    let range = sp.mil_range(0.1);
    assert!(!range.is_empty());
    assert!(range.iter().all(|(_, a, b)| a == 0.0 && b >= a));
}

proptest! {
    #[test]
    fn identity_operations_are_free(len in 0.0f64..5.0, turn in -180.0f64..180.0, kind in prop_oneof![
        Just(CostKind::UsageCount), Just(CostKind::DetectionLikelihood), Just(CostKind::DetectionThreshold)
    ]) {
        let m = CostModel::with_kind(kind);
        for op in [RwOp::Translation { gain: 1.0, length: len }, RwOp::Rotation { gain: 1.0, turn_deg: turn }, RwOp::Curvature { gain: 0.0, length: len }, RwOp::Reset { angle_deg: 0.0 }] {
            prop_assert_eq!(operation_cost(&op, &m), 0.0);
        }
    }

    #[test]
    fn likelihood_cost_grows_away_from_the_threshold(a in 0.0f64..3.0, b in 0.0f64..3.0, len in 0.1f64..3.0) {
        let m = CostModel::with_kind(CostKind::DetectionLikelihood);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        // Both gains above the upper translation threshold.
        let c = |g: f64| operation_cost(&RwOp::Translation { gain: 1.22 + g, length: len }, &m);
        prop_assert!(c(lo) <= c(hi) + 1e-12);
        prop_assert!(c(hi) <= len + 1e-12);
    }
}

//! Random transition-table instances and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use dualworld_core::exact::Query;
use dualworld_core::geom::Point;
use dualworld_core::space::{Hop, Space};
use dualworld_core::state::LocoState;
use dualworld_core::table::TableSpace;
use dualworld_core::world::{NodeKind, VNode, VirtualGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small random instance: jittered-grid graph, a few states per node and
/// random transition costs in half units.
pub fn instance(seed: u64, nodes: usize, per_node: usize) -> (TableSpace, Query) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (nodes as f64).sqrt().ceil() as usize;
    let vnodes: Vec<VNode> = (0..nodes)
        .map(|i| VNode {
            pos: Point::new(2.0 * (i % side) as f64 + rng.gen_range(-0.3..0.3), 2.0 * (i / side) as f64 + rng.gen_range(-0.3..0.3)),
            kind: NodeKind::Poi(format!("n{i}")),
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..nodes {
        for j in i + 1..nodes {
            let (dx, dy) = ((i % side).abs_diff(j % side), (i / side).abs_diff(j / side));
            if dx + dy == 1 || (dx == 1 && dy == 1 && rng.gen_bool(0.4)) {
                let l = (vnodes[i].pos.dist(vnodes[j].pos) * 10.0).ceil() / 10.0;
                edges.push((i as u32, j as u32, l));
            }
        }
    }
    let graph = VirtualGraph::from_edges(vnodes, &edges, f64::INFINITY).unwrap();
    let mut slots: Vec<(u32, u16)> = (0..3).flat_map(|c| (0..2).map(move |h| (c, h))).collect();
    let mut per: Vec<Vec<LocoState>> = Vec::new();
    for v in 0..nodes as u32 {
        slots.shuffle(&mut rng);
        per.push(slots[..per_node.min(slots.len())].iter().map(|&(c, h)| LocoState::new(v, rng.gen_range(0..2), c, h)).collect());
    }
    let mut space = TableSpace::new(graph);
    for s in per.iter().flatten() {
        space.add_state(*s).unwrap();
    }
    for &(u, v, _) in &edges {
        for (a, b) in [(u, v), (v, u)] {
            for &from in &per[a as usize] {
                let forced = rng.gen_range(0..per[b as usize].len());
                for (i, &to) in per[b as usize].iter().enumerate() {
                    if i == forced || rng.gen_bool(0.4) {
                        space.add_transition(from, to, 0.5 * rng.gen_range(0..6) as f64).unwrap();
                    }
                }
            }
        }
    }
    for c in 0..3 {
        space.set_clearance(c, rng.gen_range(0.2..1.5));
    }
    let budget = 0.5 * rng.gen_range(0..8) as f64;
    (space, Query::new(per[0][0], nodes as u32 - 1, budget))
}

/// Every state-simple path from the start to the target, as (length, cost).
pub fn all_paths<S: Space>(space: &S, q: &Query) -> Vec<(f64, f64, Vec<LocoState>)> {
    fn go<S: Space>(space: &S, q: &Query, stack: &mut Vec<LocoState>, l: f64, c: f64, out: &mut Vec<(f64, f64, Vec<LocoState>)>) {
        let cur = *stack.last().unwrap();
        if cur.v_loc == q.target {
            out.push((l, c, stack.clone()));
            return;
        }
        let mut hops: Vec<Hop> = Vec::new();
        space.successors(cur, &mut hops);
        for h in hops {
            if !stack.contains(&h.to) {
                stack.push(h.to);
                go(space, q, stack, l + h.length, c + h.cost, out);
                stack.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(space, q, &mut vec![q.start], 0.0, 0.0, &mut out);
    out
}

/// Brute-force constrained optimum: shortest path within the budget.
pub fn brute_optimum<S: Space>(space: &S, q: &Query) -> Option<(f64, f64)> {
    all_paths(space, q)
        .into_iter()
        .filter(|p| p.1 <= q.budget + 1e-9)
        .map(|p| (p.0, p.1))
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

/// Every simple virtual path from `s` to `t`.
pub fn simple_v_paths(g: &VirtualGraph, s: u32, t: u32) -> Vec<Vec<u32>> {
    fn go(g: &VirtualGraph, t: u32, stack: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let cur = *stack.last().unwrap();
        if cur == t {
            out.push(stack.clone());
            return;
        }
        for &(u, _) in g.neighbors(cur) {
            if !stack.contains(&u) {
                stack.push(u);
                go(g, t, stack, out);
                stack.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, t, &mut vec![s], &mut out);
    out
}

//! Comparison algorithms: min-cost search, k shortest paths with Resets, and
//! a constrained search on the virtual graph alone.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::exact::{min_cost_path, Query, SolveError};
use crate::kinematic::{KinematicSpace, WalkMemo};
use crate::math::{Total, EPS};
use crate::mil::{best_step, greedy_realize, MilRange};
use crate::paths::yen_k_shortest;
use crate::space::{Hop, RwPath, Space};
use crate::state::LocoState;
use crate::table::TableSpace;
use crate::world::NodeId;

/// Cheapest path overall; infeasible when even that exceeds the budget.
pub fn mcp<S: Space + ?Sized>(space: &S, q: &Query) -> Result<RwPath, SolveError> {
    match min_cost_path(space, q) {
        Some(p) if q.within(p.cost) => Ok(p),
        _ => Err(SolveError::Infeasible),
    }
}

/// Realizes one virtual hop without redirection, resetting on collision.
pub trait ResetRealizer: Space {
    fn reset_step(&self, st: LocoState, next: NodeId) -> Option<Hop>;
}

impl<M: WalkMemo> ResetRealizer for KinematicSpace<M> {
    fn reset_step(&self, st: LocoState, next: NodeId) -> Option<Hop> {
        KinematicSpace::reset_step(self, st, next)
    }
}

/// Table spaces carry no operations, so the cheapest matching hop stands in.
impl ResetRealizer for TableSpace {
    fn reset_step(&self, st: LocoState, next: NodeId) -> Option<Hop> {
        best_step(self, st, next, &mut Vec::new())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KspOutcome {
    /// Cheapest realized candidate, feasible or not.
    pub best: Option<RwPath>,
    pub feasible: bool,
    /// Lengths of the enumerated virtual paths, in order.
    pub candidate_lengths: Vec<f64>,
}

pub fn realize_with_resets<S: ResetRealizer + ?Sized>(space: &S, v_path: &[NodeId], start: LocoState) -> Option<RwPath> {
    let mut path = RwPath::start(start);
    for &next in v_path.iter().skip(1) {
        let hop = space.reset_step(path.last(), next)?;
        path.push(hop.to, hop.length, hop.cost);
    }
    Some(path)
}

/// Realizes each of the `k` shortest loopless virtual paths and keeps the
/// cheapest (shorter on ties).
pub fn ksp_reset<S: ResetRealizer + ?Sized>(space: &S, q: &Query, k: usize) -> KspOutcome {
    let cands = yen_k_shortest(space.graph(), q.start.v_loc, q.target, k);
    let mut best: Option<RwPath> = None;
    for c in &cands {
        if let Some(p) = realize_with_resets(space, &c.nodes, q.start) {
            let better = best.as_ref().map_or(true, |b| (Total(p.cost), Total(p.length)) < (Total(b.cost), Total(b.length)));
            if better {
                best = Some(p);
            }
        }
    }
    let feasible = best.as_ref().map_or(false, |b| q.within(b.cost));
    KspOutcome { best, feasible, candidate_lengths: cands.iter().map(|c| c.weight).collect() }
}

/// Shortest virtual path whose summed beta bound fits the budget, found by
/// exact Pareto labeling. Unusable edges have no beta bin.
pub fn beta_constrained_path(space: &(impl Space + ?Sized), range: &MilRange, s: NodeId, t: NodeId, budget: f64) -> Option<Vec<NodeId>> {
    let g = space.graph();
    struct Label {
        node: NodeId,
        pred: Option<usize>,
    }
    let mut labels: Vec<Label> = alloc::vec![Label { node: s, pred: None }];
    let mut front: Vec<Vec<(f64, f64)>> = alloc::vec![Vec::new(); g.node_count()];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Total(0.0), Total(0.0), s, 0usize)));
    while let Some(Reverse((Total(l), Total(b), v, i))) = heap.pop() {
        let f = &mut front[v as usize];
        if f.iter().any(|&(fl, fb)| fl <= l + EPS && fb <= b + EPS) {
            continue;
        }
        f.push((l, b));
        if v == t {
            let mut out = alloc::vec![v];
            let mut cur = labels[i].pred;
            while let Some(j) = cur {
                out.push(labels[j].node);
                cur = labels[j].pred;
            }
            out.reverse();
            return Some(out);
        }
        for &(u, el) in g.neighbors(v) {
            let eb = range.beta(el);
            if !eb.is_finite() || b + eb > budget + EPS {
                continue;
            }
            let (nl, nb) = (l + el, b + eb);
            if front[u as usize].iter().any(|&(fl, fb)| fl <= nl + EPS && fb <= nb + EPS) {
                continue;
            }
            labels.push(Label { node: u, pred: Some(i) });
            heap.push(Reverse((Total(nl), Total(nb), u, labels.len() - 1)));
        }
    }
    None
}

/// Plans on the virtual graph with beta as a safe cost estimate, then
/// realizes greedily. Feasibility is judged on the realized cost.
pub fn cola_estimated<S: Space + ?Sized>(space: &S, range: &MilRange, q: &Query) -> Result<RwPath, SolveError> {
    let nodes = beta_constrained_path(space, range, q.start.v_loc, q.target, q.budget).ok_or(SolveError::Infeasible)?;
    let p = greedy_realize(space, &nodes, q.start).map_err(|_| SolveError::Infeasible)?;
    if q.within(p.cost) {
        Ok(p)
    } else {
        Err(SolveError::Infeasible)
    }
}

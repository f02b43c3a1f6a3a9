//! MIL lookups, MIL ranges and greedy realization of virtual paths.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::kinematics::OperationSequence;
use crate::math::{self, EPS};
use crate::space::{Hop, RwPath, Space};
use crate::state::LocoState;
use crate::world::{NodeId, VirtualGraph};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MilError {
    #[error("consecutive nodes are not joined by a virtual edge")]
    NotAPath,
    #[error("states are not neighbors")]
    NotNeighbors,
    #[error("no realizable transition at step {0}")]
    Unrealizable(usize),
}

pub const DEFAULT_QUANTUM: f64 = 0.1;

/// Per length bin, the cheapest transition cost over all pairs (alpha) and
/// the worst case over sources of the cheapest transition to a fixed
/// neighbor node (beta).
#[derive(Clone, Debug, PartialEq)]
pub struct MilRange {
    quantum: f64,
    bins: BTreeMap<i64, (f64, f64)>,
}

impl MilRange {
    pub fn new(quantum: f64) -> Self {
        MilRange { quantum, bins: BTreeMap::new() }
    }

    pub fn quantum(&self) -> f64 {
        self.quantum
    }

    pub fn key(&self, length: f64) -> i64 {
        math::quantize(length, self.quantum)
    }

    pub fn set(&mut self, length: f64, alpha: f64, beta: f64) {
        let k = self.key(length);
        self.bins.insert(k, (alpha, beta));
    }

    pub fn get(&self, length: f64) -> Option<(f64, f64)> {
        self.bins.get(&self.key(length)).copied()
    }

    /// Lower bound; an absent bin means no transition exists at all.
    pub fn alpha(&self, length: f64) -> f64 {
        self.get(length).map_or(f64::INFINITY, |b| b.0)
    }

    pub fn beta(&self, length: f64) -> f64 {
        self.get(length).map_or(f64::INFINITY, |b| b.1)
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// `(bin length, alpha, beta)` in increasing length order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.bins.iter().map(move |(&k, &(a, b))| (k as f64 * self.quantum, a, b))
    }

    pub fn observe_alpha(&mut self, length: f64, cost: f64) {
        let k = self.key(length);
        let e = self.bins.entry(k).or_insert((f64::INFINITY, 0.0));
        e.0 = e.0.min(cost);
    }

    pub fn observe_beta(&mut self, length: f64, cost: f64) {
        let k = self.key(length);
        let e = self.bins.entry(k).or_insert((f64::INFINITY, 0.0));
        e.1 = e.1.max(cost);
    }

    /// Builds a range by expanding every listed source state.
    pub fn from_sources<F>(sources: &[LocoState], quantum: f64, mut successors: F) -> Self
    where
        F: FnMut(LocoState, &mut Vec<Hop>),
    {
        let mut range = MilRange::new(quantum);
        let mut buf = Vec::new();
        let mut group: BTreeMap<(i64, NodeId), f64> = BTreeMap::new();
        for &s in sources {
            buf.clear();
            successors(s, &mut buf);
            group.clear();
            for h in buf.iter().filter(|h| h.length > EPS) {
                range.observe_alpha(h.length, h.cost);
                let e = group.entry((range.key(h.length), h.to.v_loc)).or_insert(f64::INFINITY);
                *e = e.min(h.cost);
            }
            for (&(k, _), &c) in &group {
                range.observe_beta(k as f64 * quantum, c);
            }
        }
        range
    }
}

/// Sums of per-edge alpha and beta along a virtual path.
pub fn aggregate_bounds(graph: &VirtualGraph, v_path: &[NodeId], range: &MilRange) -> Result<(f64, f64), MilError> {
    let (mut a, mut b) = (0.0, 0.0);
    for w in v_path.windows(2) {
        let l = graph.edge_length(w[0], w[1]).ok_or(MilError::NotAPath)?;
        a += range.alpha(l);
        b += range.beta(l);
    }
    Ok((a, b))
}

/// MIL of a neighboring pair plus a realizing operation sequence.
pub fn compute_mil<S: Space + ?Sized>(space: &S, from: LocoState, to: LocoState) -> Result<(f64, OperationSequence), MilError> {
    if from.v_loc != to.v_loc && space.graph().edge_length(from.v_loc, to.v_loc).is_none() {
        return Err(MilError::NotNeighbors);
    }
    let cost = space.mil(from, to).ok_or(MilError::Unrealizable(0))?;
    let ops = space.operations(from, to).unwrap_or(OperationSequence { ops: Vec::new(), total_cost: cost });
    Ok((cost, ops))
}

/// Cheapest transition into virtual node `next`; ties go to the larger
/// physical clearance, then the smaller state.
pub fn best_step<S: Space + ?Sized>(space: &S, cur: LocoState, next: NodeId, buf: &mut Vec<Hop>) -> Option<Hop> {
    buf.clear();
    space.successors(cur, buf);
    let mut best: Option<(Hop, f64)> = None;
    for h in buf.iter().filter(|h| h.to.v_loc == next && h.length > EPS) {
        let d = space.clearance(h.to);
        let better = match &best {
            None => true,
            Some((b, bd)) => {
                let (qc, qb) = (math::quantize(h.cost, EPS), math::quantize(b.cost, EPS));
                qc < qb || (qc == qb && (d > *bd || (d == *bd && h.to < b.to)))
            }
        };
        if better {
            best = Some((*h, d));
        }
    }
    best.map(|b| b.0)
}

/// Follows `v_path` from `start`, always taking the cheapest next state.
pub fn greedy_realize<S: Space + ?Sized>(space: &S, v_path: &[NodeId], start: LocoState) -> Result<RwPath, MilError> {
    if v_path.first() != Some(&start.v_loc) {
        return Err(MilError::NotAPath);
    }
    let mut path = RwPath::start(start);
    let mut buf = Vec::new();
    for (i, &next) in v_path.iter().enumerate().skip(1) {
        if space.graph().edge_length(path.last().v_loc, next).is_none() {
            return Err(MilError::NotAPath);
        }
        let hop = best_step(space, path.last(), next, &mut buf).ok_or(MilError::Unrealizable(i - 1))?;
        path.push(hop.to, hop.length, hop.cost);
    }
    Ok(path)
}

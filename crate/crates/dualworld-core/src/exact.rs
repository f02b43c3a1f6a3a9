//! Exact solver: dynamic program over (loco-state, path length) labels,
//! plus the knapsack reduction used as an adversarial generator.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec::Vec;
use core::cmp::Reverse;

use hashbrown::{HashMap, HashSet};

use crate::geom::Point;
use crate::math::{self, Total, EPS};
use crate::space::{Hop, RwPath, Space};
use crate::state::LocoState;
use crate::table::TableSpace;
use crate::world::{NodeId, NodeKind, VNode, VirtualGraph};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("no path within the cost budget")]
    Infeasible,
    #[error("no feasible reference path found")]
    ReferenceNotFound,
    #[error("collapsed path has no realization")]
    Unrealizable,
}

/// A DROP query: reach `target` from `start` with total MIL at most `budget`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Query {
    pub start: LocoState,
    pub target: NodeId,
    pub budget: f64,
}

impl Query {
    pub fn new(start: LocoState, target: NodeId, budget: f64) -> Self {
        Query { start, target, budget }
    }

    pub fn within(&self, cost: f64) -> bool {
        cost <= self.budget + EPS
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpLabel {
    pub st: LocoState,
    pub length: f64,
    pub cost: f64,
    pub pred: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DpOutcome {
    pub path: Option<RwPath>,
    pub labels: Vec<DpLabel>,
    /// Length bound used to stop the search.
    pub length_bound: f64,
}

/// Number of states reachable from `start` and the longest hop among them.
pub fn reachable_extent<S: Space + ?Sized>(space: &S, start: LocoState) -> (usize, f64) {
    let mut seen: HashSet<LocoState> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut buf: Vec<Hop> = Vec::new();
    let mut max_hop: f64 = 0.0;
    seen.insert(start);
    queue.push_back(start);
    while let Some(s) = queue.pop_front() {
        buf.clear();
        space.successors(s, &mut buf);
        for h in &buf {
            max_hop = max_hop.max(h.length);
            if seen.insert(h.to) {
                queue.push_back(h.to);
            }
        }
    }
    (seen.len(), max_hop)
}

/// Label DP in increasing length order. A label is kept per distinct
/// (state, length) pair; no dominance between lengths is used. Labels past
/// the simple-path length bound or over budget are dropped.
pub fn basic_dp_full<S: Space + ?Sized>(space: &S, q: &Query) -> DpOutcome {
    let (n, max_hop) = reachable_extent(space, q.start);
    let bound = n.saturating_sub(1) as f64 * max_hop + EPS;
    let mut labels: Vec<DpLabel> = Vec::new();
    let mut index: HashMap<(LocoState, i64), usize> = HashMap::new();
    let mut done: Vec<bool> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut buf: Vec<Hop> = Vec::new();

    labels.push(DpLabel { st: q.start, length: 0.0, cost: 0.0, pred: None });
    done.push(false);
    index.insert((q.start, 0), 0);
    heap.push(Reverse((Total(0.0), Total(0.0), q.start, 0usize)));

    let mut found: Option<(f64, usize)> = None;
    while let Some(Reverse((Total(l), Total(c), st, i))) = heap.pop() {
        if done[i] || labels[i].cost < c {
            continue;
        }
        if let Some((best_len, _)) = found {
            if l > best_len + EPS {
                break;
            }
        }
        done[i] = true;
        if st.v_loc == q.target {
            let better = match found {
                None => true,
                Some((_, j)) => (Total(c), st) < (Total(labels[j].cost), labels[j].st),
            };
            if better {
                found = Some((found.map_or(l, |f| f.0), i));
            }
            continue;
        }
        buf.clear();
        space.successors(st, &mut buf);
        for h in &buf {
            let (nl, nc) = (l + h.length, c + h.cost);
            if nl > bound || !q.within(nc) {
                continue;
            }
            let key = (h.to, math::quantize(nl, EPS));
            match index.get(&key) {
                Some(&j) => {
                    if !done[j] && nc < labels[j].cost {
                        labels[j].cost = nc;
                        labels[j].pred = Some(i);
                        heap.push(Reverse((Total(labels[j].length), Total(nc), h.to, j)));
                    }
                }
                None => {
                    let j = labels.len();
                    labels.push(DpLabel { st: h.to, length: nl, cost: nc, pred: Some(i) });
                    done.push(false);
                    index.insert(key, j);
                    heap.push(Reverse((Total(nl), Total(nc), h.to, j)));
                }
            }
        }
    }
    let path = found.map(|(_, i)| backtrack(&labels, i));
    DpOutcome { path, labels, length_bound: bound }
}

fn backtrack(labels: &[DpLabel], mut i: usize) -> RwPath {
    let mut chain = alloc::vec![i];
    while let Some(p) = labels[i].pred {
        chain.push(p);
        i = p;
    }
    chain.reverse();
    let mut path = RwPath::start(labels[chain[0]].st);
    for w in chain.windows(2) {
        let (a, b) = (&labels[w[0]], &labels[w[1]]);
        path.push(b.st, b.length - a.length, b.cost - a.cost);
    }
    path.length = labels[*chain.last().unwrap()].length;
    path.cost = labels[*chain.last().unwrap()].cost;
    path
}

/// Shortest path whose total MIL fits the budget.
pub fn basic_dp<S: Space + ?Sized>(space: &S, q: &Query) -> Result<RwPath, SolveError> {
    basic_dp_full(space, q).path.ok_or(SolveError::Infeasible)
}

/// A knapsack instance rewritten as a DROP instance.
#[derive(Clone, Debug)]
pub struct KnapsackReduction {
    pub space: TableSpace,
    pub query: Query,
    /// Node entered when item `i` is taken.
    pub take_nodes: Vec<NodeId>,
}

impl KnapsackReduction {
    /// Items whose detour node the path visits.
    pub fn decode(&self, path: &RwPath) -> Vec<usize> {
        let visited: HashSet<NodeId> = path.states.iter().map(|s| s.v_loc).collect();
        (0..self.take_nodes.len()).filter(|&i| visited.contains(&self.take_nodes[i])).collect()
    }
}

/// Chain of gadgets `a_i -> a_{i+1}`: skipping item `i` costs nothing and
/// has length `V + 2`; taking it through `b_{i+1}` has length `V - v_i + 2`
/// and costs `w_i`. Backward moves cost `2W`. Budget is `W`.
pub fn kp_to_drop(items: &[(u32, u32)], capacity: u32) -> KnapsackReduction {
    let n = items.len();
    let big_v: f64 = items.iter().map(|&(_, v)| v as f64).sum();
    let a = |i: usize| i as NodeId;
    let b = |i: usize| (n + i) as NodeId;
    let mut nodes = Vec::new();
    for i in 0..=n {
        nodes.push(VNode { pos: Point::new(i as f64 * (big_v + 2.0), 0.0), kind: NodeKind::Poi(alloc::format!("a{i}")) });
    }
    for i in 1..=n {
        nodes.push(VNode { pos: Point::new((i as f64 - 0.5) * (big_v + 2.0), 1.0), kind: NodeKind::Poi(alloc::format!("b{i}")) });
    }
    let mut edges = Vec::new();
    for (i, &(_, v)) in items.iter().enumerate() {
        edges.push((a(i), a(i + 1), big_v + 2.0));
        edges.push((a(i), b(i + 1), big_v - v as f64 + 1.0));
        edges.push((b(i + 1), a(i + 1), 1.0));
    }
    let graph = VirtualGraph::from_edges(nodes, &edges, f64::INFINITY).expect("gadget graph is well formed");
    let mut space = TableSpace::new(graph);
    let st = |v: NodeId| LocoState::new(v, 0, 0, 0);
    let back = 2.0 * capacity as f64;
    space.add_state(st(a(0))).unwrap();
    for (i, &(w, _)) in items.iter().enumerate() {
        let (ai, an, bn) = (st(a(i)), st(a(i + 1)), st(b(i + 1)));
        for (from, to, fwd) in [(ai, an, 0.0), (ai, bn, w as f64), (bn, an, 0.0)] {
            space.add_transition(from, to, fwd).unwrap();
            space.add_transition(to, from, back).unwrap();
        }
    }
    KnapsackReduction {
        space,
        query: Query::new(st(a(0)), a(n), capacity as f64),
        take_nodes: (1..=n).map(b).collect(),
    }
}

/// Cheapest path from `q.start` to any state at `q.target`, ignoring the
/// budget. Ties go to the shorter path, then the smaller state.
pub fn min_cost_path<S: Space + ?Sized>(space: &S, q: &Query) -> Option<RwPath> {
    let mut best: HashMap<LocoState, (f64, f64, Option<LocoState>)> = HashMap::new();
    let mut done: HashSet<LocoState> = HashSet::new();
    let mut heap = BinaryHeap::new();
    let mut buf: Vec<Hop> = Vec::new();
    best.insert(q.start, (0.0, 0.0, None));
    heap.push(Reverse((Total(0.0), Total(0.0), q.start)));
    while let Some(Reverse((Total(c), Total(l), st))) = heap.pop() {
        if !done.insert(st) {
            continue;
        }
        if st.v_loc == q.target {
            let mut chain = alloc::vec![st];
            while let Some(p) = best[chain.last().unwrap()].2 {
                chain.push(p);
            }
            chain.reverse();
            let mut path = RwPath::start(chain[0]);
            for w in chain.windows(2) {
                let (a, b) = (best[&w[0]], best[&w[1]]);
                path.push(w[1], b.1 - a.1, b.0 - a.0);
            }
            path.length = l;
            path.cost = c;
            return Some(path);
        }
        buf.clear();
        space.successors(st, &mut buf);
        for h in &buf {
            let (nc, nl) = (c + h.cost, l + h.length);
            let better = best.get(&h.to).map_or(true, |b| (Total(nc), Total(nl)) < (Total(b.0), Total(b.1)));
            if better && !done.contains(&h.to) {
                best.insert(h.to, (nc, nl, Some(st)));
                heap.push(Reverse((Total(nc), Total(nl), h.to)));
            }
        }
    }
    None
}

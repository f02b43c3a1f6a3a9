//! Pruning search that trims the loco-state space ahead of the rounded DP.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Reverse;

use hashbrown::{HashMap, HashSet};

use super::heuristics::Heuristics;
use super::Pruning;
use crate::exact::Query;
use crate::math::{Total, EPS};
use crate::mil::greedy_realize;
use crate::paths::path_length;
use crate::space::{Hop, Space};
use crate::state::LocoState;
use crate::world::NodeId;

/// Minimum-length and minimum-cost labels of one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Labels {
    pub l_l: f64,
    pub c_l: f64,
    pub l_c: f64,
    pub c_c: f64,
    pub pred_l: LocoState,
    pub pred_c: LocoState,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PpnpStats {
    /// Virtual node of every state discarded as over budget.
    pub ilsp: Vec<NodeId>,
    /// Virtual node of every state discarded as too long.
    pub slsp: Vec<NodeId>,
    pub locks: usize,
    pub unlocks: usize,
    /// Rounds of exact label computation.
    pub exact_rounds: usize,
    /// Times the length bound tightened.
    pub bound_updates: usize,
}

#[derive(Clone, Debug)]
pub struct PpnpResult {
    /// Trimmed space: every state that passed the checks.
    pub x: HashSet<LocoState>,
    /// Best certified feasible length.
    pub l_tilde: f64,
    pub labels: HashMap<LocoState, Labels>,
    pub stats: PpnpStats,
}

struct Search<'a, S: ?Sized> {
    space: &'a S,
    heur: &'a Heuristics,
    q: &'a Query,
    pruning: Pruning,
    l_tilde: f64,
    labels: HashMap<LocoState, Labels>,
    /// Greedy min-beta completion from a state: (length, cost).
    completion: HashMap<LocoState, Option<(f64, f64)>>,
    stats: PpnpStats,
}

impl<'a, S: Space + ?Sized> Search<'a, S> {
    fn ilsp(&self, v: NodeId) -> bool {
        self.pruning.ilsp && self.heur.alpha_from_s[v as usize] + self.heur.alpha_to_t[v as usize] > self.q.budget + EPS
    }

    fn slsp(&self, v: NodeId) -> bool {
        self.pruning.slsp && self.heur.len_from_s[v as usize] + self.heur.len_to_t[v as usize] > self.l_tilde + EPS
    }

    fn ulsl(&self, st: LocoState, c_c: f64, l_l: f64) -> bool {
        let v = st.v_loc as usize;
        self.pruning.ulsl && (c_c + self.heur.alpha_to_t[v] > self.q.budget + EPS || l_l + self.heur.len_to_t[v] > self.l_tilde + EPS)
    }

    fn tighten(&mut self, len: f64) {
        if len < self.l_tilde - EPS {
            self.l_tilde = len;
            self.stats.bound_updates += 1;
        }
    }

    /// Tightens the bound from a label `(l, c)` at `st` when a feasible
    /// completion is certified.
    fn certify(&mut self, st: LocoState, l: f64, c: f64) {
        if st.v_loc == self.q.target {
            if self.q.within(c) {
                self.tighten(l);
            }
            return;
        }
        let v = st.v_loc as usize;
        if l + self.heur.len_to_t[v] >= self.l_tilde - EPS || !self.q.within(c + self.heur.beta_to_t[v]) {
            return;
        }
        let done = match self.completion.get(&st) {
            Some(d) => *d,
            None => {
                let d = self.heur.beta_path(st.v_loc).and_then(|nodes| {
                    let len = path_length(self.space.graph(), &nodes)?;
                    let p = greedy_realize(self.space, &nodes, st).ok()?;
                    Some((len, p.cost))
                });
                self.completion.insert(st, d);
                d
            }
        };
        if let Some((len, cost)) = done {
            if self.q.within(c + cost) {
                self.tighten(l + len);
            }
        }
    }

    /// Cheapest cost to every state inside the statically unpruned region.
    fn exact_costs(&self) -> HashMap<LocoState, (f64, f64, LocoState)> {
        let start = self.q.start;
        let mut dist: HashMap<LocoState, (f64, f64, LocoState)> = HashMap::new();
        let mut done: HashSet<LocoState> = HashSet::new();
        let mut heap = BinaryHeap::new();
        let mut buf: Vec<Hop> = Vec::new();
        dist.insert(start, (0.0, 0.0, start));
        heap.push(Reverse((Total(0.0), start)));
        while let Some(Reverse((Total(c), st))) = heap.pop() {
            if !done.insert(st) {
                continue;
            }
            if st.v_loc == self.q.target {
                continue;
            }
            let l = dist[&st].1;
            buf.clear();
            self.space.successors(st, &mut buf);
            for h in &buf {
                let nc = c + h.cost;
                if !self.q.within(nc) || self.ilsp(h.to.v_loc) || self.slsp(h.to.v_loc) {
                    continue;
                }
                if dist.get(&h.to).map_or(true, |d| nc < d.0) {
                    dist.insert(h.to, (nc, l + h.length, st));
                    heap.push(Reverse((Total(nc), h.to)));
                }
            }
        }
        dist
    }

    fn run(mut self, initial_bound: f64) -> PpnpResult {
        self.l_tilde = initial_bound;
        let start = self.q.start;
        self.labels.insert(start, Labels { l_l: 0.0, c_l: 0.0, l_c: 0.0, c_c: 0.0, pred_l: start, pred_c: start });
        let mut stack: Vec<LocoState> = alloc::vec![start];
        let mut active: HashSet<LocoState> = HashSet::new();
        active.insert(start);
        let mut locked: BTreeSet<LocoState> = BTreeSet::new();
        let mut visited: HashSet<LocoState> = HashSet::new();
        let mut discarded: HashSet<LocoState> = HashSet::new();
        let mut exempt: HashSet<LocoState> = HashSet::new();
        let mut exact: Option<HashMap<LocoState, (f64, f64, LocoState)>> = None;
        let mut buf: Vec<Hop> = Vec::new();
        loop {
            while let Some(st) = stack.pop() {
                active.remove(&st);
                if visited.contains(&st) || discarded.contains(&st) {
                    continue;
                }
                let v = st.v_loc;
                if self.ilsp(v) {
                    self.stats.ilsp.push(v);
                    discarded.insert(st);
                    continue;
                }
                if self.slsp(v) {
                    self.stats.slsp.push(v);
                    discarded.insert(st);
                    continue;
                }
                let lab = self.labels[&st];
                if !exempt.contains(&st) && self.ulsl(st, lab.c_c, lab.l_l) {
                    if locked.insert(st) {
                        self.stats.locks += 1;
                    }
                    continue;
                }
                visited.insert(st);
                if v == self.q.target {
                    continue;
                }
                buf.clear();
                self.space.successors(st, &mut buf);
                for h in buf.iter() {
                    let to = h.to;
                    if discarded.contains(&to) {
                        continue;
                    }
                    let (nl_l, nc_l, nl_c, nc_c) = (lab.l_l + h.length, lab.c_l + h.cost, lab.l_c + h.length, lab.c_c + h.cost);
                    let mut len_changed = false;
                    let mut cost_changed = false;
                    match self.labels.get_mut(&to) {
                        None => {
                            self.labels.insert(to, Labels { l_l: nl_l, c_l: nc_l, l_c: nl_c, c_c: nc_c, pred_l: st, pred_c: st });
                            len_changed = true;
                            cost_changed = true;
                        }
                        Some(t) => {
                            if nl_l < t.l_l - EPS || (nl_l <= t.l_l + EPS && nc_l < t.c_l - EPS) {
                                t.l_l = nl_l;
                                t.c_l = nc_l;
                                t.pred_l = st;
                                len_changed = true;
                            }
                            if nc_c < t.c_c - EPS || (nc_c <= t.c_c + EPS && nl_c < t.l_c - EPS) {
                                t.c_c = nc_c;
                                t.l_c = nl_c;
                                t.pred_c = st;
                                cost_changed = true;
                            }
                        }
                    }
                    if len_changed {
                        self.certify(to, nl_l, nc_l);
                    }
                    if cost_changed {
                        self.certify(to, nl_c, nc_c);
                    }
                    if (len_changed || cost_changed) && !visited.contains(&to) {
                        if locked.remove(&to) {
                            self.stats.unlocks += 1;
                        }
                        if active.insert(to) {
                            stack.push(to);
                        }
                    }
                }
            }
            if locked.is_empty() {
                break;
            }
            if exact.is_none() {
                self.stats.exact_rounds += 1;
                exact = Some(self.exact_costs());
            }
            let ex = exact.as_ref().unwrap();
            let mut reopened = Vec::new();
            for &st in &locked {
                let lab = self.labels.get_mut(&st).unwrap();
                if let Some(&(c, l, pred)) = ex.get(&st) {
                    if c < lab.c_c - EPS {
                        lab.c_c = c;
                        lab.l_c = l;
                        lab.pred_c = pred;
                    }
                }
                let (c_c, l_lb) = (lab.c_c, self.heur.len_from_s[st.v_loc as usize]);
                if !self.ulsl(st, c_c, l_lb) {
                    reopened.push(st);
                }
            }
            if reopened.is_empty() {
                break;
            }
            for st in reopened {
                locked.remove(&st);
                self.stats.unlocks += 1;
                // Exact labels passed; the next pop must not relock it.
                exempt.insert(st);
                active.insert(st);
                stack.push(st);
            }
        }
        PpnpResult { x: visited, l_tilde: self.l_tilde, labels: self.labels, stats: self.stats }
    }
}

/// Runs the pruning search from `q.start` with `initial_bound` as the first
/// known feasible length.
pub fn ppnp<S: Space + ?Sized>(space: &S, heur: &Heuristics, q: &Query, pruning: Pruning, initial_bound: f64) -> PpnpResult {
    Search {
        space,
        heur,
        q,
        pruning,
        l_tilde: initial_bound,
        labels: HashMap::new(),
        completion: HashMap::new(),
        stats: PpnpStats::default(),
    }
    .run(initial_bound)
}

//! Best-first search for the relaxed problem `min length + r * cost`.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Reverse;

use hashbrown::HashMap;

use super::heuristics::Heuristics;
use super::Ordering;
use crate::math::{self, Total, EPS};
use crate::space::{Hop, RwPath, Space};
use crate::state::LocoState;

#[derive(Clone, Debug, PartialEq)]
pub struct IdwsResult {
    pub path: Option<RwPath>,
    /// States in the order they were expanded.
    pub expanded: Vec<LocoState>,
}

/// Priority of a frontier state: quantized `f`, then `d_a - d_s`, then the
/// state itself.
pub type IdwsKey = (i64, Total, LocoState);

pub struct Idws<'a, S: ?Sized> {
    space: &'a S,
    heur: &'a Heuristics,
    r: f64,
    ordering: Ordering,
}

impl<'a, S: Space + ?Sized> Idws<'a, S> {
    pub fn new(space: &'a S, heur: &'a Heuristics, r: f64, ordering: Ordering) -> Self {
        Idws { space, heur, r, ordering }
    }

    /// Remaining-cost estimate `MRL + r * MRC`.
    pub fn h(&self, st: LocoState) -> f64 {
        if !self.ordering.teco {
            return 0.0;
        }
        let v = st.v_loc;
        let mrc = self.heur.mrc(v);
        if self.r == 0.0 {
            self.heur.mrl(v)
        } else {
            self.heur.mrl(v) + self.r * mrc
        }
    }

    /// `d_a - d_s` with disabled terms zeroed.
    pub fn tie(&self, st: LocoState) -> f64 {
        let g = self.space.graph();
        let p = g.pos(st.v_loc);
        let d_a = if self.ordering.vwno { p.dist(g.pos(self.heur.source)) + p.dist(g.pos(self.heur.target)) } else { 0.0 };
        let d_s = if self.ordering.pwso { self.space.clearance(st) } else { 0.0 };
        d_a - d_s
    }

    pub fn key(&self, st: LocoState, g: f64) -> IdwsKey {
        (math::quantize(g + self.h(st), EPS), Total(self.tie(st)), st)
    }

    pub fn run(&self, start: LocoState) -> IdwsResult {
        let target = self.heur.target;
        let mut best: HashMap<LocoState, (f64, f64, f64, Option<LocoState>)> = HashMap::new();
        let mut closed: hashbrown::HashSet<LocoState> = hashbrown::HashSet::new();
        let mut heap = BinaryHeap::new();
        let mut expanded = Vec::new();
        let mut buf: Vec<Hop> = Vec::new();
        best.insert(start, (0.0, 0.0, 0.0, None));
        heap.push(Reverse((self.key(start, 0.0), Total(0.0))));
        while let Some(Reverse(((_, _, st), Total(g)))) = heap.pop() {
            if closed.contains(&st) || best[&st].0 < g {
                continue;
            }
            if !self.h(st).is_finite() {
                continue;
            }
            closed.insert(st);
            if st.v_loc == target {
                return IdwsResult { path: Some(self.trace(&best, st)), expanded };
            }
            expanded.push(st);
            buf.clear();
            self.space.successors(st, &mut buf);
            let (_, l0, c0, _) = best[&st];
            for h in &buf {
                if closed.contains(&h.to) {
                    continue;
                }
                let ng = g + h.length + self.r * h.cost;
                let improve = best.get(&h.to).map_or(true, |b| ng < b.0);
                if improve {
                    best.insert(h.to, (ng, l0 + h.length, c0 + h.cost, Some(st)));
                    heap.push(Reverse((self.key(h.to, ng), Total(ng))));
                }
            }
        }
        IdwsResult { path: None, expanded }
    }

    fn trace(&self, best: &HashMap<LocoState, (f64, f64, f64, Option<LocoState>)>, end: LocoState) -> RwPath {
        let mut chain = alloc::vec![end];
        let mut cur = end;
        while let Some(p) = best[&cur].3 {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        let mut path = RwPath::start(chain[0]);
        for w in chain.windows(2) {
            let (a, b) = (best[&w[0]], best[&w[1]]);
            path.push(w[1], b.1 - a.1, b.2 - a.2);
        }
        path.length = best[&end].1;
        path.cost = best[&end].2;
        path
    }
}

/// Optimal path for the relaxed objective at multiplier `r`.
pub fn idws<S: Space + ?Sized>(space: &S, heur: &Heuristics, start: LocoState, r: f64, ordering: Ordering) -> IdwsResult {
    Idws::new(space, heur, r, ordering).run(start)
}

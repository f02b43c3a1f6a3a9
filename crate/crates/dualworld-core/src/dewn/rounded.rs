//! Length-rounded label DP over the trimmed space.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Reverse;

use hashbrown::{HashMap, HashSet};

use crate::exact::Query;
use crate::math::{self, Total};
use crate::space::{Hop, RwPath, Space};
use crate::state::LocoState;

#[derive(Clone, Debug, PartialEq)]
pub struct RoundedOutcome {
    pub path: Option<RwPath>,
    /// Rounding step.
    pub step: f64,
    /// Number of (state, rounded length) labels created.
    pub labels: usize,
}

struct Label {
    st: LocoState,
    length: f64,
    cost: f64,
    pred: Option<usize>,
}

/// Label DP where each hop length is rounded up to a multiple of
/// `eps * lower / |x|`; labels past `ceil(upper / step) + |x|` steps are
/// dropped. Only states in `x` are used.
pub fn rounded_dp<S: Space + ?Sized>(space: &S, q: &Query, x: &HashSet<LocoState>, lower: f64, upper: f64, eps: f64) -> RoundedOutcome {
    let n = x.len().max(1) as f64;
    let step = if lower > 0.0 { eps * lower / n } else { eps * upper.max(1.0) / n };
    let max_j = if upper.is_finite() { math::ceil(upper / step) as u64 + x.len() as u64 } else { u64::MAX };
    let steps = |l: f64| -> u64 {
        if l <= 0.0 {
            0
        } else {
            math::ceil(l / step - 1e-9).max(1.0) as u64
        }
    };

    let mut labels: Vec<Label> = Vec::new();
    let mut index: HashMap<(LocoState, u64), usize> = HashMap::new();
    let mut best_popped: HashMap<LocoState, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let mut buf: Vec<Hop> = Vec::new();

    if !x.contains(&q.start) {
        return RoundedOutcome { path: None, step, labels: 0 };
    }
    labels.push(Label { st: q.start, length: 0.0, cost: 0.0, pred: None });
    index.insert((q.start, 0), 0);
    heap.push(Reverse((0u64, Total(0.0), q.start, 0usize)));

    while let Some(Reverse((j, Total(c), st, i))) = heap.pop() {
        if labels[i].cost < c {
            continue;
        }
        // A label popped earlier for this state had no more steps and no
        // more cost.
        if best_popped.get(&st).map_or(false, |&b| b <= c) {
            continue;
        }
        best_popped.insert(st, c);
        if st.v_loc == q.target {
            let mut chain = Vec::new();
            let mut cur = Some(i);
            while let Some(k) = cur {
                chain.push(k);
                cur = labels[k].pred;
            }
            chain.reverse();
            let mut path = RwPath::start(q.start);
            for w in chain.windows(2) {
                let (a, b) = (&labels[w[0]], &labels[w[1]]);
                path.push(b.st, b.length - a.length, b.cost - a.cost);
            }
            path.length = labels[i].length;
            path.cost = labels[i].cost;
            return RoundedOutcome { path: Some(path), step, labels: labels.len() };
        }
        buf.clear();
        space.successors(st, &mut buf);
        for h in &buf {
            if !x.contains(&h.to) {
                continue;
            }
            let nj = j + steps(h.length);
            let nc = c + h.cost;
            if nj > max_j || !q.within(nc) {
                continue;
            }
            if best_popped.get(&h.to).map_or(false, |&b| b <= nc) {
                continue;
            }
            let nl = labels[i].length + h.length;
            match index.get(&(h.to, nj)) {
                Some(&k) => {
                    if nc < labels[k].cost {
                        labels[k] = Label { st: h.to, length: nl, cost: nc, pred: Some(i) };
                        heap.push(Reverse((nj, Total(nc), h.to, k)));
                    }
                }
                None => {
                    let k = labels.len();
                    labels.push(Label { st: h.to, length: nl, cost: nc, pred: Some(i) });
                    index.insert((h.to, nj), k);
                    heap.push(Reverse((nj, Total(nc), h.to, k)));
                }
            }
        }
    }
    RoundedOutcome { path: None, step, labels: labels.len() }
}

//! Per-query lower bounds on the virtual graph.

use alloc::vec::Vec;

use crate::mil::MilRange;
use crate::paths::dijkstra;
use crate::world::{NodeId, VirtualGraph};

/// Distances from the source and to the target under length, alpha and
/// beta edge weights. Edges whose length bin has no MIL entry are unusable
/// under alpha and beta.
#[derive(Clone, Debug)]
pub struct Heuristics {
    pub source: NodeId,
    pub target: NodeId,
    /// Shortest length from the source.
    pub len_from_s: Vec<f64>,
    /// Shortest length to the target (MRL).
    pub len_to_t: Vec<f64>,
    pub alpha_from_s: Vec<f64>,
    /// Cheapest alpha cost to the target (MRC).
    pub alpha_to_t: Vec<f64>,
    pub beta_to_t: Vec<f64>,
    /// Next hop toward the target on a min-beta path.
    pub beta_next: Vec<NodeId>,
}

impl Heuristics {
    pub fn new(g: &VirtualGraph, range: &MilRange, source: NodeId, target: NodeId) -> Self {
        let len = |_: NodeId, _: NodeId, l: f64| Some(l);
        let alpha = |_: NodeId, _: NodeId, l: f64| Some(range.alpha(l)).filter(|a| a.is_finite());
        let beta = |_: NodeId, _: NodeId, l: f64| Some(range.beta(l)).filter(|b| b.is_finite());
        let (beta_to_t, beta_next) = dijkstra(g, target, beta);
        Heuristics {
            source,
            target,
            len_from_s: dijkstra(g, source, len).0,
            len_to_t: dijkstra(g, target, len).0,
            alpha_from_s: dijkstra(g, source, alpha).0,
            alpha_to_t: dijkstra(g, target, alpha).0,
            beta_to_t,
            beta_next,
        }
    }

    pub fn mrl(&self, v: NodeId) -> f64 {
        self.len_to_t[v as usize]
    }

    pub fn mrc(&self, v: NodeId) -> f64 {
        self.alpha_to_t[v as usize]
    }

    /// Min-beta node sequence from `v` to the target.
    pub fn beta_path(&self, v: NodeId) -> Option<Vec<NodeId>> {
        if !self.beta_to_t[v as usize].is_finite() {
            return None;
        }
        let mut out = alloc::vec![v];
        let mut cur = v;
        while cur != self.target {
            cur = self.beta_next[cur as usize];
            out.push(cur);
        }
        Some(out)
    }
}

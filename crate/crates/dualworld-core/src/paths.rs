//! Shortest paths on the virtual graph alone.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::math::{Total, EPS};
use crate::world::{NodeId, VirtualGraph};

#[derive(Clone, Debug, PartialEq)]
pub struct VPath {
    pub nodes: Vec<NodeId>,
    pub weight: f64,
}

/// Single-source Dijkstra. `weight(u, v, length)` returns `None` to drop an
/// edge. Equal keys pop in node order; parents change only on strict
/// improvement.
pub fn dijkstra<W>(g: &VirtualGraph, source: NodeId, weight: W) -> (Vec<f64>, Vec<NodeId>)
where
    W: Fn(NodeId, NodeId, f64) -> Option<f64>,
{
    let n = g.node_count();
    let mut dist = alloc::vec![f64::INFINITY; n];
    let mut parent = alloc::vec![NodeId::MAX; n];
    let mut done = alloc::vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(Reverse((Total(0.0), source)));
    while let Some(Reverse((Total(d), u))) = heap.pop() {
        if done[u as usize] {
            continue;
        }
        done[u as usize] = true;
        for &(v, l) in g.neighbors(u) {
            if done[v as usize] {
                continue;
            }
            if let Some(w) = weight(u, v, l) {
                let nd = d + w;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    parent[v as usize] = u;
                    heap.push(Reverse((Total(nd), v)));
                }
            }
        }
    }
    (dist, parent)
}

fn trace(parent: &[NodeId], s: NodeId, t: NodeId) -> Vec<NodeId> {
    let mut nodes = alloc::vec![t];
    let mut cur = t;
    while cur != s {
        cur = parent[cur as usize];
        nodes.push(cur);
    }
    nodes.reverse();
    nodes
}

pub fn shortest_path<W>(g: &VirtualGraph, s: NodeId, t: NodeId, weight: W) -> Option<VPath>
where
    W: Fn(NodeId, NodeId, f64) -> Option<f64>,
{
    let (dist, parent) = dijkstra(g, s, weight);
    let d = dist[t as usize];
    if !d.is_finite() {
        return None;
    }
    Some(VPath { nodes: trace(&parent, s, t), weight: d })
}

/// Length-only distances from `s`.
pub fn length_distances(g: &VirtualGraph, s: NodeId) -> Vec<f64> {
    dijkstra(g, s, |_, _, l| Some(l)).0
}

/// Sum of edge lengths; `None` if some step is not an edge.
pub fn path_length(g: &VirtualGraph, nodes: &[NodeId]) -> Option<f64> {
    nodes.windows(2).map(|w| g.edge_length(w[0], w[1])).sum()
}

/// The `k` shortest loopless paths by length, in non-decreasing order.
pub fn yen_k_shortest(g: &VirtualGraph, s: NodeId, t: NodeId, k: usize) -> Vec<VPath> {
    let mut found: Vec<VPath> = Vec::new();
    if k == 0 {
        return found;
    }
    match shortest_path(g, s, t, |_, _, l| Some(l)) {
        Some(p) => found.push(p),
        None => return found,
    }
    // Candidates keyed by (length, nodes) so ties resolve lexicographically.
    let mut cands: BTreeSet<(Total, Vec<NodeId>)> = BTreeSet::new();
    while found.len() < k {
        let last = found.last().unwrap().nodes.clone();
        for i in 0..last.len() - 1 {
            let spur = last[i];
            let root = &last[..=i];
            let root_len = path_length(g, root).unwrap();
            let mut banned_edges: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
            for p in &found {
                if p.nodes.len() > i && p.nodes[..=i] == *root {
                    banned_edges.insert((p.nodes[i], p.nodes[i + 1]));
                }
            }
            let banned_nodes: BTreeSet<NodeId> = root[..i].iter().copied().collect();
            let spur_path = shortest_path(g, spur, t, |u, v, l| {
                if banned_nodes.contains(&u) || banned_nodes.contains(&v) || banned_edges.contains(&(u, v)) {
                    None
                } else {
                    Some(l)
                }
            });
            if let Some(sp) = spur_path {
                let mut nodes = root[..i].to_vec();
                nodes.extend_from_slice(&sp.nodes);
                let len = root_len + sp.weight;
                if !found.iter().any(|p| p.nodes == nodes) {
                    cands.insert((Total(len), nodes));
                }
            }
        }
        let Some((Total(len), nodes)) = cands.pop_first() else { break };
        found.push(VPath { nodes, weight: len });
    }
    found
}

/// Whether two path weights agree within the search tolerance.
pub fn same_weight(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS * (1.0 + a.abs().max(b.abs()))
}

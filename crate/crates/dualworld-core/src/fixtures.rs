//! Small hand-built table spaces with known answers, shared by tests, the
//! CLI and the acceptance suite.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::exact::Query;
use crate::geom::Point;
use crate::mil::MilRange;
use crate::space::RwPath;
use crate::state::LocoState;
use crate::table::TableSpace;
use crate::world::{NodeId, NodeKind, VNode, VirtualGraph};

fn graph(nodes: &[(&str, f64, f64)], edges: &[(NodeId, NodeId, f64)]) -> VirtualGraph {
    let nodes: Vec<VNode> = nodes.iter().map(|&(n, x, y)| VNode { pos: Point::new(x, y), kind: NodeKind::Poi(n.to_string()) }).collect();
    VirtualGraph::from_edges(nodes, edges, f64::INFINITY).expect("fixture graph is valid")
}

fn st(v: NodeId, vh: u16, p: u32, ph: u16) -> LocoState {
    LocoState::new(v, vh, p, ph)
}

/// Three routes from S to T: a short one and a medium one that are too
/// expensive, and a long one that fits a budget of 3.35 exactly.
#[derive(Clone, Debug)]
pub struct DetourBoard {
    pub space: TableSpace,
    pub query: Query,
    /// States of the cheap long route.
    pub route: Vec<LocoState>,
}

pub fn detour_board() -> DetourBoard {
    const S: NodeId = 0;
    const T: NodeId = 1;
    const A: NodeId = 2;
    const B: NodeId = 3;
    const C: NodeId = 4;
    const R1: NodeId = 5;
    const R2: NodeId = 6;
    const W1: NodeId = 7;
    const W2: NodeId = 8;
    let g = graph(
        &[("S", 2.0, 8.0), ("T", 10.0, 2.0), ("A", 6.0, 8.0), ("B", 12.0, 6.0), ("C", 12.0, 5.0), ("R1", 4.0, 5.0), ("R2", 7.0, 3.0), ("W1", 0.0, 3.0), ("W2", 4.0, 1.0)],
        &[
            (S, A, 4.0),
            (A, B, 6.32),
            (B, C, 1.0),
            (C, T, 3.61),
            (S, R1, 3.61),
            (R1, R2, 3.61),
            (R2, T, 3.61),
            (S, W1, 6.0),
            (W1, W2, 4.0),
            (W2, T, 4.17),
        ],
    );
    let mut sp = TableSpace::new(g);
    let s0 = st(S, 0, 0, 0);
    let route = alloc::vec![s0, st(A, 0, 1, 0), st(B, 7, 2, 6), st(C, 6, 3, 4), st(T, 5, 4, 3)];
    let costs = [0.17, 1.0, 1.18, 1.0];
    for (w, &c) in route.windows(2).zip(costs.iter()) {
        sp.add_transition(w[0], w[1], c).unwrap();
    }
    // A cheaper first step that leads into an expensive continuation.
    let a2 = st(A, 0, 5, 0);
    let b2 = st(B, 7, 6, 6);
    sp.add_transition(s0, a2, 0.0).unwrap();
    sp.add_transition(a2, b2, 3.0).unwrap();
    sp.add_transition(b2, route[3], 1.18).unwrap();
    // Short route, two realizations.
    let (r1, r2, t1) = (st(R1, 6, 7, 6), st(R2, 7, 8, 7), st(T, 7, 9, 7));
    sp.add_transition(s0, r1, 2.0).unwrap();
    sp.add_transition(r1, r2, 1.0).unwrap();
    sp.add_transition(r2, t1, 1.0).unwrap();
    let (r1b, r2b) = (st(R1, 6, 10, 5), st(R2, 7, 11, 6));
    sp.add_transition(s0, r1b, 1.5).unwrap();
    sp.add_transition(r1b, r2b, 1.5).unwrap();
    sp.add_transition(r2b, t1, 1.5).unwrap();
    sp.add_transition(r1b, r2, 1.5).unwrap();
    // Medium route.
    let (w1, w2, t2) = (st(W1, 5, 12, 5), st(W2, 7, 13, 7), st(T, 0, 14, 0));
    sp.add_transition(s0, w1, 1.2).unwrap();
    sp.add_transition(w1, w2, 1.2).unwrap();
    sp.add_transition(w2, t2, 1.2).unwrap();
    for p in 0..15 {
        sp.set_clearance(p, 0.5);
    }
    DetourBoard { space: sp, query: Query::new(s0, T, 3.35), route }
}

/// Named virtual nodes of [`lagrange_board`].
pub mod lnode {
    use crate::world::NodeId;
    pub const S: NodeId = 0;
    pub const T: NodeId = 1;
    pub const A: NodeId = 2;
    pub const B: NodeId = 3;
    pub const C: NodeId = 4;
    pub const D: NodeId = 5;
    pub const X: NodeId = 6;
    pub const G: NodeId = 7;
    pub const H: NodeId = 8;
    pub const E: NodeId = 9;
    pub const F: NodeId = 10;
}

/// A board with a prescribed MIL range on which the multiplier search, the
/// three pruning rules and the search ordering all have known outcomes.
#[derive(Clone, Debug)]
pub struct LagrangeBoard {
    pub space: TableSpace,
    pub range: MilRange,
    pub query: Query,
    /// In-place Reset at the start.
    pub st1: LocoState,
    /// Cheap dead end one hop toward D.
    pub st2: LocoState,
    /// Expensive dead end at E.
    pub st3: LocoState,
    /// Feasible S-D-E-F-T path of length 14.3 and cost 5.
    pub reference: RwPath,
    /// Cheapest states of the shortest route S-D-X-G-T.
    pub route: Vec<LocoState>,
}

pub fn lagrange_board() -> LagrangeBoard {
    use lnode::*;
    let g = graph(
        &[
            ("S", 2.0, 8.0),
            ("T", 10.0, 2.0),
            ("A", 6.0, 8.0),
            ("B", 12.0, 6.0),
            ("C", 12.0, 5.0),
            ("D", 3.0, 6.0),
            ("X", 4.0, 4.0),
            ("G", 6.0, 3.0),
            ("H", 6.0, 6.0),
            ("E", 3.0, 1.0),
            ("F", 5.0, 1.0),
        ],
        &[
            (S, A, 4.0),
            (A, B, 6.3),
            (B, C, 1.0),
            (C, T, 3.6),
            (S, D, 2.2),
            (D, X, 2.2),
            (X, G, 2.2),
            (G, T, 4.1),
            (A, H, 2.0),
            (D, H, 3.0),
            (H, G, 3.0),
            (S, E, 7.1),
            (E, F, 2.0),
            (D, E, 5.0),
            (F, T, 5.1),
            (F, G, 2.2),
            (G, B, 6.7),
        ],
    );
    let mut range = MilRange::new(0.1);
    for &(l, a, b) in &[
        (1.0, 0.0, 1.0),
        (1.4, 0.0, 2.0),
        (2.0, 0.0, 3.0),
        (2.2, 1.0, 3.0),
        (3.0, 2.0, 3.0),
        (3.6, 2.0, 3.0),
        (4.0, 2.0, 3.0),
        (4.1, 2.0, 3.0),
        (5.0, 2.0, 4.0),
        (5.1, 2.0, 4.0),
        (6.0, 3.0, 4.0),
        (6.3, 3.0, 4.0),
        (6.7, 0.0, 6.0),
        (7.1, 3.0, 5.0),
        (8.1, 4.0, 7.0),
    ] {
        range.set(l, a, b);
    }
    // Physical locations: 0 start, 1 (2,4), 2 (3,2), 3 (3,1), others free.
    let mut sp = TableSpace::new(g);
    let s0 = st(S, 0, 0, 0);
    let st1 = st(S, 4, 1, 4);
    let st2 = st(D, 7, 2, 7);
    let st3 = st(E, 6, 3, 6);
    sp.add_transition(s0, st1, 4.5 / 4.2).unwrap();
    sp.add_transition(s0, st2, 0.0).unwrap();
    sp.add_transition(s0, st3, 13.6 / 4.2).unwrap();

    // Shortest route; X is reachable two ways so G is first seen at cost 4.
    let d1 = st(D, 7, 4, 7);
    let x1 = st(X, 6, 5, 6);
    let x2 = st(X, 6, 6, 6);
    let g1 = st(G, 7, 7, 7);
    let t1 = st(T, 7, 8, 7);
    sp.add_transition(s0, d1, 1.0).unwrap();
    sp.add_transition(d1, x1, 1.0).unwrap();
    sp.add_transition(d1, x2, 1.5).unwrap();
    sp.add_transition(x1, g1, 1.0).unwrap();
    sp.add_transition(x2, g1, 1.5).unwrap();
    sp.add_transition(g1, t1, 2.0).unwrap();

    // Long feasible route through E and F.
    let e2 = st(E, 6, 9, 6);
    let f1 = st(F, 0, 10, 0);
    let t2 = st(T, 1, 11, 1);
    sp.add_transition(d1, e2, 1.5).unwrap();
    sp.add_transition(e2, f1, 0.5).unwrap();
    sp.add_transition(f1, t2, 2.0).unwrap();

    // Detours that the pruning rules remove.
    let a1 = st(A, 0, 12, 0);
    let h1 = st(H, 0, 13, 0);
    let b1 = st(B, 1, 14, 1);
    let c1 = st(C, 6, 15, 6);
    let t3 = st(T, 5, 16, 5);
    sp.add_transition(s0, a1, 2.0).unwrap();
    sp.add_transition(a1, h1, 0.5).unwrap();
    sp.add_transition(d1, h1, 2.0).unwrap();
    sp.add_transition(h1, g1, 2.0).unwrap();
    sp.add_transition(a1, b1, 3.0).unwrap();
    sp.add_transition(g1, b1, 0.5).unwrap();
    sp.add_transition(b1, c1, 0.5).unwrap();
    sp.add_transition(c1, t3, 2.0).unwrap();

    for p in 0..17 {
        sp.set_clearance(p, 0.5);
    }
    sp.set_clearance(1, 1.0);
    sp.set_clearance(3, 1.0);
    sp.set_range(range.clone());

    let mut reference = RwPath::start(s0);
    reference.push(d1, 2.2, 1.0);
    reference.push(e2, 5.0, 1.5);
    reference.push(f1, 2.0, 0.5);
    reference.push(t2, 5.1, 2.0);

    LagrangeBoard { space: sp, range, query: Query::new(s0, T, 5.5), st1, st2, st3, reference, route: alloc::vec![s0, d1, x1, g1, t1] }
}

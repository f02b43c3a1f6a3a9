//! Spaces whose transitions come from the operation catalog: an optional
//! Reset, an optional Rotation, then one Translation or Curvature walk.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;

use hashbrown::HashMap;

use crate::grid::{path_clear_physical, PhysicalGrid};
use crate::kinematics::{self, operation_cost, walk_curve, CostModel, Interval, OperationSequence, RwOp, Worlds};
use crate::math::{self, EPS};
use crate::mil::MilRange;
use crate::orient::OrientationSet;
use crate::space::{Hop, Space};
use crate::state::LocoState;
use crate::world::VirtualGraph;

/// Discretized gains tried by the catalog search.
#[derive(Clone, Debug, PartialEq)]
pub struct GainGrids {
    pub translation: Vec<f64>,
    pub rotation: Vec<f64>,
    pub curvature: Vec<f64>,
}

fn spread(iv: &Interval, count: usize, identity: f64, positive: bool) -> Vec<f64> {
    let (c, h) = (iv.center(), 2.0 * iv.half_width());
    let mut v: Vec<f64> = if count <= 1 {
        alloc::vec![c]
    } else {
        (0..count).map(|i| c + h * (2.0 * i as f64 / (count - 1) as f64 - 1.0)).collect()
    };
    v.push(identity);
    if positive {
        v.retain(|&g| g > EPS);
    }
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    v
}

impl GainGrids {
    /// `count` values per gain, centered on the non-detectable interval and
    /// spanning twice its half-width either side, plus the identity gain.
    pub fn from_model(model: &CostModel, count: usize) -> Self {
        let t = &model.thresholds;
        GainGrids {
            translation: spread(&t.translation, count, 1.0, true),
            rotation: spread(&t.rotation, count, 1.0, true),
            curvature: spread(&t.curvature, count, 0.0, false),
        }
    }

    /// Identity gains only.
    pub fn identity() -> Self {
        GainGrids { translation: alloc::vec![1.0], rotation: alloc::vec![1.0], curvature: alloc::vec![0.0] }
    }
}

/// One way to walk an edge from a cell at a fixed physical heading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Walk {
    pub cell: u32,
    pub heading: u16,
    pub cost: f64,
    pub op: RwOp,
}

/// Walk outcomes keyed by (quantized length, cell, heading).
pub type WalkKey = (i64, u32, u16);

/// Cache for walk outcomes. Implementations decide on sharing.
pub trait WalkMemo {
    fn walks(&self, key: WalkKey, compute: &dyn Fn() -> Vec<Walk>) -> Arc<[Walk]>;
}

/// Recomputes every time.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoMemo;

impl WalkMemo for NoMemo {
    fn walks(&self, _key: WalkKey, compute: &dyn Fn() -> Vec<Walk>) -> Arc<[Walk]> {
        Arc::from(compute())
    }
}

/// Single-threaded cache.
#[derive(Debug, Default)]
pub struct LocalMemo {
    map: RefCell<HashMap<WalkKey, Arc<[Walk]>>>,
}

impl WalkMemo for LocalMemo {
    fn walks(&self, key: WalkKey, compute: &dyn Fn() -> Vec<Walk>) -> Arc<[Walk]> {
        if let Some(w) = self.map.borrow().get(&key) {
            return w.clone();
        }
        let w: Arc<[Walk]> = Arc::from(compute());
        self.map.borrow_mut().insert(key, w.clone());
        w
    }
}

fn heading_toward(worlds: &Worlds, v: u32, u: u32, length: f64) -> Option<u16> {
    let h = worlds.orient.snap(worlds.graph.pos(v).bearing(worlds.graph.pos(u)));
    (kinematics::virtual_step(worlds, v, h, length) == Some(u)).then_some(h)
}

/// The graph restricted to edges walkable unambiguously both ways on the
/// heading lattice.
pub fn walkable_graph(worlds: &Worlds) -> VirtualGraph {
    let g = &worlds.graph;
    let mut edges = Vec::new();
    for v in 0..g.node_count() as u32 {
        for &(u, l) in g.neighbors(v) {
            if u > v && heading_toward(worlds, v, u, l).is_some() && heading_toward(worlds, u, v, l).is_some() {
                edges.push((v, u, l));
            }
        }
    }
    VirtualGraph::from_edges(g.nodes().to_vec(), &edges, g.cutoff()).expect("subgraph of a valid graph")
}

/// How the physical heading changes before a walk.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Reorient {
    cost: f64,
    reset_deg: Option<f64>,
    rotation_gain: Option<f64>,
}

pub struct KinematicSpace<M = LocalMemo> {
    worlds: Worlds,
    model: CostModel,
    gains: GainGrids,
    /// Indexed by `virtual turn (mod k) * k + physical turn (mod k)`.
    reorient: Vec<Option<Reorient>>,
    memo: M,
}

impl KinematicSpace<LocalMemo> {
    pub fn new(worlds: Worlds, model: CostModel, gains: GainGrids) -> Self {
        KinematicSpace::with_memo(worlds, model, gains, LocalMemo::default())
    }
}

impl<M: WalkMemo> KinematicSpace<M> {
    /// Edges that no lattice heading can walk unambiguously in both
    /// directions are dropped from the virtual graph.
    pub fn with_memo(mut worlds: Worlds, model: CostModel, gains: GainGrids, memo: M) -> Self {
        worlds.graph = walkable_graph(&worlds);
        let reorient = build_reorient(&worlds.orient, &model, &gains);
        KinematicSpace { worlds, model, gains, reorient, memo }
    }

    pub fn worlds(&self) -> &Worlds {
        &self.worlds
    }

    pub fn grid(&self) -> &PhysicalGrid {
        &self.worlds.grid
    }

    pub fn orient(&self) -> &OrientationSet {
        &self.worlds.orient
    }

    pub fn model(&self) -> &CostModel {
        &self.model
    }

    pub fn gains(&self) -> &GainGrids {
        &self.gains
    }

    /// Whether the state sits on a valid node and a free cell.
    pub fn is_valid(&self, st: LocoState) -> bool {
        let k = self.worlds.orient.count();
        (st.v_loc as usize) < self.worlds.graph.node_count()
            && self.worlds.grid.is_free(st.p_loc)
            && st.v_heading < k
            && st.p_heading < k
    }

    /// Every valid loco-state, in order.
    pub fn all_states(&self) -> Vec<LocoState> {
        let k = self.worlds.orient.count();
        let cells: Vec<u32> = self.worlds.grid.free_cells().collect();
        let mut out = Vec::new();
        for v in 0..self.worlds.graph.node_count() as u32 {
            for vh in 0..k {
                for &p in &cells {
                    for ph in 0..k {
                        out.push(LocoState::new(v, vh, p, ph));
                    }
                }
            }
        }
        out
    }

    fn reorient_at(&self, dv: i32, dp: i32) -> Option<Reorient> {
        let k = self.worlds.orient.count() as i32;
        self.reorient[(dv.rem_euclid(k) * k + dp.rem_euclid(k)) as usize]
    }

    /// Heading of the walk toward `u`, if walking that heading for the edge
    /// length from `v` lands on `u` and nowhere else.
    fn walk_heading(&self, v: u32, u: u32, length: f64) -> Option<u16> {
        heading_toward(&self.worlds, v, u, length)
    }

    /// Cheapest walk outcome per (cell, heading) for an edge of `length`
    /// starting at `cell` facing `heading`.
    pub fn walks(&self, length: f64, cell: u32, heading: u16) -> Arc<[Walk]> {
        let key = (math::quantize(length, EPS), cell, heading);
        self.memo.walks(key, &|| self.compute_walks(length, cell, heading))
    }

    fn compute_walks(&self, length: f64, cell: u32, heading: u16) -> Vec<Walk> {
        let grid = &self.worlds.grid;
        let orient = &self.worlds.orient;
        let mut out: Vec<Walk> = Vec::new();
        let mut consider = |op: RwOp, curvature: f64, walk_len: f64| {
            let curve = walk_curve(grid, orient, cell, heading, curvature, walk_len);
            let Some(end) = grid.cell_of(curve.end()) else { return };
            if !grid.is_free(end) || !path_clear_physical(grid, &curve) {
                return;
            }
            let h = orient.snap(orient.degrees(heading) + math::to_deg(curvature * walk_len));
            let cost = operation_cost(&op, &self.model);
            match out.iter_mut().find(|w| w.cell == end && w.heading == h) {
                Some(w) if cost < w.cost => {
                    w.cost = cost;
                    w.op = op;
                }
                Some(_) => {}
                None => out.push(Walk { cell: end, heading: h, cost, op }),
            }
        };
        for &g in &self.gains.translation {
            let l = length / g;
            consider(RwOp::Translation { gain: g, length: l }, 0.0, l);
        }
        for &g in self.gains.curvature.iter().filter(|&&g| g != 0.0) {
            consider(RwOp::Curvature { gain: g, length }, g, length);
        }
        out.sort_by(|a, b| (a.cell, a.heading).cmp(&(b.cell, b.heading)));
        out
    }

    /// Identity-gain straight walk of `length` from `cell` facing `heading`.
    fn straight_walk(&self, length: f64, cell: u32, heading: u16) -> Option<Walk> {
        let grid = &self.worlds.grid;
        let curve = walk_curve(grid, &self.worlds.orient, cell, heading, 0.0, length);
        let end = grid.cell_of(curve.end())?;
        if !grid.is_free(end) || !path_clear_physical(grid, &curve) {
            return None;
        }
        let op = RwOp::Translation { gain: 1.0, length };
        Some(Walk { cell: end, heading, cost: operation_cost(&op, &self.model), op })
    }

    /// Hop to `next` that turns physically by the virtual turn, walks
    /// straight with identity gains, and inserts the smallest Reset that
    /// clears the walk when the plain walk collides.
    pub fn reset_step(&self, st: LocoState, next: u32) -> Option<Hop> {
        let g = &self.worlds.graph;
        let o = &self.worlds.orient;
        let k = o.count() as i32;
        let length = g.edge_length(st.v_loc, next)?;
        let hv = self.walk_heading(st.v_loc, next, length)?;
        let dv = o.diff(st.v_heading, hv);
        let turn = if dv == 0 {
            0.0
        } else {
            operation_cost(&RwOp::Rotation { gain: 1.0, turn_deg: o.delta_degrees(dv) }, &self.model)
        };
        let base = st.p_heading as i32 + dv;
        // Reset offsets by increasing magnitude, counter-clockwise first.
        let offsets = core::iter::once(0).chain((1..=k / 2).flat_map(move |r| [r, -r])).take(k as usize);
        for r in offsets {
            let h = (base + r).rem_euclid(k) as u16;
            let Some(w) = self.straight_walk(length, st.p_loc, h) else { continue };
            let reset = if r == 0 {
                0.0
            } else {
                operation_cost(&RwOp::Reset { angle_deg: math::wrap_signed(o.delta_degrees(r)) }, &self.model)
            };
            let to = LocoState::new(next, hv, w.cell, w.heading);
            return Some(Hop { to, length, cost: turn + reset + w.cost });
        }
        None
    }

    fn min_walk(&self, length: f64, cell: u32, heading: u16) -> f64 {
        self.walks(length, cell, heading).iter().map(|w| w.cost).fold(f64::INFINITY, f64::min)
    }

    /// Distinct edge lengths of the virtual graph.
    fn edge_lengths(&self) -> Vec<f64> {
        let g = &self.worlds.graph;
        let mut ls: Vec<f64> = (0..g.node_count() as u32)
            .flat_map(|v| g.neighbors(v).iter().filter(move |e| e.0 > v).map(|e| e.1))
            .collect();
        ls.sort_by(|a, b| a.total_cmp(b));
        ls.dedup_by(|a, b| (*a - *b).abs() <= EPS);
        ls
    }

    fn range(&self, quantum: f64, collapsed: bool) -> MilRange {
        let k = self.worlds.orient.count() as i32;
        let cells: Vec<u32> = self.worlds.grid.free_cells().collect();
        let mut range = MilRange::new(quantum);
        let mut mw = alloc::vec![f64::INFINITY; k as usize];
        for l in self.edge_lengths() {
            for &p in &cells {
                for h in 0..k as u16 {
                    mw[h as usize] = self.min_walk(l, p, h);
                }
                let best = mw.iter().copied().fold(f64::INFINITY, f64::min);
                if !best.is_finite() {
                    continue;
                }
                range.observe_alpha(l, best);
                if collapsed {
                    range.observe_beta(l, best);
                    continue;
                }
                for dv in 0..k {
                    for hp in 0..k {
                        let mut m = f64::INFINITY;
                        for h2 in 0..k {
                            if let Some(r) = self.reorient_at(dv, h2 - hp) {
                                m = m.min(r.cost + mw[h2 as usize]);
                            }
                        }
                        if m.is_finite() {
                            range.observe_beta(l, m);
                        }
                    }
                }
            }
        }
        range
    }

    fn ops_for(&self, from: LocoState, to: LocoState) -> Option<(f64, Vec<RwOp>)> {
        let g = &self.worlds.graph;
        let length = g.edge_length(from.v_loc, to.v_loc)?;
        let hv = self.walk_heading(from.v_loc, to.v_loc, length)?;
        if hv != to.v_heading {
            return None;
        }
        let o = &self.worlds.orient;
        let dv = o.diff(from.v_heading, hv);
        let mut best: Option<(f64, Vec<RwOp>)> = None;
        for h2 in o.iter() {
            let Some(r) = self.reorient_at(dv, h2 as i32 - from.p_heading as i32) else { continue };
            for w in self.walks(length, from.p_loc, h2).iter() {
                if w.cell != to.p_loc || w.heading != to.p_heading {
                    continue;
                }
                let c = r.cost + w.cost;
                if best.as_ref().map_or(true, |b| c < b.0) {
                    let mut ops = Vec::new();
                    if let Some(a) = r.reset_deg {
                        ops.push(RwOp::Reset { angle_deg: a });
                    }
                    if let Some(gain) = r.rotation_gain {
                        ops.push(RwOp::Rotation { gain, turn_deg: o.delta_degrees(dv) / gain });
                    }
                    ops.push(w.op);
                    best = Some((c, ops));
                }
            }
        }
        best
    }
}

/// Cheapest reorientation for every (virtual turn, physical turn) pair,
/// using at most one Reset followed by at most one Rotation.
fn build_reorient(o: &OrientationSet, model: &CostModel, gains: &GainGrids) -> Vec<Option<Reorient>> {
    let k = o.count() as i32;
    let mut table: Vec<Option<Reorient>> = alloc::vec![None; (k * k) as usize];
    let resets = core::iter::once(None).chain((1..k).map(Some));
    for reset in resets {
        let (reset_deg, reset_cost, reset_dp) = match reset {
            None => (None, 0.0, 0),
            Some(r) => {
                let deg = math::wrap_signed(o.delta_degrees(r));
                (Some(deg), operation_cost(&RwOp::Reset { angle_deg: deg }, model), r)
            }
        };
        for dv in 0..k {
            let vdeg = o.delta_degrees(o.diff(0, dv as u16));
            let rotations: Vec<Option<f64>> = if dv == 0 { alloc::vec![None] } else { gains.rotation.iter().map(|&g| Some(g)).collect() };
            for rot in rotations {
                let (rot_cost, rot_dp) = match rot {
                    None => (0.0, 0),
                    Some(g) => {
                        let op = RwOp::Rotation { gain: g, turn_deg: vdeg / g };
                        (operation_cost(&op, model), o.snap(vdeg / g) as i32)
                    }
                };
                let dp = (reset_dp + rot_dp).rem_euclid(k);
                let cost = reset_cost + rot_cost;
                let slot = &mut table[(dv * k + dp) as usize];
                if slot.map_or(true, |s| cost < s.cost) {
                    *slot = Some(Reorient { cost, reset_deg, rotation_gain: rot });
                }
            }
        }
    }
    table
}

impl<M: WalkMemo> Space for KinematicSpace<M> {
    fn graph(&self) -> &VirtualGraph {
        &self.worlds.graph
    }

    fn successors(&self, st: LocoState, out: &mut Vec<Hop>) {
        let g = &self.worlds.graph;
        let o = &self.worlds.orient;
        let k = o.count();
        let start = out.len();
        for &(u, length) in g.neighbors(st.v_loc) {
            let Some(hv) = self.walk_heading(st.v_loc, u, length) else { continue };
            let dv = o.diff(st.v_heading, hv);
            let first = out.len();
            for h2 in 0..k {
                let Some(r) = self.reorient_at(dv, h2 as i32 - st.p_heading as i32) else { continue };
                for w in self.walks(length, st.p_loc, h2).iter() {
                    let to = LocoState::new(u, hv, w.cell, w.heading);
                    let cost = r.cost + w.cost;
                    match out[first..].iter_mut().find(|h| h.to == to) {
                        Some(h) => h.cost = h.cost.min(cost),
                        None => out.push(Hop { to, length, cost }),
                    }
                }
            }
        }
        out[start..].sort_by(|a, b| a.to.cmp(&b.to));
    }

    fn operations(&self, from: LocoState, to: LocoState) -> Option<OperationSequence> {
        let (cost, ops) = self.ops_for(from, to)?;
        Some(OperationSequence { ops, total_cost: cost })
    }

    fn clearance(&self, st: LocoState) -> f64 {
        self.worlds.grid.clearance(st.p_loc)
    }

    fn mil_range(&self, quantum: f64) -> MilRange {
        self.range(quantum, false)
    }

    fn cos_successors(&self, st: LocoState, out: &mut Vec<Hop>) {
        let g = &self.worlds.graph;
        let k = self.worlds.orient.count();
        let start = out.len();
        for &(u, length) in g.neighbors(st.v_loc) {
            if self.walk_heading(st.v_loc, u, length).is_none() {
                continue;
            }
            let first = out.len();
            for h2 in 0..k {
                for w in self.walks(length, st.p_loc, h2).iter() {
                    let to = LocoState::new(u, 0, w.cell, 0);
                    match out[first..].iter_mut().find(|h| h.to == to) {
                        Some(h) => h.cost = h.cost.min(w.cost),
                        None => out.push(Hop { to, length, cost: w.cost }),
                    }
                }
            }
        }
        out[start..].sort_by(|a, b| a.to.cmp(&b.to));
    }

    fn cos_mil_range(&self, quantum: f64) -> MilRange {
        self.range(quantum, true)
    }

    fn max_correction_cost(&self) -> f64 {
        self.reorient.iter().flatten().map(|r| r.cost).fold(0.0, f64::max)
    }
}

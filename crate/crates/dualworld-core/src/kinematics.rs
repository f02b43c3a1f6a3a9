//! Redirected-walking operations, their transition function and cost models.

use alloc::vec::Vec;

use crate::geom::Point;
use crate::grid::{path_clear_physical, Curve, PhysicalGrid};
use crate::math::{self, EPS};
use crate::orient::OrientationSet;
use crate::state::LocoState;
use crate::world::VirtualGraph;

/// One redirected-walking operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RwOp {
    /// Walk `length` physical meters; the virtual pose advances `gain * length`.
    Translation { gain: f64, length: f64 },
    /// Physical turn of `turn_deg`; the virtual heading turns `gain * turn_deg`.
    Rotation { gain: f64, turn_deg: f64 },
    /// Walk `length` meters straight in the virtual world while the
    /// physical path bends at `gain` rad/m.
    Curvature { gain: f64, length: f64 },
    /// Physical turn in place while the virtual view is frozen.
    Reset { angle_deg: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    Translation,
    Rotation,
    Curvature,
    Reset,
}

impl RwOp {
    pub fn kind(&self) -> OpKind {
        match self {
            RwOp::Translation { .. } => OpKind::Translation,
            RwOp::Rotation { .. } => OpKind::Rotation,
            RwOp::Curvature { .. } => OpKind::Curvature,
            RwOp::Reset { .. } => OpKind::Reset,
        }
    }

    pub fn magnitude(&self) -> f64 {
        match *self {
            RwOp::Translation { gain, .. } | RwOp::Rotation { gain, .. } | RwOp::Curvature { gain, .. } => gain,
            RwOp::Reset { angle_deg } => angle_deg,
        }
    }

    pub fn walk_length(&self) -> f64 {
        match *self {
            RwOp::Translation { length, .. } | RwOp::Curvature { length, .. } => length,
            _ => 0.0,
        }
    }

    /// Whether the operation leaves both worlds moving identically.
    pub fn is_identity(&self) -> bool {
        match *self {
            RwOp::Translation { gain, .. } => gain == 1.0,
            RwOp::Rotation { gain, turn_deg } => gain == 1.0 || turn_deg == 0.0,
            RwOp::Curvature { gain, .. } => gain == 0.0,
            RwOp::Reset { angle_deg } => angle_deg == 0.0,
        }
    }
}

/// A real interval whose ends may be open or closed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub const fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: false }
    }

    pub const fn open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: true, hi_open: true }
    }

    pub fn contains(&self, z: f64) -> bool {
        let above = if self.lo_open { z > self.lo } else { z >= self.lo };
        let below = if self.hi_open { z < self.hi } else { z <= self.hi };
        above && below
    }

    /// Distance from `z` to the interval, 0 inside.
    pub fn excess(&self, z: f64) -> f64 {
        if z < self.lo {
            self.lo - z
        } else if z > self.hi {
            z - self.hi
        } else {
            0.0
        }
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostKind {
    UsageCount,
    DetectionLikelihood,
    DetectionThreshold,
    /// User-supplied piecewise-linear curves.
    Custom,
}

/// Per-gain values for translation, rotation and curvature.
#[derive(Clone, Debug, PartialEq)]
pub struct PerGain<T> {
    pub translation: T,
    pub rotation: T,
    pub curvature: T,
}

impl<T> PerGain<T> {
    pub fn get(&self, kind: OpKind) -> Option<&T> {
        match kind {
            OpKind::Translation => Some(&self.translation),
            OpKind::Rotation => Some(&self.rotation),
            OpKind::Curvature => Some(&self.curvature),
            OpKind::Reset => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostModel {
    pub kind: CostKind,
    pub reset_cost: f64,
    pub reset_angle_weighted: bool,
    /// Non-detectable gain intervals.
    pub thresholds: PerGain<Interval>,
    /// Likelihood rises linearly from 0 at the interval edge to 1 this far
    /// outside it.
    pub ramp: PerGain<f64>,
    /// Points `(gain, cost)` for `CostKind::Custom`, sorted by gain.
    pub custom: PerGain<Vec<(f64, f64)>>,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            kind: CostKind::DetectionThreshold,
            reset_cost: 1.0,
            reset_angle_weighted: false,
            thresholds: PerGain {
                translation: Interval::closed(0.78, 1.22),
                rotation: Interval::open(0.77, 1.10),
                curvature: Interval::closed(-1.0 / 7.5, 1.0 / 7.5),
            },
            ramp: PerGain { translation: 0.2, rotation: 0.2, curvature: 1.0 / 7.5 },
            custom: PerGain { translation: Vec::new(), rotation: Vec::new(), curvature: Vec::new() },
        }
    }
}

impl CostModel {
    pub fn with_kind(kind: CostKind) -> Self {
        CostModel { kind, ..CostModel::default() }
    }
}

fn interpolate(curve: &[(f64, f64)], z: f64) -> f64 {
    match curve {
        [] => 0.0,
        [(_, c)] => *c,
        _ => {
            if z <= curve[0].0 {
                return curve[0].1;
            }
            for w in curve.windows(2) {
                let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                if z <= x1 {
                    let t = if x1 > x0 { (z - x0) / (x1 - x0) } else { 1.0 };
                    return y0 + t * (y1 - y0);
                }
            }
            curve[curve.len() - 1].1
        }
    }
}

/// Cost of a single operation. Walking operations are weighted by the
/// distance walked, except under usage counting.
pub fn operation_cost(op: &RwOp, model: &CostModel) -> f64 {
    if op.is_identity() {
        return 0.0;
    }
    if let RwOp::Reset { angle_deg } = *op {
        let w = if model.reset_angle_weighted { angle_deg.abs() / 180.0 } else { 1.0 };
        return model.reset_cost * w;
    }
    let kind = op.kind();
    let z = op.magnitude();
    let per_unit = match model.kind {
        CostKind::UsageCount => return 1.0,
        CostKind::DetectionThreshold => {
            if model.thresholds.get(kind).unwrap().contains(z) {
                0.0
            } else {
                1.0
            }
        }
        CostKind::DetectionLikelihood => {
            let iv = model.thresholds.get(kind).unwrap();
            if iv.contains(z) {
                0.0
            } else {
                let ramp = *model.ramp.get(kind).unwrap();
                if ramp <= 0.0 {
                    1.0
                } else {
                    (iv.excess(z) / ramp).min(1.0)
                }
            }
        }
        CostKind::Custom => interpolate(model.custom.get(kind).unwrap(), z).max(0.0),
    };
    match kind {
        OpKind::Translation | OpKind::Curvature => per_unit * op.walk_length(),
        _ => per_unit,
    }
}

/// An ordered operation list with its summed cost.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OperationSequence {
    pub ops: Vec<RwOp>,
    pub total_cost: f64,
}

impl OperationSequence {
    pub fn new(ops: Vec<RwOp>, model: &CostModel) -> Self {
        let total_cost = ops.iter().map(|o| operation_cost(o, model)).sum();
        OperationSequence { ops, total_cost }
    }
}

/// Both worlds and the shared heading lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct Worlds {
    pub graph: VirtualGraph,
    pub grid: PhysicalGrid,
    pub orient: OrientationSet,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ApplyError {
    #[error("physical position leaves the room")]
    OutOfWorld,
    #[error("physical path hits an obstacle")]
    Collision,
    #[error("virtual move does not follow a graph edge")]
    OffGraph,
}

/// Tolerance when matching a virtual walk to a graph edge.
pub const EDGE_MATCH_TOL: f64 = 1e-6;

/// The neighbor reached by walking `dist` meters along heading `h`.
pub fn virtual_step(worlds: &Worlds, from: u32, h: u16, dist: f64) -> Option<u32> {
    if dist <= EPS {
        return Some(from);
    }
    let g = &worlds.graph;
    let p = g.pos(from);
    g.neighbors(from)
        .iter()
        .find(|&&(u, l)| (l - dist).abs() <= EDGE_MATCH_TOL && worlds.orient.snap(p.bearing(g.pos(u))) == h)
        .map(|&(u, _)| u)
}

/// Physical curve for a walk of `length` from the center of `cell`.
pub fn walk_curve(grid: &PhysicalGrid, orient: &OrientationSet, cell: u32, heading: u16, curvature: f64, length: f64) -> Curve {
    let start = grid.center(cell);
    let deg = orient.degrees(heading);
    if curvature == 0.0 {
        let t = math::to_rad(deg);
        Curve::Segment { a: start, b: Point::new(start.x + length * math::cos(t), start.y + length * math::sin(t)) }
    } else {
        Curve::Arc { start, heading_deg: deg, curvature, length }
    }
}

fn physical_walk(worlds: &Worlds, st: LocoState, curvature: f64, length: f64) -> Result<(u32, u16), ApplyError> {
    let curve = walk_curve(&worlds.grid, &worlds.orient, st.p_loc, st.p_heading, curvature, length);
    let end = curve.end();
    if !worlds.grid.bounds().contains(end) {
        return Err(ApplyError::OutOfWorld);
    }
    if !path_clear_physical(&worlds.grid, &curve) {
        return Err(ApplyError::Collision);
    }
    let cell = worlds.grid.cell_of(end).ok_or(ApplyError::OutOfWorld)?;
    if !worlds.grid.is_free(cell) {
        return Err(ApplyError::Collision);
    }
    let heading = worlds.orient.snap(worlds.orient.degrees(st.p_heading) + math::to_deg(curvature * length));
    Ok((cell, heading))
}

/// Transition function of a single operation.
pub fn apply_operation(st: LocoState, op: &RwOp, worlds: &Worlds) -> Result<LocoState, ApplyError> {
    let o = &worlds.orient;
    match *op {
        RwOp::Translation { gain, length } => {
            let v = virtual_step(worlds, st.v_loc, st.v_heading, gain * length).ok_or(ApplyError::OffGraph)?;
            let (p, ph) = physical_walk(worlds, st, 0.0, length)?;
            Ok(LocoState { v_loc: v, p_loc: p, p_heading: ph, ..st })
        }
        RwOp::Curvature { gain, length } => {
            let v = virtual_step(worlds, st.v_loc, st.v_heading, length).ok_or(ApplyError::OffGraph)?;
            let (p, ph) = physical_walk(worlds, st, gain, length)?;
            Ok(LocoState { v_loc: v, p_loc: p, p_heading: ph, ..st })
        }
        RwOp::Rotation { gain, turn_deg } => Ok(LocoState {
            v_heading: o.snap(o.degrees(st.v_heading) + gain * turn_deg),
            p_heading: o.snap(o.degrees(st.p_heading) + turn_deg),
            ..st
        }),
        RwOp::Reset { angle_deg } => Ok(LocoState { p_heading: o.snap(o.degrees(st.p_heading) + angle_deg), ..st }),
    }
}

/// Applies a sequence, stopping at the first failing operation.
pub fn apply_sequence(st: LocoState, ops: &[RwOp], worlds: &Worlds) -> Result<LocoState, ApplyError> {
    ops.iter().try_fold(st, |s, op| apply_operation(s, op, worlds))
}

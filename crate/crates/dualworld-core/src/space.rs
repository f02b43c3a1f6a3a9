//! The loco-state search space seen by every solver.

use alloc::vec::Vec;

use crate::kinematics::OperationSequence;
use crate::mil::MilRange;
use crate::state::LocoState;
use crate::world::VirtualGraph;

/// One transition out of a loco-state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hop {
    pub to: LocoState,
    /// Virtual distance covered (0 for in-place transitions).
    pub length: f64,
    /// MIL of the transition.
    pub cost: f64,
}

/// A space of loco-states with MIL-weighted transitions.
pub trait Space {
    fn graph(&self) -> &VirtualGraph;

    /// Appends every realizable transition out of `st`, one per target,
    /// sorted by target.
    fn successors(&self, st: LocoState, out: &mut Vec<Hop>);

    /// An operation sequence realizing `from -> to` at MIL cost.
    fn operations(&self, from: LocoState, to: LocoState) -> Option<OperationSequence>;

    /// Physical clearance of the state's cell.
    fn clearance(&self, st: LocoState) -> f64;

    fn mil_range(&self, quantum: f64) -> MilRange;

    /// Transitions between collapsed states (both headings ignored).
    fn cos_successors(&self, st: LocoState, out: &mut Vec<Hop>);

    fn cos_mil_range(&self, quantum: f64) -> MilRange;

    /// Largest cost needed to turn in place to any heading pair.
    fn max_correction_cost(&self) -> f64;

    /// States sharing `st`'s two locations that a synthetic in-place
    /// correction at `max_correction_cost` may switch to. Spaces whose
    /// transitions already include in-place turns leave this empty.
    fn correction_targets(&self, _st: LocoState, _out: &mut Vec<LocoState>) {}

    fn mil(&self, from: LocoState, to: LocoState) -> Option<f64> {
        let mut out = Vec::new();
        self.successors(from, &mut out);
        out.iter().find(|h| h.to == to).map(|h| h.cost)
    }
}

impl<S: Space + ?Sized> Space for &S {
    fn graph(&self) -> &VirtualGraph {
        (**self).graph()
    }
    fn successors(&self, st: LocoState, out: &mut Vec<Hop>) {
        (**self).successors(st, out)
    }
    fn operations(&self, from: LocoState, to: LocoState) -> Option<OperationSequence> {
        (**self).operations(from, to)
    }
    fn clearance(&self, st: LocoState) -> f64 {
        (**self).clearance(st)
    }
    fn mil_range(&self, quantum: f64) -> MilRange {
        (**self).mil_range(quantum)
    }
    fn cos_successors(&self, st: LocoState, out: &mut Vec<Hop>) {
        (**self).cos_successors(st, out)
    }
    fn cos_mil_range(&self, quantum: f64) -> MilRange {
        (**self).cos_mil_range(quantum)
    }
    fn max_correction_cost(&self) -> f64 {
        (**self).max_correction_cost()
    }
    fn correction_targets(&self, st: LocoState, out: &mut Vec<LocoState>) {
        (**self).correction_targets(st, out)
    }
}

/// The same space with both headings collapsed to 0.
pub struct CosSpace<'a, S: ?Sized> {
    pub inner: &'a S,
}

impl<'a, S: Space + ?Sized> Space for CosSpace<'a, S> {
    fn graph(&self) -> &VirtualGraph {
        self.inner.graph()
    }
    fn successors(&self, st: LocoState, out: &mut Vec<Hop>) {
        self.inner.cos_successors(st.collapsed(), out)
    }
    fn operations(&self, _from: LocoState, _to: LocoState) -> Option<OperationSequence> {
        None
    }
    fn clearance(&self, st: LocoState) -> f64 {
        self.inner.clearance(st)
    }
    fn mil_range(&self, quantum: f64) -> MilRange {
        self.inner.cos_mil_range(quantum)
    }
    fn cos_successors(&self, st: LocoState, out: &mut Vec<Hop>) {
        self.inner.cos_successors(st.collapsed(), out)
    }
    fn cos_mil_range(&self, quantum: f64) -> MilRange {
        self.inner.cos_mil_range(quantum)
    }
    fn max_correction_cost(&self) -> f64 {
        0.0
    }
}

/// A loco-state path with per-hop lengths and costs.
#[derive(Clone, Debug, PartialEq)]
pub struct RwPath {
    pub states: Vec<LocoState>,
    pub hop_lengths: Vec<f64>,
    pub hop_costs: Vec<f64>,
    pub length: f64,
    pub cost: f64,
}

impl RwPath {
    pub fn start(st: LocoState) -> Self {
        RwPath { states: alloc::vec![st], hop_lengths: Vec::new(), hop_costs: Vec::new(), length: 0.0, cost: 0.0 }
    }

    pub fn push(&mut self, to: LocoState, length: f64, cost: f64) {
        self.states.push(to);
        self.hop_lengths.push(length);
        self.hop_costs.push(cost);
        self.length += length;
        self.cost += cost;
    }

    pub fn first(&self) -> LocoState {
        self.states[0]
    }

    pub fn last(&self) -> LocoState {
        *self.states.last().unwrap()
    }

    pub fn hops(&self) -> usize {
        self.hop_costs.len()
    }

    /// Virtual node sequence with in-place repeats removed.
    pub fn v_path(&self) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        for s in &self.states {
            if out.last() != Some(&s.v_loc) {
                out.push(s.v_loc);
            }
        }
        out
    }

    /// Rebuilds a path from a state sequence by looking up each hop.
    pub fn from_states<S: Space + ?Sized>(space: &S, states: &[LocoState]) -> Option<Self> {
        let mut path = RwPath::start(*states.first()?);
        let mut buf = Vec::new();
        for w in states.windows(2) {
            buf.clear();
            space.successors(w[0], &mut buf);
            let hop = buf.iter().find(|h| h.to == w[1])?;
            path.push(hop.to, hop.length, hop.cost);
        }
        Some(path)
    }

    /// Checks that every hop is a transition of `space` with the recorded
    /// length and cost, and that the totals add up.
    pub fn is_consistent<S: Space + ?Sized>(&self, space: &S) -> bool {
        let mut buf = Vec::new();
        for (i, w) in self.states.windows(2).enumerate() {
            buf.clear();
            space.successors(w[0], &mut buf);
            match buf.iter().find(|h| h.to == w[1]) {
                Some(h) if (h.cost - self.hop_costs[i]).abs() <= 1e-9 && (h.length - self.hop_lengths[i]).abs() <= 1e-9 => {}
                _ => return false,
            }
        }
        let l: f64 = self.hop_lengths.iter().sum();
        let c: f64 = self.hop_costs.iter().sum();
        (l - self.length).abs() <= 1e-6 && (c - self.cost).abs() <= 1e-6
    }
}

//! Spaces given by an explicit transition table.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::kinematics::OperationSequence;
use crate::mil::MilRange;
use crate::space::{Hop, Space};
use crate::state::LocoState;
use crate::world::VirtualGraph;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TableError {
    #[error("no virtual edge between the states' locations")]
    NotNeighbors,
    #[error("transition costs must be non-negative")]
    NegativeCost,
    #[error("unknown virtual node")]
    UnknownNode,
}

/// MIL values listed pair by pair. Entries are authoritative.
#[derive(Clone, Debug, PartialEq)]
pub struct TableSpace {
    graph: VirtualGraph,
    states: BTreeSet<LocoState>,
    trans: BTreeMap<LocoState, Vec<Hop>>,
    ops: BTreeMap<(LocoState, LocoState), OperationSequence>,
    clearance: BTreeMap<u32, f64>,
    by_location: BTreeMap<(u32, u32), Vec<LocoState>>,
    range: Option<MilRange>,
    correction_cost: f64,
}

impl TableSpace {
    pub fn new(graph: VirtualGraph) -> Self {
        TableSpace {
            graph,
            states: BTreeSet::new(),
            trans: BTreeMap::new(),
            ops: BTreeMap::new(),
            clearance: BTreeMap::new(),
            by_location: BTreeMap::new(),
            range: None,
            correction_cost: 1.0,
        }
    }

    pub fn add_state(&mut self, st: LocoState) -> Result<(), TableError> {
        if st.v_loc as usize >= self.graph.node_count() {
            return Err(TableError::UnknownNode);
        }
        if self.states.insert(st) {
            self.by_location.entry((st.v_loc, st.p_loc)).or_default().push(st);
        }
        Ok(())
    }

    /// Adds `from -> to` at `cost`. The length is the virtual edge length,
    /// or 0 when both states share a virtual location. A repeated pair
    /// keeps the cheaper cost.
    pub fn add_transition(&mut self, from: LocoState, to: LocoState, cost: f64) -> Result<(), TableError> {
        if !(cost >= 0.0) {
            return Err(TableError::NegativeCost);
        }
        let length = if from.v_loc == to.v_loc {
            0.0
        } else {
            self.graph.edge_length(from.v_loc, to.v_loc).ok_or(TableError::NotNeighbors)?
        };
        self.add_state(from)?;
        self.add_state(to)?;
        let list = self.trans.entry(from).or_default();
        match list.binary_search_by(|h| h.to.cmp(&to)) {
            Ok(i) => list[i].cost = list[i].cost.min(cost),
            Err(i) => list.insert(i, Hop { to, length, cost }),
        }
        Ok(())
    }

    pub fn set_operations(&mut self, from: LocoState, to: LocoState, ops: OperationSequence) {
        self.ops.insert((from, to), ops);
    }

    pub fn set_clearance(&mut self, p_loc: u32, d: f64) {
        self.clearance.insert(p_loc, d);
    }

    /// Overrides the computed MIL range.
    pub fn set_range(&mut self, range: MilRange) {
        self.range = Some(range);
    }

    pub fn set_correction_cost(&mut self, c: f64) {
        self.correction_cost = c;
    }

    pub fn states(&self) -> impl Iterator<Item = LocoState> + '_ {
        self.states.iter().copied()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.trans.values().map(Vec::len).sum()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (LocoState, &Hop)> + '_ {
        self.trans.iter().flat_map(|(s, hs)| hs.iter().map(move |h| (*s, h)))
    }

    pub fn contains(&self, st: LocoState) -> bool {
        self.states.contains(&st)
    }

    /// The range computed from the table, ignoring any override.
    pub fn computed_range(&self, quantum: f64) -> MilRange {
        let sources: Vec<LocoState> = self.states.iter().copied().collect();
        MilRange::from_sources(&sources, quantum, |s, out| self.successors(s, out))
    }
}

impl Space for TableSpace {
    fn graph(&self) -> &VirtualGraph {
        &self.graph
    }

    fn successors(&self, st: LocoState, out: &mut Vec<Hop>) {
        if let Some(list) = self.trans.get(&st) {
            out.extend_from_slice(list);
        }
    }

    fn operations(&self, from: LocoState, to: LocoState) -> Option<OperationSequence> {
        if let Some(ops) = self.ops.get(&(from, to)) {
            return Some(ops.clone());
        }
        self.mil(from, to).map(|c| OperationSequence { ops: Vec::new(), total_cost: c })
    }

    fn clearance(&self, st: LocoState) -> f64 {
        self.clearance.get(&st.p_loc).copied().unwrap_or(0.0)
    }

    fn mil_range(&self, quantum: f64) -> MilRange {
        match &self.range {
            Some(r) => r.clone(),
            None => self.computed_range(quantum),
        }
    }

    fn cos_successors(&self, st: LocoState, out: &mut Vec<Hop>) {
        let c = st.collapsed();
        let Some(members) = self.by_location.get(&(c.v_loc, c.p_loc)) else { return };
        let mut best: BTreeMap<LocoState, Hop> = BTreeMap::new();
        for m in members {
            for h in self.trans.get(m).map(Vec::as_slice).unwrap_or(&[]) {
                let to = h.to.collapsed();
                if to == c {
                    continue;
                }
                let e = best.entry(to).or_insert(Hop { to, length: h.length, cost: f64::INFINITY });
                e.cost = e.cost.min(h.cost);
            }
        }
        out.extend(best.into_values());
    }

    fn cos_mil_range(&self, quantum: f64) -> MilRange {
        let sources: Vec<LocoState> = self.by_location.keys().map(|&(v, p)| LocoState::new(v, 0, p, 0)).collect();
        MilRange::from_sources(&sources, quantum, |s, out| self.cos_successors(s, out))
    }

    fn max_correction_cost(&self) -> f64 {
        self.correction_cost
    }

    fn correction_targets(&self, st: LocoState, out: &mut Vec<LocoState>) {
        if let Some(members) = self.by_location.get(&(st.v_loc, st.p_loc)) {
            out.extend(members.iter().copied().filter(|&m| m != st));
        }
    }
}

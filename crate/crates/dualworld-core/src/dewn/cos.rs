//! Solving with both headings collapsed, then restoring headings.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{solve, DewnOptions, DewnOutcome};
use crate::exact::{Query, SolveError};
use crate::math::Total;
use crate::mil::MilRange;
use crate::space::{CosSpace, Hop, RwPath, Space};
use crate::state::LocoState;

/// Cheapest full-state path from `start` visiting the same location pairs
/// as `collapsed`, hop for hop. A synthetic in-place correction at
/// `max_correction_cost` is allowed before each hop in spaces that expose
/// correction targets; such hops appear with length 0.
pub fn realize_collapsed<S: Space + ?Sized>(space: &S, start: LocoState, collapsed: &RwPath) -> Option<RwPath> {
    let c_theta = space.max_correction_cost();
    // Per layer: state -> (cost, length, predecessor, via correction).
    let mut layers: Vec<BTreeMap<LocoState, (f64, f64, Option<LocoState>, bool)>> = Vec::new();
    let mut first = BTreeMap::new();
    first.insert(start, (0.0, 0.0, None, false));
    layers.push(first);
    let mut buf: Vec<Hop> = Vec::new();
    let mut targets: Vec<LocoState> = Vec::new();
    for want in collapsed.states.iter().skip(1) {
        let layer = layers.last_mut().unwrap();
        let snapshot: Vec<(LocoState, f64, f64)> = layer.iter().map(|(s, v)| (*s, v.0, v.1)).collect();
        for &(s, c, l) in &snapshot {
            targets.clear();
            space.correction_targets(s, &mut targets);
            for &t in &targets {
                let nc = c + c_theta;
                if layer.get(&t).map_or(true, |v| nc < v.0) {
                    layer.insert(t, (nc, l, Some(s), true));
                }
            }
        }
        let mut next: BTreeMap<LocoState, (f64, f64, Option<LocoState>, bool)> = BTreeMap::new();
        for (&s, &(c, l, _, _)) in layer.iter() {
            buf.clear();
            space.successors(s, &mut buf);
            for h in buf.iter().filter(|h| h.to.v_loc == want.v_loc && h.to.p_loc == want.p_loc) {
                let nc = c + h.cost;
                if next.get(&h.to).map_or(true, |v| nc < v.0) {
                    next.insert(h.to, (nc, l + h.length, Some(s), false));
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        layers.push(next);
    }
    let last = layers.last().unwrap();
    let (&end, _) = last.iter().min_by_key(|(s, v)| (Total(v.0), **s))?;
    // Walk back through the layers, expanding corrections.
    let mut chain: Vec<(LocoState, f64, f64)> = Vec::new();
    let mut cur = end;
    for layer in layers.iter().rev() {
        loop {
            let (c, l, pred, corr) = layer[&cur];
            chain.push((cur, c, l));
            match (pred, corr) {
                (Some(p), true) => cur = p,
                (Some(p), false) => {
                    cur = p;
                    break;
                }
                (None, _) => break,
            }
        }
    }
    chain.reverse();
    let mut path = RwPath::start(chain[0].0);
    for w in chain.windows(2) {
        path.push(w[1].0, w[1].2 - w[0].2, w[1].1 - w[0].1);
    }
    Some(path)
}

/// Extra cost a collapsed solution may carry: one correction per hop of
/// the virtual graph's hop diameter.
pub fn correction_allowance<S: Space + ?Sized>(space: &S, q: &Query) -> f64 {
    q.budget + space.max_correction_cost() * space.graph().hop_diameter() as f64
}

/// Solves in the collapsed space with `cos_range`, then realizes the result
/// in `space`. The realized cost may exceed the budget.
pub fn solve_collapsed<S: Space + ?Sized>(space: &S, cos_range: &MilRange, q: &Query, opts: &DewnOptions) -> Result<DewnOutcome, SolveError> {
    let cos = CosSpace { inner: space };
    let cq = Query::new(q.start.collapsed(), q.target, q.budget);
    let inner_opts = DewnOptions { cos_simplify: false, ..*opts };
    let mut out = solve(&cos, cos_range, &cq, &inner_opts)?;
    let path = realize_collapsed(space, q.start, &out.path).ok_or(SolveError::Unrealizable)?;
    out.collapsed = Some(core::mem::replace(&mut out.path, path));
    Ok(out)
}

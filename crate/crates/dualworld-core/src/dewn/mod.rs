//! The approximate solver: multiplier search, reference path, pruning and
//! the rounded DP, plus the collapsed-orientation variant.

pub mod cos;
pub mod csms;
pub mod heuristics;
pub mod idws;
pub mod ppnp;
pub mod rounded;

use alloc::vec::Vec;
use core::cell::OnceCell;

use crate::exact::{min_cost_path, Query, SolveError};
use crate::mil::{greedy_realize, MilRange, DEFAULT_QUANTUM};
use crate::math::EPS;
use crate::space::{RwPath, Space};

pub use csms::{csms, MultiplierResult, Verdict};
pub use heuristics::Heuristics;
pub use idws::{idws, Idws, IdwsResult};
pub use ppnp::{ppnp, PpnpResult, PpnpStats};
pub use rounded::{rounded_dp, RoundedOutcome};

/// Search-order components of the reference search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ordering {
    /// Remaining-cost estimate in the priority.
    pub teco: bool,
    /// Physical clearance tie-break.
    pub pwso: bool,
    /// Virtual detour tie-break.
    pub vwno: bool,
}

impl Default for Ordering {
    fn default() -> Self {
        Ordering { teco: true, pwso: true, vwno: true }
    }
}

/// Pruning rules of the trimming search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pruning {
    pub ilsp: bool,
    pub slsp: bool,
    pub ulsl: bool,
}

impl Default for Pruning {
    fn default() -> Self {
        Pruning { ilsp: true, slsp: true, ulsl: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DewnOptions {
    pub epsilon: f64,
    /// Relative step for stopping the multiplier search early.
    pub delta: Option<f64>,
    pub cos_simplify: bool,
    /// Return the reference path without pruning or the DP.
    pub reference_only: bool,
    pub ordering: Ordering,
    pub pruning: Pruning,
    pub quantum: f64,
}

impl Default for DewnOptions {
    fn default() -> Self {
        DewnOptions {
            epsilon: 0.1,
            delta: Some(1e-3),
            cos_simplify: false,
            reference_only: false,
            ordering: Ordering::default(),
            pruning: Pruning::default(),
            quantum: DEFAULT_QUANTUM,
        }
    }
}

/// Which step produced the returned path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    AtTarget,
    Shortcut,
    Reference,
    Rounded,
}

#[derive(Clone, Debug)]
pub struct DewnOutcome {
    pub path: RwPath,
    pub stage: Stage,
    pub multipliers: Option<MultiplierResult>,
    pub reference: Option<RwPath>,
    pub ppnp: Option<PpnpStats>,
    /// Size of the trimmed space handed to the DP.
    pub trimmed: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Path in the collapsed space, when orientations were collapsed.
    pub collapsed: Option<RwPath>,
}

impl DewnOutcome {
    fn single(path: RwPath, stage: Stage, multipliers: Option<MultiplierResult>) -> Self {
        let (l, u) = (path.length, path.length);
        DewnOutcome { path, stage, multipliers, reference: None, ppnp: None, trimmed: 0, lower_bound: l, upper_bound: u, collapsed: None }
    }
}

const ESCALATION_STEPS: u32 = 10;

/// Shorter feasible result of the relaxed search at both multipliers. When
/// neither fits the budget, the larger multiplier is doubled up to
/// `2^10` times.
pub fn generate_reference<S: Space + ?Sized>(space: &S, heur: &Heuristics, q: &Query, r_alpha: f64, r_beta: f64, ordering: Ordering) -> Result<RwPath, SolveError> {
    let mut best: Option<RwPath> = None;
    for r in [r_alpha, r_beta] {
        if let Some(p) = idws(space, heur, q.start, r, ordering).path {
            if q.within(p.cost) && best.as_ref().map_or(true, |b| p.length < b.length) {
                best = Some(p);
            }
        }
    }
    if let Some(p) = best {
        return Ok(p);
    }
    let base = r_alpha.max(r_beta);
    let base = if base > 0.0 { base } else { 1.0 };
    let mut r = base;
    for _ in 0..ESCALATION_STEPS {
        r *= 2.0;
        if let Some(p) = idws(space, heur, q.start, r, ordering).path {
            if q.within(p.cost) {
                return Ok(p);
            }
        }
    }
    Err(SolveError::ReferenceNotFound)
}

/// Runs the full pipeline on `space` with its MIL range.
pub fn solve<S: Space + ?Sized>(space: &S, range: &MilRange, q: &Query, opts: &DewnOptions) -> Result<DewnOutcome, SolveError> {
    let g = space.graph();
    if q.start.v_loc == q.target {
        return Ok(DewnOutcome::single(RwPath::start(q.start), Stage::AtTarget, None));
    }
    let heur = Heuristics::new(g, range, q.start.v_loc, q.target);
    let m = csms(g, q.start.v_loc, q.target, q.budget, range, opts.delta);
    match m.verdict {
        Verdict::Infeasible => return Err(SolveError::Infeasible),
        Verdict::ShortestFeasible => {
            let sp = m.shortest.as_ref().expect("shortest path exists");
            if let Ok(p) = greedy_realize(space, &sp.nodes, q.start) {
                if q.within(p.cost) {
                    return Ok(DewnOutcome::single(p, Stage::Shortcut, Some(m)));
                }
            }
        }
        Verdict::Multipliers => {}
    }
    let reference = match generate_reference(space, &heur, q, m.r_alpha_star, m.r_beta_star, opts.ordering) {
        Ok(p) => p,
        Err(_) => match min_cost_path(space, q) {
            Some(p) if q.within(p.cost) => p,
            _ => return Err(SolveError::Infeasible),
        },
    };
    let lower = m.length_lower_bound(q.budget).min(reference.length);
    if opts.reference_only {
        let mut out = DewnOutcome::single(reference.clone(), Stage::Reference, Some(m));
        out.reference = Some(reference);
        out.lower_bound = lower;
        return Ok(out);
    }
    let pp = ppnp(space, &heur, q, opts.pruning, reference.length);
    let upper = pp.l_tilde.min(reference.length);
    let rd = rounded_dp(space, q, &pp.x, lower, upper, opts.epsilon);
    let (path, stage) = match rd.path {
        Some(p) if p.length < reference.length - crate::math::EPS => (p, Stage::Rounded),
        _ => (reference.clone(), Stage::Reference),
    };
    Ok(DewnOutcome {
        path,
        stage,
        multipliers: Some(m),
        reference: Some(reference),
        ppnp: Some(pp.stats),
        trimmed: pp.x.len(),
        lower_bound: lower,
        upper_bound: upper,
        collapsed: None,
    })
}

/// Solver bound to one space, with its MIL ranges built on first use.
pub struct Dewn<'a, S: ?Sized> {
    space: &'a S,
    quantum: f64,
    range: OnceCell<MilRange>,
    cos_range: OnceCell<MilRange>,
}

impl<'a, S: Space + ?Sized> Dewn<'a, S> {
    pub fn new(space: &'a S, quantum: f64) -> Self {
        Dewn { space, quantum, range: OnceCell::new(), cos_range: OnceCell::new() }
    }

    pub fn with_range(space: &'a S, range: MilRange) -> Self {
        let d = Dewn::new(space, range.quantum());
        let _ = d.range.set(range);
        d
    }

    pub fn with_ranges(space: &'a S, range: MilRange, cos_range: MilRange) -> Self {
        let d = Dewn::with_range(space, range);
        let _ = d.cos_range.set(cos_range);
        d
    }

    pub fn space(&self) -> &'a S {
        self.space
    }

    pub fn range(&self) -> &MilRange {
        self.range.get_or_init(|| self.space.mil_range(self.quantum))
    }

    pub fn cos_range(&self) -> &MilRange {
        self.cos_range.get_or_init(|| self.space.cos_mil_range(self.quantum))
    }

    pub fn solve(&self, q: &Query, opts: &DewnOptions) -> Result<DewnOutcome, SolveError> {
        if opts.cos_simplify {
            // Collapsed paths with more hops than the hop diameter can need
            // more corrections than the allowance; those, and unrealizable
            // ones, are re-solved in the full space.
            match cos::solve_collapsed(self.space, self.cos_range(), q, opts) {
                Ok(out) if out.path.cost <= cos::correction_allowance(self.space, q) + EPS => Ok(out),
                Ok(_) | Err(SolveError::Unrealizable) => solve(self.space, self.range(), q, &DewnOptions { cos_simplify: false, ..*opts }),
                Err(e) => Err(e),
            }
        } else {
            solve(self.space, self.range(), q, opts)
        }
    }

    /// Solves one query per target from the same start.
    pub fn solve_many(&self, start: crate::state::LocoState, targets: &[crate::world::NodeId], budget: f64, opts: &DewnOptions) -> Vec<Result<DewnOutcome, SolveError>> {
        targets.iter().map(|&t| self.solve(&Query::new(start, t, budget), opts)).collect()
    }
}

/// One-shot solve that builds the needed MIL range.
pub fn dewn<S: Space + ?Sized>(space: &S, q: &Query, opts: &DewnOptions) -> Result<DewnOutcome, SolveError> {
    Dewn::new(space, opts.quantum).solve(q, opts)
}

//! Multiplier search on the virtual graph with alpha or beta edge costs.

use alloc::vec::Vec;

use crate::mil::MilRange;
use crate::paths::{path_length, same_weight, shortest_path};
use crate::world::{NodeId, VirtualGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The plain shortest virtual path is within budget even at beta costs.
    ShortestFeasible,
    /// Even the alpha-cheapest path exceeds the budget.
    Infeasible,
    Multipliers,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundedPath {
    pub nodes: Vec<NodeId>,
    pub length: f64,
    pub bound: f64,
}

/// Result of the search on one cost side.
#[derive(Clone, Debug, PartialEq)]
pub struct SideSearch {
    pub r_star: f64,
    /// Cheaper, within-budget side of the final bracket.
    pub p: BoundedPath,
    /// Shorter, over-budget side of the final bracket.
    pub q: BoundedPath,
    /// Optimal relaxed weight `l + r* bound` at termination.
    pub lr_weight: f64,
    pub iterations: usize,
    /// False when stopped by the relative step rule.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierResult {
    pub verdict: Verdict,
    pub shortest: Option<BoundedPath>,
    pub alpha: Option<SideSearch>,
    pub beta: Option<SideSearch>,
    pub r_alpha_star: f64,
    pub r_beta_star: f64,
}

impl MultiplierResult {
    /// Lower bound on the length of any within-budget path, from weak
    /// duality on the alpha side.
    pub fn length_lower_bound(&self, budget: f64) -> f64 {
        let base = self.shortest.as_ref().map_or(0.0, |p| p.length);
        match &self.alpha {
            Some(a) if a.r_star.is_finite() => base.max(a.lr_weight - a.r_star * budget),
            _ => base,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Alpha,
    Beta,
}

fn bound_of(range: &MilRange, side: Side, l: f64) -> f64 {
    match side {
        Side::Alpha => range.alpha(l),
        Side::Beta => range.beta(l),
    }
}

fn bounded(g: &VirtualGraph, range: &MilRange, side: Side, nodes: Vec<NodeId>) -> BoundedPath {
    let length = path_length(g, &nodes).unwrap_or(f64::INFINITY);
    let bound = nodes.windows(2).map(|w| bound_of(range, side, g.edge_length(w[0], w[1]).unwrap())).sum();
    BoundedPath { nodes, length, bound }
}

const MAX_ITERATIONS: usize = 10_000;

fn search_side(
    g: &VirtualGraph,
    range: &MilRange,
    side: Side,
    s: NodeId,
    t: NodeId,
    budget: f64,
    delta: Option<f64>,
    shortest: &BoundedPath,
) -> Option<SideSearch> {
    let usable = |l: f64| bound_of(range, side, l).is_finite();
    let p0 = shortest_path(g, s, t, |_, _, l| Some(bound_of(range, side, l)).filter(|b| b.is_finite()))?;
    let mut p = bounded(g, range, side, p0.nodes);
    let mut q = BoundedPath { bound: shortest.nodes.windows(2).map(|w| bound_of(range, side, g.edge_length(w[0], w[1]).unwrap())).sum(), ..shortest.clone() };
    let mut r = 0.0;
    let mut lr_weight = q.length;
    let mut iterations = 0;
    let mut exact = true;
    if !q.bound.is_finite() {
        // The shortest path uses an edge with no MIL entry; bracket with the
        // shortest usable path instead.
        let qn = shortest_path(g, s, t, |_, _, l| Some(l).filter(|&l| usable(l)))?;
        q = bounded(g, range, side, qn.nodes);
        lr_weight = q.length;
    }
    if q.bound <= budget + crate::math::EPS {
        // Unconstrained on this side: the dual peaks at r = 0.
        return Some(SideSearch { r_star: 0.0, p: q.clone(), q, lr_weight, iterations, exact });
    }
    let mut prev_r: Option<f64> = None;
    while iterations < MAX_ITERATIONS {
        let denom = p.bound - q.bound;
        if denom.abs() <= 1e-12 {
            break;
        }
        r = (q.length - p.length) / denom;
        iterations += 1;
        let x = shortest_path(g, s, t, |_, _, l| Some(l + r * bound_of(range, side, l)).filter(|w| w.is_finite()))?;
        lr_weight = x.weight;
        let wp = p.length + r * p.bound;
        let wq = q.length + r * q.bound;
        if same_weight(x.weight, wp) || same_weight(x.weight, wq) {
            break;
        }
        if let (Some(d), Some(pr)) = (delta, prev_r) {
            if (r - pr).abs() <= d * pr.abs() {
                exact = false;
                break;
            }
        }
        prev_r = Some(r);
        let x = bounded(g, range, side, x.nodes);
        if x.bound <= budget + crate::math::EPS {
            p = x;
        } else {
            q = x;
        }
    }
    Some(SideSearch { r_star: r, p, q, lr_weight, iterations, exact })
}

/// Secant search for the Lagrange multipliers of the alpha- and
/// beta-weighted single-world problems.
pub fn csms(g: &VirtualGraph, s: NodeId, t: NodeId, budget: f64, range: &MilRange, delta: Option<f64>) -> MultiplierResult {
    let infeasible = MultiplierResult { verdict: Verdict::Infeasible, shortest: None, alpha: None, beta: None, r_alpha_star: 0.0, r_beta_star: 0.0 };
    let Some(sp) = shortest_path(g, s, t, |_, _, l| Some(l)) else { return infeasible };
    let shortest = bounded(g, range, Side::Beta, sp.nodes);
    if shortest.bound <= budget + crate::math::EPS {
        return MultiplierResult { verdict: Verdict::ShortestFeasible, shortest: Some(shortest), ..infeasible };
    }
    let alpha_min = shortest_path(g, s, t, |_, _, l| Some(range.alpha(l)).filter(|a| a.is_finite()));
    match alpha_min {
        Some(p) if p.weight <= budget + crate::math::EPS => {}
        _ => return MultiplierResult { shortest: Some(shortest), ..infeasible },
    }
    let alpha = search_side(g, range, Side::Alpha, s, t, budget, delta, &shortest);
    let beta = search_side(g, range, Side::Beta, s, t, budget, delta, &shortest);
    let r_alpha_star = alpha.as_ref().map_or(0.0, |a| a.r_star);
    let r_beta_star = beta.as_ref().map_or(r_alpha_star, |b| b.r_star);
    MultiplierResult { verdict: Verdict::Multipliers, shortest: Some(shortest), alpha, beta, r_alpha_star, r_beta_star }
}

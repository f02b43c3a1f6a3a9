//! k-nearest and range queries over points of interest, solved per
//! candidate with the approximate solver.

use alloc::vec::Vec;
use core::cell::RefCell;

use hashbrown::HashMap;

use crate::dewn::{Dewn, DewnOptions};
use crate::exact::Query;
use crate::math::{self, EPS};
use crate::paths::length_distances;
use crate::space::{RwPath, Space};
use crate::state::LocoState;
use crate::world::NodeId;

#[derive(Clone, Debug, PartialEq)]
pub struct Hit {
    pub poi: NodeId,
    pub path: RwPath,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("only {} of the requested points are reachable within budget", found.len())]
pub struct FewerThanK {
    /// Every feasible hit, in result order.
    pub found: Vec<Hit>,
}

type CacheKey = (LocoState, NodeId, i64);

/// Solver plus a cache of per-POI results.
pub struct SpatialEngine<'a, S: ?Sized> {
    pub dewn: Dewn<'a, S>,
    pub opts: DewnOptions,
    cache: RefCell<HashMap<CacheKey, Option<RwPath>>>,
    solves: RefCell<usize>,
}

impl<'a, S: Space + ?Sized> SpatialEngine<'a, S> {
    pub fn new(dewn: Dewn<'a, S>, opts: DewnOptions) -> Self {
        SpatialEngine { dewn, opts, cache: RefCell::new(HashMap::new()), solves: RefCell::new(0) }
    }

    /// Number of solver invocations so far (cache misses).
    pub fn solves(&self) -> usize {
        *self.solves.borrow()
    }

    /// Feasible path to `poi`, cached per (start, poi, budget).
    pub fn solve_poi(&self, start: LocoState, poi: NodeId, budget: f64) -> Option<RwPath> {
        let key = (start, poi, math::quantize(budget, EPS));
        if let Some(hit) = self.cache.borrow().get(&key) {
            return hit.clone();
        }
        *self.solves.borrow_mut() += 1;
        let res = self.dewn.solve(&Query::new(start, poi, budget), &self.opts).ok().map(|o| o.path);
        self.cache.borrow_mut().insert(key, res.clone());
        res
    }

    /// The `k` candidates with the shortest feasible paths, ordered by length
    /// then id. Candidates are examined in Euclidean order, stopping once the
    /// next straight-line distance exceeds the current k-th length.
    pub fn dknn(&self, start: LocoState, candidates: &[NodeId], k: usize, budget: f64) -> Result<Vec<Hit>, FewerThanK> {
        let g = self.dewn.space().graph();
        let origin = g.pos(start.v_loc);
        let mut order: Vec<(f64, NodeId)> = candidates.iter().map(|&p| (origin.dist(g.pos(p)), p)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        order.dedup_by_key(|e| e.1);
        let mut hits: Vec<Hit> = Vec::new();
        for (euclid, poi) in order {
            if k > 0 && hits.len() >= k && euclid > hits[k - 1].path.length + EPS {
                break;
            }
            if let Some(path) = self.solve_poi(start, poi, budget) {
                hits.push(Hit { poi, path });
                hits.sort_by(|a, b| a.path.length.total_cmp(&b.path.length).then(a.poi.cmp(&b.poi)));
            }
        }
        if hits.len() < k {
            return Err(FewerThanK { found: hits });
        }
        hits.truncate(k);
        Ok(hits)
    }

    /// Every candidate with a feasible path no longer than `radius`, ordered
    /// by length then id.
    pub fn drange(&self, start: LocoState, candidates: &[NodeId], radius: f64, budget: f64) -> Vec<Hit> {
        let g = self.dewn.space().graph();
        let origin = g.pos(start.v_loc);
        let dist = length_distances(g, start.v_loc);
        let mut hits: Vec<Hit> = Vec::new();
        let mut cands: Vec<NodeId> = candidates.to_vec();
        cands.sort_unstable();
        cands.dedup();
        for poi in cands {
            if origin.dist(g.pos(poi)) > radius + EPS || dist[poi as usize] > radius + EPS {
                continue;
            }
            if let Some(path) = self.solve_poi(start, poi, budget) {
                if path.length <= radius + EPS {
                    hits.push(Hit { poi, path });
                }
            }
        }
        hits.sort_by(|a, b| a.path.length.total_cmp(&b.path.length).then(a.poi.cmp(&b.poi)));
        hits
    }
}

//! The virtual world: polygonal obstacles, POIs, and its visibility graph.

use alloc::string::String;
use alloc::vec::Vec;

use crate::geom::{self, Containment, Point, Rect};
use crate::math::{self, EPS};

pub type NodeId = u32;

#[derive(Clone, Debug, PartialEq)]
pub struct Poi {
    pub name: String,
    pub pos: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VirtualWorld {
    pub bounds: Rect,
    /// Simple polygons, vertices in counter-clockwise order.
    pub obstacles: Vec<Vec<Point>>,
    pub pois: Vec<Poi>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WorldError {
    #[error("polygon {0} is degenerate (fewer than 3 vertices or zero area)")]
    DegenerateGeometry(usize),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("POI `{0}` lies inside an obstacle")]
    PoiInObstacle(String),
    #[error("geometry outside the world bounds")]
    OutOfBounds,
    #[error("edge ({0}, {1}) is not symmetric or has a negative length")]
    BadEdge(NodeId, NodeId),
}

impl VirtualWorld {
    pub fn new(bounds: Rect, obstacles: Vec<Vec<Point>>, pois: Vec<Poi>) -> Self {
        VirtualWorld { bounds, obstacles, pois }
    }

    /// Checks polygon shape, bounds and POI placement.
    pub fn validate(&self) -> Result<(), WorldError> {
        for (i, poly) in self.obstacles.iter().enumerate() {
            if poly.len() < 3 || geom::signed_area(poly).abs() <= EPS {
                return Err(WorldError::DegenerateGeometry(i));
            }
            if poly.iter().any(|p| !self.bounds.contains(*p)) {
                return Err(WorldError::OutOfBounds);
            }
        }
        for poi in &self.pois {
            if !self.bounds.contains(poi.pos) {
                return Err(WorldError::OutOfBounds);
            }
            if self.obstacles.iter().any(|o| geom::locate(poi.pos, o) == Containment::Inside) {
                return Err(WorldError::PoiInObstacle(poi.name.clone()));
            }
        }
        Ok(())
    }

    /// Whether `p` lies in the interior of the union of obstacles.
    pub fn point_blocked(&self, p: Point) -> bool {
        let all: Vec<usize> = (0..self.obstacles.len()).collect();
        interior_of_union(self, &all, p, None)
    }
}

/// True iff the open segment `(a, b)` avoids every obstacle interior.
/// Touching an edge or a corner counts as clear.
pub fn segment_clear_virtual(world: &VirtualWorld, a: Point, b: Point) -> bool {
    let bbox = Rect::of_segment(a, b);
    let cands: Vec<usize> = world
        .obstacles
        .iter()
        .enumerate()
        .filter(|(_, o)| geom::bounding_rect(o).overlaps(&bbox))
        .map(|(i, _)| i)
        .collect();
    segment_clear_among(world, &cands, a, b)
}

fn segment_clear_among(world: &VirtualWorld, cands: &[usize], a: Point, b: Point) -> bool {
    if a.dist(b) <= EPS || cands.is_empty() {
        return true;
    }
    let mut ts = alloc::vec![0.0, 1.0];
    for &i in cands {
        let poly = &world.obstacles[i];
        let n = poly.len();
        for k in 0..n {
            geom::segment_hits(a, b, poly[k], poly[(k + 1) % n], &mut ts);
        }
    }
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let len = a.dist(b);
    let dir = b.sub(a).scale(1.0 / len);
    let normal = Point::new(-dir.y, dir.x);
    for w in ts.windows(2) {
        if (w[1] - w[0]) * len <= 1e-7 {
            continue;
        }
        let m = a.lerp(b, 0.5 * (w[0] + w[1]));
        if interior_of_union(world, cands, m, Some(normal)) {
            return false;
        }
    }
    true
}

/// Interior test against the union of several polygons. A point on a seam
/// shared by two polygons is interior when both sides are covered.
fn interior_of_union(world: &VirtualWorld, cands: &[usize], p: Point, normal: Option<Point>) -> bool {
    let mut on_boundary = false;
    for &i in cands {
        match geom::locate(p, &world.obstacles[i]) {
            Containment::Inside => return true,
            Containment::Boundary => on_boundary = true,
            Containment::Outside => {}
        }
    }
    if !on_boundary {
        return false;
    }
    let covered = |q: Point| cands.iter().any(|&i| geom::locate(q, &world.obstacles[i]) != Containment::Outside);
    let eta = 1e-6;
    match normal {
        Some(n) => covered(p.add(n.scale(eta))) && covered(p.sub(n.scale(eta))),
        None => {
            let dirs = [Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(-1.0, 0.0), Point::new(0.0, -1.0)];
            dirs.iter().all(|d| covered(p.add(d.scale(eta))))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Poi(String),
    Corner,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VNode {
    pub pos: Point,
    pub kind: NodeKind,
}

/// Undirected weighted graph over virtual locations.
#[derive(Clone, Debug, PartialEq)]
pub struct VirtualGraph {
    nodes: Vec<VNode>,
    adj: Vec<Vec<(NodeId, f64)>>,
    cutoff: f64,
}

impl VirtualGraph {
    /// Builds a graph from explicit edges. Lengths need not be Euclidean,
    /// which lets hand-made fixtures carry rounded lengths.
    pub fn from_edges(nodes: Vec<VNode>, edges: &[(NodeId, NodeId, f64)], cutoff: f64) -> Result<Self, WorldError> {
        let mut adj = alloc::vec![Vec::new(); nodes.len()];
        for &(u, v, l) in edges {
            if u as usize >= nodes.len() {
                return Err(WorldError::UnknownNode(u));
            }
            if v as usize >= nodes.len() {
                return Err(WorldError::UnknownNode(v));
            }
            if u == v || !(l >= 0.0) {
                return Err(WorldError::BadEdge(u, v));
            }
            adj[u as usize].push((v, l));
            adj[v as usize].push((u, l));
        }
        for list in adj.iter_mut() {
            list.sort_by(|a: &(NodeId, f64), b| a.0.cmp(&b.0));
            list.dedup_by(|a, b| a.0 == b.0);
        }
        Ok(VirtualGraph { nodes, adj, cutoff })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn node(&self, id: NodeId) -> &VNode {
        &self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[VNode] {
        &self.nodes
    }

    pub fn pos(&self, id: NodeId) -> Point {
        self.nodes[id as usize].pos
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Adjacency list sorted by neighbor id.
    pub fn neighbors(&self, id: NodeId) -> &[(NodeId, f64)] {
        &self.adj[id as usize]
    }

    pub fn edge_length(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let list = self.adj.get(u as usize)?;
        list.binary_search_by(|e| e.0.cmp(&v)).ok().map(|i| list[i].1)
    }

    pub fn poi_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.kind, NodeKind::Poi(_)))
            .map(|(i, _)| i as NodeId)
    }

    pub fn find_poi(&self, name: &str) -> Option<NodeId> {
        self.nodes
            .iter()
            .position(|n| matches!(&n.kind, NodeKind::Poi(s) if s == name))
            .map(|i| i as NodeId)
    }

    /// Nearest node to `p`, if one lies within `tol`.
    pub fn node_at(&self, p: Point, tol: f64) -> Option<NodeId> {
        let mut best: Option<(f64, NodeId)> = None;
        for (i, n) in self.nodes.iter().enumerate() {
            let d = n.pos.dist(p);
            if d <= tol && best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, i as NodeId));
            }
        }
        best.map(|(_, i)| i)
    }

    /// Largest number of hops on a fewest-hop path between two connected nodes.
    pub fn hop_diameter(&self) -> usize {
        let n = self.nodes.len();
        let mut best = 0;
        let mut dist = alloc::vec![usize::MAX; n];
        let mut queue = alloc::collections::VecDeque::new();
        for s in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                best = best.max(dist[u]);
                for &(v, _) in &self.adj[u] {
                    if dist[v as usize] == usize::MAX {
                        dist[v as usize] = dist[u] + 1;
                        queue.push_back(v as usize);
                    }
                }
            }
        }
        best
    }
}

/// Adjacency lookup with an explicit error for unknown nodes.
pub fn virtual_neighbors(graph: &VirtualGraph, node: NodeId) -> Result<Vec<(NodeId, f64)>, WorldError> {
    if node as usize >= graph.node_count() {
        return Err(WorldError::UnknownNode(node));
    }
    Ok(graph.neighbors(node).to_vec())
}

/// Builds the visibility graph over POIs and polygon corners. Coincident
/// points collapse into one node; POIs come first.
pub fn build_visibility_graph(world: &VirtualWorld, cutoff: f64) -> Result<VirtualGraph, WorldError> {
    for (i, poly) in world.obstacles.iter().enumerate() {
        if poly.len() < 3 || geom::signed_area(poly).abs() <= EPS {
            return Err(WorldError::DegenerateGeometry(i));
        }
    }
    let mut nodes: Vec<VNode> = Vec::new();
    let push = |nodes: &mut Vec<VNode>, pos: Point, kind: NodeKind| {
        if !nodes.iter().any(|n| n.pos.dist(pos) <= EPS) {
            nodes.push(VNode { pos, kind });
        }
    };
    for poi in &world.pois {
        push(&mut nodes, poi.pos, NodeKind::Poi(poi.name.clone()));
    }
    for poly in &world.obstacles {
        for &c in poly {
            push(&mut nodes, c, NodeKind::Corner);
        }
    }

    let index = PolygonIndex::new(world, cutoff);
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a].pos.x.partial_cmp(&nodes[b].pos.x).unwrap().then(a.cmp(&b)));
    let mut edges = Vec::new();
    let mut cands = Vec::new();
    for (oi, &i) in order.iter().enumerate() {
        let a = nodes[i].pos;
        for &j in &order[oi + 1..] {
            let b = nodes[j].pos;
            if b.x - a.x > cutoff + EPS {
                break;
            }
            let d = a.dist(b);
            if d > cutoff + EPS || d <= EPS {
                continue;
            }
            index.candidates(a, b, &mut cands);
            if segment_clear_among(world, &cands, a, b) {
                edges.push((i.min(j) as NodeId, i.max(j) as NodeId, d));
            }
        }
    }
    VirtualGraph::from_edges(nodes, &edges, cutoff)
}

/// Uniform bucket grid over polygon bounding boxes.
struct PolygonIndex {
    origin: Point,
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<usize>>,
    boxes: Vec<Rect>,
}

impl PolygonIndex {
    fn new(world: &VirtualWorld, cutoff: f64) -> Self {
        let b = world.bounds;
        let span = b.width().max(b.height()).max(1e-6);
        let cell = if cutoff.is_finite() { cutoff.max(span / 256.0) } else { span / 16.0 }.max(1e-6);
        let cols = ((b.width() / cell) as usize + 1).min(4096);
        let rows = ((b.height() / cell) as usize + 1).min(4096);
        let boxes: Vec<Rect> = world.obstacles.iter().map(|o| geom::bounding_rect(o)).collect();
        let mut idx = PolygonIndex { origin: b.min, cell, cols, rows, buckets: alloc::vec![Vec::new(); cols * rows], boxes };
        for i in 0..idx.boxes.len() {
            let r = idx.boxes[i];
            let (c0, r0) = idx.coords(r.min);
            let (c1, r1) = idx.coords(r.max);
            for rr in r0..=r1 {
                for cc in c0..=c1 {
                    idx.buckets[rr * cols + cc].push(i);
                }
            }
        }
        idx
    }

    fn coords(&self, p: Point) -> (usize, usize) {
        let c = math::floor((p.x - self.origin.x) / self.cell).max(0.0) as usize;
        let r = math::floor((p.y - self.origin.y) / self.cell).max(0.0) as usize;
        (c.min(self.cols - 1), r.min(self.rows - 1))
    }

    fn candidates(&self, a: Point, b: Point, out: &mut Vec<usize>) {
        out.clear();
        let bbox = Rect::of_segment(a, b);
        let (c0, r0) = self.coords(Point::new(bbox.min.x - EPS, bbox.min.y - EPS));
        let (c1, r1) = self.coords(Point::new(bbox.max.x + EPS, bbox.max.y + EPS));
        for rr in r0..=r1 {
            for cc in c0..=c1 {
                for &i in &self.buckets[rr * self.cols + cc] {
                    if self.boxes[i].overlaps(&bbox) {
                        out.push(i);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

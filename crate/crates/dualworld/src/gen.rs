//! Seeded world generators: perfect mazes and block-city layouts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dualworld_core::exact::{basic_dp, min_cost_path, Query};
use dualworld_core::geom::Point;
use dualworld_core::state::LocoState;
use dualworld_core::table::TableSpace;
use dualworld_core::world::{NodeKind, VNode, VirtualGraph};

use crate::io::{CostModelSpec, PhysicalSpec, PoiSpec, VirtualSpec, WorldFile};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("open ratio must lie strictly between 0 and 1, got {0}")]
    InvalidRatio(f64),
    #[error("maze needs at least 1x1 cells")]
    TooSmall,
    #[error("{0} POIs do not fit in {1} free cells")]
    TooManyPois(usize, usize),
}

/// A square room of `n x n` free cells, walled in.
pub fn open_room_spec(cell_size: f64, n: usize) -> PhysicalSpec {
    let wall = "#".repeat(n + 2);
    let mid = format!("#{}#", ".".repeat(n));
    let mut rows = vec![wall.clone()];
    rows.extend(std::iter::repeat(mid).take(n));
    rows.push(wall);
    PhysicalSpec { cell_size, origin: [0.0, 0.0], rows }
}

/// A perfect maze on a block lattice: `(2w+1) x (2h+1)` blocks of side
/// `unit`, where cells sit at odd coordinates and walls elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct Maze {
    pub width: usize,
    pub height: usize,
    pub unit: f64,
    /// `wall[by * (2w+1) + bx]`.
    pub wall: Vec<bool>,
}

impl Maze {
    fn bw(&self) -> usize {
        2 * self.width + 1
    }

    fn is_wall(&self, bx: usize, by: usize) -> bool {
        self.wall[by * self.bw() + bx]
    }

    /// Cells reachable in one step from cell `(x, y)`.
    pub fn cell_neighbors(&self, x: usize, y: usize) -> Vec<(usize, usize)> {
        let (bx, by) = (2 * x + 1, 2 * y + 1);
        let mut out = Vec::new();
        if x > 0 && !self.is_wall(bx - 1, by) {
            out.push((x - 1, y));
        }
        if x + 1 < self.width && !self.is_wall(bx + 1, by) {
            out.push((x + 1, y));
        }
        if y > 0 && !self.is_wall(bx, by - 1) {
            out.push((x, y - 1));
        }
        if y + 1 < self.height && !self.is_wall(bx, by + 1) {
            out.push((x, y + 1));
        }
        out
    }

    pub fn cell_name(x: usize, y: usize) -> String {
        format!("c{x}_{y}")
    }

    pub fn cell_center(&self, x: usize, y: usize) -> (f64, f64) {
        ((2 * x) as f64 * self.unit + 1.5 * self.unit, (2 * y) as f64 * self.unit + 1.5 * self.unit)
    }

    /// Wall runs of each block row as rectangles `[x0, y0, x1, y1]`.
    pub fn wall_rects(&self) -> Vec<[f64; 4]> {
        let (bw, bh, u) = (self.bw(), 2 * self.height + 1, self.unit);
        let mut out = Vec::new();
        for by in 0..bh {
            let mut bx = 0;
            while bx < bw {
                if !self.is_wall(bx, by) {
                    bx += 1;
                    continue;
                }
                let start = bx;
                while bx < bw && self.is_wall(bx, by) {
                    bx += 1;
                }
                out.push([start as f64 * u, by as f64 * u, bx as f64 * u, (by + 1) as f64 * u]);
            }
        }
        out
    }

    /// World file with a POI at every cell center and the given room.
    pub fn to_world(&self, physical: PhysicalSpec, orientations: u16, gain_count: usize, cost_model: CostModelSpec) -> WorldFile {
        let obstacles = self.wall_rects().into_iter().map(|r| vec![[r[0], r[1]], [r[2], r[1]], [r[2], r[3]], [r[0], r[3]]]).collect();
        let mut pois = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                let (cx, cy) = self.cell_center(x, y);
                pois.push(PoiSpec { name: Maze::cell_name(x, y), x: cx, y: cy });
            }
        }
        let side = |n: usize| (2 * n + 1) as f64 * self.unit;
        WorldFile {
            virtual_world: VirtualSpec { bounds: [0.0, 0.0, side(self.width), side(self.height)], obstacles, pois },
            physical,
            orientations,
            cutoff: Some(2.0 * self.unit + 1e-6),
            gain_count,
            cost_model,
        }
    }
}

/// Randomized depth-first carving of a `width x height` perfect maze.
pub fn generate_maze(width: usize, height: usize, seed: u64, unit: f64) -> Result<Maze, GenError> {
    if width == 0 || height == 0 {
        return Err(GenError::TooSmall);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (bw, bh) = (2 * width + 1, 2 * height + 1);
    let mut wall = vec![true; bw * bh];
    let mut seen = vec![false; width * height];
    let mut stack = vec![(0usize, 0usize)];
    seen[0] = true;
    wall[bw + 1] = false;
    while let Some(&(x, y)) = stack.last() {
        let mut next: Vec<(usize, usize)> = Vec::new();
        if x > 0 {
            next.push((x - 1, y));
        }
        if x + 1 < width {
            next.push((x + 1, y));
        }
        if y > 0 {
            next.push((x, y - 1));
        }
        if y + 1 < height {
            next.push((x, y + 1));
        }
        next.retain(|&(a, b)| !seen[b * width + a]);
        match next.choose(&mut rng) {
            None => {
                stack.pop();
            }
            Some(&(a, b)) => {
                seen[b * width + a] = true;
                wall[(2 * b + 1) * bw + 2 * a + 1] = false;
                wall[(y + b + 1) * bw + x + a + 1] = false;
                stack.push((a, b));
            }
        }
    }
    Ok(Maze { width, height, unit, wall })
}

/// A `side x side` lattice of 1 m lots filled with non-overlapping
/// rectangular blocks until exactly `round((1 - open_ratio) * side^2)` lots
/// are covered, with `pois` POIs on random free lots.
pub fn generate_synthetic_city(pois: usize, open_ratio: f64, seed: u64, side: usize) -> Result<WorldFile, GenError> {
    if !(open_ratio > 0.0 && open_ratio < 1.0) {
        return Err(GenError::InvalidRatio(open_ratio));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = side * side;
    let target = ((1.0 - open_ratio) * n as f64).round() as usize;
    let mut used = vec![false; n];
    let mut covered = 0;
    let mut rects: Vec<[usize; 4]> = Vec::new();
    let mut tries = 0;
    while covered < target && tries < 20 * n {
        tries += 1;
        let (w, h) = (rng.gen_range(1..=4usize), rng.gen_range(1..=4usize));
        if w * h > target - covered || w > side || h > side {
            continue;
        }
        let (x, y) = (rng.gen_range(0..=side - w), rng.gen_range(0..=side - h));
        if (y..y + h).any(|j| (x..x + w).any(|i| used[j * side + i])) {
            continue;
        }
        for j in y..y + h {
            for i in x..x + w {
                used[j * side + i] = true;
            }
        }
        covered += w * h;
        rects.push([x, y, x + w, y + h]);
    }
    let mut free: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
    free.shuffle(&mut rng);
    while covered < target {
        let i = free.pop().expect("enough free lots");
        used[i] = true;
        covered += 1;
        rects.push([i % side, i / side, i % side + 1, i / side + 1]);
    }
    if free.len() < pois {
        return Err(GenError::TooManyPois(pois, free.len()));
    }
    let poi_specs = free
        .iter()
        .take(pois)
        .enumerate()
        .map(|(k, &i)| PoiSpec { name: format!("p{k}"), x: (i % side) as f64 + 0.5, y: (i / side) as f64 + 0.5 })
        .collect();
    let obstacles = rects
        .iter()
        .map(|r| {
            let [x0, y0, x1, y1] = r.map(|v| v as f64);
            vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]]
        })
        .collect();
    Ok(WorldFile {
        virtual_world: VirtualSpec { bounds: [0.0, 0.0, side as f64, side as f64], obstacles, pois: poi_specs },
        physical: open_room_spec(0.3, 10),
        orientations: 8,
        cutoff: Some(3.0),
        gain_count: 3,
        cost_model: CostModelSpec::default(),
    })
}

/// Shape of a random transition-table instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableParams {
    /// Virtual nodes, laid out on a jittered grid.
    pub nodes: usize,
    /// Physical cells a state may occupy.
    pub cells: u32,
    /// Headings in each world.
    pub headings: u16,
    /// Loco-states per virtual node.
    pub states_per_node: usize,
    /// Chance that a state pair across an edge gets a transition.
    pub density: f64,
}

impl Default for TableParams {
    fn default() -> Self {
        TableParams { nodes: 9, cells: 3, headings: 2, states_per_node: 4, density: 0.5 }
    }
}

/// A random instance with a budget between the cheapest and the
/// unconstrained-shortest cost, so most queries are feasible but binding.
pub fn random_table_instance(seed: u64, p: TableParams) -> (TableSpace, Query) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (p.nodes as f64).sqrt().ceil() as usize;
    let mut nodes = Vec::with_capacity(p.nodes);
    for i in 0..p.nodes {
        let (x, y) = ((i % side) as f64, (i / side) as f64);
        let pos = Point::new(2.0 * x + rng.gen_range(-0.4..0.4), 2.0 * y + rng.gen_range(-0.4..0.4));
        nodes.push(VNode { pos, kind: NodeKind::Poi(format!("n{i}")) });
    }
    let mut edges = Vec::new();
    for i in 0..p.nodes {
        for j in i + 1..p.nodes {
            let (dx, dy) = ((i % side).abs_diff(j % side), (i / side).abs_diff(j / side));
            let grid_nb = dx + dy == 1;
            if grid_nb || (dx == 1 && dy == 1 && rng.gen_bool(0.3)) {
                // Rounded up so edge lengths never undercut straight-line distance.
                let l = (nodes[i].pos.dist(nodes[j].pos) * 10.0 - 1e-9).ceil() / 10.0;
                edges.push((i as u32, j as u32, l.max(0.1)));
            }
        }
    }
    let graph = VirtualGraph::from_edges(nodes, &edges, f64::INFINITY).expect("random graph is well formed");
    let mut all: Vec<(u32, u16)> = (0..p.cells).flat_map(|c| (0..p.headings).map(move |h| (c, h))).collect();
    let mut per_node = Vec::with_capacity(p.nodes);
    for v in 0..p.nodes as u32 {
        all.shuffle(&mut rng);
        let k = p.states_per_node.min(all.len());
        per_node.push(all[..k].iter().map(|&(c, h)| LocoState::new(v, rng.gen_range(0..p.headings), c, h)).collect::<Vec<_>>());
    }
    let mut space = TableSpace::new(graph);
    for states in &per_node {
        for &s in states {
            space.add_state(s).expect("node exists");
        }
    }
    const COSTS: [f64; 6] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0];
    for &(u, v, _) in &edges {
        for (a, b) in [(u, v), (v, u)] {
            for &from in &per_node[a as usize] {
                let targets = &per_node[b as usize];
                let forced = rng.gen_range(0..targets.len());
                for (i, &to) in targets.iter().enumerate() {
                    if i == forced || rng.gen_bool(p.density) {
                        let c = *COSTS.choose(&mut rng).unwrap();
                        space.add_transition(from, to, c).expect("edge exists");
                    }
                }
            }
        }
    }
    for c in 0..p.cells {
        space.set_clearance(c, rng.gen_range(0.2..1.5));
    }
    let start = per_node[0][0];
    let target = (p.nodes - 1) as u32;
    let probe = Query::new(start, target, f64::INFINITY);
    let cheapest = min_cost_path(&space, &probe).map_or(0.0, |r| r.cost);
    let unconstrained = basic_dp(&space, &probe).map_or(cheapest, |r| r.cost);
    let budget = cheapest + rng.gen_range(0.0..=1.0) * (unconstrained - cheapest);
    (space, Query::new(start, target, budget))
}

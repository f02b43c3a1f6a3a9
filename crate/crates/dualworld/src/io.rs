//! JSON world, cost-model and table formats, and MIL range CSV export.
//!
//! A world file:
//!
//! ```json
//! {
//!   "virtual": {
//!     "bounds": [0, 0, 20, 10],
//!     "obstacles": [[[2, 2], [4, 2], [4, 5], [2, 5]]],
//!     "pois": [{"name": "gate", "x": 1, "y": 1}]
//!   },
//!   "physical": {"cell_size": 0.3, "origin": [0, 0], "rows": ["#####", "#...#", "#####"]},
//!   "orientations": 8,
//!   "cutoff": 1.5,
//!   "gain_count": 3,
//!   "cost_model": {"kind": "detection_threshold", "reset_cost": 1.0}
//! }
//! ```
//!
//! Obstacles are simple polygons listed counter-clockwise. Physical rows are
//! written top-down with `#` for blocked cells and `.` for free ones.

use std::fs;
use std::path::Path;

use dualworld_core::geom::{Point, Rect};
use dualworld_core::grid::{GridError, PhysicalGrid};
use dualworld_core::kinematic::{walkable_graph, GainGrids, KinematicSpace, WalkMemo};
use dualworld_core::kinematics::{CostKind, CostModel, Interval, PerGain, Worlds};
use dualworld_core::mil::MilRange;
use dualworld_core::orient::OrientationSet;
use dualworld_core::state::LocoState;
use dualworld_core::table::{TableError, TableSpace};
use dualworld_core::world::{build_visibility_graph, NodeKind, Poi, VNode, VirtualGraph, VirtualWorld, WorldError};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    World(#[from] WorldError),
    #[error("{0}")]
    Grid(#[from] GridError),
    #[error("{0}")]
    Table(#[from] TableError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoiSpec {
    pub name: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VirtualSpec {
    /// `[min_x, min_y, max_x, max_y]`.
    pub bounds: [f64; 4],
    #[serde(default)]
    pub obstacles: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub pois: Vec<PoiSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSpec {
    pub cell_size: f64,
    #[serde(default)]
    pub origin: [f64; 2],
    pub rows: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CostKindSpec {
    UsageCount,
    DetectionLikelihood,
    #[default]
    DetectionThreshold,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    /// Closed interval.
    pub translation: [f64; 2],
    /// Open interval.
    pub rotation: [f64; 2],
    /// Closed interval.
    pub curvature: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct CurveSpec {
    #[serde(default)]
    pub translation: Vec<[f64; 2]>,
    #[serde(default)]
    pub rotation: Vec<[f64; 2]>,
    #[serde(default)]
    pub curvature: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModelSpec {
    #[serde(default)]
    pub kind: CostKindSpec,
    #[serde(default = "one")]
    pub reset_cost: f64,
    #[serde(default)]
    pub reset_angle_weighted: bool,
    #[serde(default)]
    pub thresholds: Option<ThresholdSpec>,
    /// `(gain, cost)` points for the custom kind.
    #[serde(default)]
    pub custom: Option<CurveSpec>,
}

fn one() -> f64 {
    1.0
}

impl Default for CostModelSpec {
    fn default() -> Self {
        CostModelSpec { kind: CostKindSpec::default(), reset_cost: 1.0, reset_angle_weighted: false, thresholds: None, custom: None }
    }
}

impl CostModelSpec {
    pub fn to_model(&self) -> CostModel {
        let mut m = CostModel::default();
        m.kind = match self.kind {
            CostKindSpec::UsageCount => CostKind::UsageCount,
            CostKindSpec::DetectionLikelihood => CostKind::DetectionLikelihood,
            CostKindSpec::DetectionThreshold => CostKind::DetectionThreshold,
            CostKindSpec::Custom => CostKind::Custom,
        };
        m.reset_cost = self.reset_cost;
        m.reset_angle_weighted = self.reset_angle_weighted;
        if let Some(t) = &self.thresholds {
            m.thresholds = PerGain {
                translation: Interval::closed(t.translation[0], t.translation[1]),
                rotation: Interval::open(t.rotation[0], t.rotation[1]),
                curvature: Interval::closed(t.curvature[0], t.curvature[1]),
            };
        }
        if let Some(c) = &self.custom {
            let pts = |v: &[[f64; 2]]| v.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>();
            m.custom = PerGain { translation: pts(&c.translation), rotation: pts(&c.rotation), curvature: pts(&c.curvature) };
        }
        m
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

fn default_k() -> u16 {
    8
}

fn default_gains() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldFile {
    #[serde(rename = "virtual")]
    pub virtual_world: VirtualSpec,
    pub physical: PhysicalSpec,
    #[serde(default = "default_k")]
    pub orientations: u16,
    /// Longest visibility edge; absent means unbounded.
    #[serde(default)]
    pub cutoff: Option<f64>,
    #[serde(default = "default_gains")]
    pub gain_count: usize,
    #[serde(default)]
    pub cost_model: CostModelSpec,
}

/// A world file turned into solver inputs.
#[derive(Clone, Debug)]
pub struct LoadedWorld {
    pub world: VirtualWorld,
    pub worlds: Worlds,
    pub model: CostModel,
    pub gains: GainGrids,
}

impl LoadedWorld {
    pub fn space<M: WalkMemo>(&self, memo: M) -> KinematicSpace<M> {
        KinematicSpace::with_memo(self.worlds.clone(), self.model.clone(), self.gains.clone(), memo)
    }

    /// Free cell nearest the room center, used as the default start cell.
    pub fn center_cell(&self) -> u32 {
        let g = &self.worlds.grid;
        let b = g.bounds();
        let c = Point::new((b.min.x + b.max.x) / 2.0, (b.min.y + b.max.y) / 2.0);
        g.free_cells().min_by(|&a, &b| g.center(a).dist(c).total_cmp(&g.center(b).dist(c)).then(a.cmp(&b))).expect("room has a free cell")
    }

    pub fn poi(&self, name: &str) -> Result<u32, IoError> {
        self.worlds.graph.find_poi(name).ok_or_else(|| IoError::Invalid(format!("unknown POI `{name}`")))
    }
}

impl WorldFile {
    pub fn load(path: &Path) -> Result<Self, IoError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), IoError> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn virtual_world(&self) -> VirtualWorld {
        let v = &self.virtual_world;
        let b = v.bounds;
        VirtualWorld::new(
            Rect::new(Point::new(b[0], b[1]), Point::new(b[2], b[3])),
            v.obstacles.iter().map(|poly| poly.iter().map(|p| Point::new(p[0], p[1])).collect()).collect(),
            v.pois.iter().map(|p| Poi { name: p.name.clone(), pos: Point::new(p.x, p.y) }).collect(),
        )
    }

    pub fn grid(&self) -> Result<PhysicalGrid, IoError> {
        let p = &self.physical;
        Ok(PhysicalGrid::from_rows(Point::new(p.origin[0], p.origin[1]), p.cell_size, &p.rows)?)
    }

    pub fn build(&self) -> Result<LoadedWorld, IoError> {
        if self.orientations == 0 {
            return Err(IoError::Invalid("orientations must be positive".into()));
        }
        let world = self.virtual_world();
        world.validate()?;
        let graph = build_visibility_graph(&world, self.cutoff.unwrap_or(f64::INFINITY))?;
        let model = self.cost_model.to_model();
        let gains = GainGrids::from_model(&model, self.gain_count);
        let mut worlds = Worlds { graph, grid: self.grid()?, orient: OrientationSet::new(self.orientations) };
        worlds.graph = walkable_graph(&worlds);
        Ok(LoadedWorld { world, worlds, model, gains })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionSpec {
    /// `[v_loc, v_heading, p_loc, p_heading]`.
    pub from: [u32; 4],
    pub to: [u32; 4],
    pub cost: f64,
}

/// A table space: virtual graph with explicit lengths plus MIL records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableFile {
    pub nodes: Vec<PoiSpec>,
    /// `[u, v, length]`.
    pub edges: Vec<(u32, u32, f64)>,
    pub transitions: Vec<TransitionSpec>,
    /// `[length, alpha, beta]`; computed from the records when absent.
    #[serde(default)]
    pub range: Option<Vec<[f64; 3]>>,
    /// `[p_loc, clearance]`.
    #[serde(default)]
    pub clearance: Vec<(u32, f64)>,
    #[serde(default)]
    pub correction_cost: Option<f64>,
}

fn state_of(a: [u32; 4]) -> LocoState {
    LocoState::new(a[0], a[1] as u16, a[2], a[3] as u16)
}

impl TableFile {
    pub fn load(path: &Path) -> Result<Self, IoError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn build(&self) -> Result<TableSpace, IoError> {
        let nodes = self.nodes.iter().map(|n| VNode { pos: Point::new(n.x, n.y), kind: NodeKind::Poi(n.name.clone()) }).collect();
        let graph = VirtualGraph::from_edges(nodes, &self.edges, f64::INFINITY)?;
        let mut sp = TableSpace::new(graph);
        for t in &self.transitions {
            sp.add_transition(state_of(t.from), state_of(t.to), t.cost)?;
        }
        if let Some(r) = &self.range {
            let mut range = MilRange::new(dualworld_core::mil::DEFAULT_QUANTUM);
            for e in r {
                range.set(e[0], e[1], e[2]);
            }
            sp.set_range(range);
        }
        for &(p, d) in &self.clearance {
            sp.set_clearance(p, d);
        }
        if let Some(c) = self.correction_cost {
            sp.set_correction_cost(c);
        }
        Ok(sp)
    }
}

/// Writes `length_bin,alpha,beta` rows.
pub fn write_range_csv<W: std::io::Write>(range: &MilRange, out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["length_bin", "alpha", "beta"])?;
    for (l, a, b) in range.iter() {
        w.write_record([format!("{l:.6}"), format!("{a:.6}"), format!("{b:.6}")])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_range_csv<R: std::io::Read>(input: R, quantum: f64) -> Result<MilRange, IoError> {
    let mut r = csv::Reader::from_reader(input);
    let mut range = MilRange::new(quantum);
    for rec in r.deserialize() {
        let (l, a, b): (f64, f64, f64) = rec?;
        range.set(l, a, b);
    }
    Ok(range)
}

//! Scenario files, the benchmark matrix and its CSV reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use dualworld_core::baselines::{cola_estimated, ksp_reset, mcp, ResetRealizer};
use dualworld_core::dewn::{solve, Dewn, DewnOptions, Ordering, Pruning};
use dualworld_core::exact::{basic_dp, Query};
use dualworld_core::mil::MilRange;
use dualworld_core::paths::length_distances;
use dualworld_core::space::{RwPath, Space};
use dualworld_core::state::LocoState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::{CostModelSpec, IoError, LoadedWorld, WorldFile};
use crate::memo::SharedMemo;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    BasicDp,
    Dewn,
    /// Reference path only.
    SDewn,
    DewnCos,
    Mcp,
    Ksp,
    Cola,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [Algorithm::BasicDp, Algorithm::Dewn, Algorithm::SDewn, Algorithm::DewnCos, Algorithm::Mcp, Algorithm::Ksp, Algorithm::Cola];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::BasicDp => "basic_dp",
            Algorithm::Dewn => "dewn",
            Algorithm::SDewn => "s_dewn",
            Algorithm::DewnCos => "dewn_cos",
            Algorithm::Mcp => "mcp",
            Algorithm::Ksp => "ksp",
            Algorithm::Cola => "cola",
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// Options block shared by scenario files and the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct OptionsSpec {
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub cos_simplify: bool,
    #[serde(default)]
    pub reference_only: bool,
    /// Any of `ILSP`, `SLSP`, `ULSL`.
    #[serde(default)]
    pub disable_pruning: Vec<String>,
    /// Any of `TECO`, `PWSO`, `VWNO`.
    #[serde(default)]
    pub disable_ordering: Vec<String>,
}

impl OptionsSpec {
    pub fn to_options(&self, epsilon: f64) -> Result<DewnOptions, IoError> {
        let mut pruning = Pruning::default();
        for p in &self.disable_pruning {
            match p.to_ascii_uppercase().as_str() {
                "ILSP" => pruning.ilsp = false,
                "SLSP" => pruning.slsp = false,
                "ULSL" => pruning.ulsl = false,
                other => return Err(IoError::Invalid(format!("unknown pruning rule `{other}`"))),
            }
        }
        let mut ordering = Ordering::default();
        for o in &self.disable_ordering {
            match o.to_ascii_uppercase().as_str() {
                "TECO" => ordering.teco = false,
                "PWSO" => ordering.pwso = false,
                "VWNO" => ordering.vwno = false,
                other => return Err(IoError::Invalid(format!("unknown ordering rule `{other}`"))),
            }
        }
        let d = DewnOptions::default();
        Ok(DewnOptions {
            epsilon,
            delta: self.delta.or(d.delta),
            cos_simplify: self.cos_simplify,
            reference_only: self.reference_only,
            ordering,
            pruning,
            quantum: d.quantum,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub start: String,
    pub target: String,
    pub budget: f64,
    #[serde(default)]
    pub v_heading: u16,
    /// `[col, row]`; the free cell nearest the room center when absent.
    #[serde(default)]
    pub cell: Option<[usize; 2]>,
    #[serde(default)]
    pub p_heading: u16,
}

/// Random POI pairs whose straight-line distance lies in
/// `[min_dist, max_dist]`, with budgets drawn from `budget`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub count: usize,
    pub min_dist: f64,
    pub max_dist: f64,
    pub budget: [f64; 2],
}

fn default_eps() -> f64 {
    0.1
}

fn default_k() -> usize {
    5
}

fn default_parallel() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// World file, relative to the scenario file.
    pub world: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eps")]
    pub epsilon: f64,
    /// Candidate count for the k-shortest-paths baseline.
    #[serde(default = "default_k")]
    pub k: usize,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub queries: Vec<QuerySpec>,
    #[serde(default)]
    pub sampling: Option<SamplingSpec>,
    #[serde(default)]
    pub options: OptionsSpec,
    /// Replaces the world's cost model.
    #[serde(default)]
    pub cost_model: Option<CostModelSpec>,
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<(Self, WorldFile), IoError> {
        let mut sc: Scenario = serde_json::from_str(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut wf = WorldFile::load(&base.join(&sc.world))?;
        if let Some(cm) = sc.cost_model.take() {
            wf.cost_model = cm;
        }
        Ok((sc, wf))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedQuery {
    pub id: usize,
    pub query: Query,
}

/// Explicit queries first, then sampled ones, all deterministic in the seed.
pub fn resolve_queries(sc: &Scenario, lw: &LoadedWorld) -> Result<Vec<ResolvedQuery>, IoError> {
    let grid = &lw.worlds.grid;
    let mut out = Vec::new();
    for q in &sc.queries {
        let cell = match q.cell {
            Some([c, r]) => {
                if c >= grid.cols() || r >= grid.rows() || !grid.is_free(grid.cell(c, r)) {
                    return Err(IoError::Invalid(format!("cell [{c}, {r}] is not a free cell")));
                }
                grid.cell(c, r)
            }
            None => lw.center_cell(),
        };
        let start = LocoState::new(lw.poi(&q.start)?, q.v_heading, cell, q.p_heading);
        out.push(ResolvedQuery { id: out.len(), query: Query::new(start, lw.poi(&q.target)?, q.budget) });
    }
    if let Some(s) = &sc.sampling {
        out.extend(sample_queries(lw, s, sc.seed, out.len()));
    }
    Ok(out)
}

pub fn sample_queries(lw: &LoadedWorld, s: &SamplingSpec, seed: u64, first_id: usize) -> Vec<ResolvedQuery> {
    let g = &lw.worlds.graph;
    let k = lw.worlds.orient.count();
    let pois: Vec<u32> = g.poi_ids().collect();
    let cells: Vec<u32> = lw.worlds.grid.free_cells().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    if pois.len() < 2 || cells.is_empty() {
        return out;
    }
    let mut attempts = 0;
    while out.len() < s.count && attempts < 1000 * s.count.max(1) {
        attempts += 1;
        let a = pois[rng.gen_range(0..pois.len())];
        let b = pois[rng.gen_range(0..pois.len())];
        let d = g.pos(a).dist(g.pos(b));
        if a == b || d < s.min_dist || d > s.max_dist || !length_distances(g, a)[b as usize].is_finite() {
            continue;
        }
        let start = LocoState::new(a, rng.gen_range(0..k), cells[rng.gen_range(0..cells.len())], rng.gen_range(0..k));
        let budget = if s.budget[1] > s.budget[0] { rng.gen_range(s.budget[0]..=s.budget[1]) } else { s.budget[0] };
        out.push(ResolvedQuery { id: first_id + out.len(), query: Query::new(start, b, budget) });
    }
    out
}

/// One (algorithm, query) result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub algorithm: Algorithm,
    pub query_id: usize,
    pub feasible: bool,
    /// Virtual length; absent when no path was produced.
    pub length: Option<f64>,
    /// Realized MIL cost; absent when no path was produced.
    pub cost: Option<f64>,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub algorithm: Algorithm,
    pub queries: usize,
    pub feasible: usize,
    pub feasibility: f64,
    /// Over feasible results only.
    pub mean_length: Option<f64>,
    pub mean_cost: Option<f64>,
    pub mean_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct RunReport {
    pub rows: Vec<Row>,
    /// Seconds spent building shared tables before any query.
    pub precompute_seconds: f64,
}

impl RunReport {
    pub fn aggregates(&self) -> Vec<Aggregate> {
        let mut by: BTreeMap<Algorithm, Vec<&Row>> = BTreeMap::new();
        for r in &self.rows {
            by.entry(r.algorithm).or_default().push(r);
        }
        by.into_iter()
            .map(|(algorithm, rows)| {
                let feas: Vec<&&Row> = rows.iter().filter(|r| r.feasible).collect();
                let mean = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
                Aggregate {
                    algorithm,
                    queries: rows.len(),
                    feasible: feas.len(),
                    feasibility: feas.len() as f64 / rows.len() as f64,
                    mean_length: mean(feas.iter().filter_map(|r| r.length).collect()),
                    mean_cost: mean(feas.iter().filter_map(|r| r.cost).collect()),
                    mean_seconds: rows.iter().map(|r| r.seconds).sum::<f64>() / rows.len() as f64,
                }
            })
            .collect()
    }

    pub fn row(&self, algorithm: Algorithm, query_id: usize) -> Option<&Row> {
        self.rows.iter().find(|r| r.algorithm == algorithm && r.query_id == query_id)
    }

    pub fn write_rows<W: std::io::Write>(&self, out: W) -> Result<(), IoError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["algorithm", "query_id", "feasible", "length", "cost", "seconds"])?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.9}"));
        for r in &self.rows {
            w.write_record([r.algorithm.name().to_string(), r.query_id.to_string(), r.feasible.to_string(), opt(r.length), opt(r.cost), format!("{:.6}", r.seconds)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_aggregates<W: std::io::Write>(&self, out: W) -> Result<(), IoError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["algorithm", "queries", "feasible", "feasibility", "mean_length", "mean_cost", "mean_seconds"])?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.9}"));
        for a in self.aggregates() {
            w.write_record([
                a.algorithm.name().to_string(),
                a.queries.to_string(),
                a.feasible.to_string(),
                format!("{:.6}", a.feasibility),
                opt(a.mean_length),
                opt(a.mean_cost),
                format!("{:.6}", a.mean_seconds),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shared, read-only inputs for running algorithms on one space.
pub struct Bench<'a, S: ?Sized> {
    pub space: &'a S,
    pub range: MilRange,
    pub cos_range: Option<MilRange>,
    pub opts: DewnOptions,
    pub k: usize,
}

impl<'a, S: Space + ResetRealizer + ?Sized> Bench<'a, S> {
    pub fn new(space: &'a S, opts: DewnOptions, k: usize, with_cos: bool) -> Self {
        let range = space.mil_range(opts.quantum);
        let cos_range = with_cos.then(|| space.cos_mil_range(opts.quantum));
        Bench { space, range, cos_range, opts, k }
    }

    /// Path produced by `algo`, and whether it is feasible.
    pub fn solve(&self, algo: Algorithm, q: &Query) -> Option<(RwPath, bool)> {
        let sp = self.space;
        let fit = |p: RwPath| {
            let ok = q.within(p.cost);
            (p, ok)
        };
        match algo {
            Algorithm::BasicDp => basic_dp(sp, q).ok().map(fit),
            Algorithm::Dewn => solve(sp, &self.range, q, &DewnOptions { cos_simplify: false, reference_only: false, ..self.opts }).ok().map(|o| fit(o.path)),
            Algorithm::SDewn => solve(sp, &self.range, q, &DewnOptions { cos_simplify: false, reference_only: true, ..self.opts }).ok().map(|o| fit(o.path)),
            Algorithm::DewnCos => {
                let cos = self.cos_range.clone().unwrap_or_else(|| sp.cos_mil_range(self.opts.quantum));
                let d = Dewn::with_ranges(sp, self.range.clone(), cos);
                d.solve(q, &DewnOptions { cos_simplify: true, ..self.opts }).ok().map(|o| {
                    // The collapsed solution may exceed the budget by the
                    // correction allowance; report against the budget.
                    fit(o.path)
                })
            }
            Algorithm::Mcp => mcp(sp, q).ok().map(fit),
            Algorithm::Ksp => ksp_reset(sp, q, self.k).best.map(fit),
            Algorithm::Cola => cola_estimated(sp, &self.range, q).ok().map(fit),
        }
    }

    pub fn row(&self, algo: Algorithm, id: usize, q: &Query) -> Row {
        let t = Instant::now();
        let res = self.solve(algo, q);
        let seconds = t.elapsed().as_secs_f64();
        match res {
            Some((p, feasible)) => Row { algorithm: algo, query_id: id, feasible, length: Some(p.length), cost: Some(p.cost), seconds },
            None => Row { algorithm: algo, query_id: id, feasible: false, length: None, cost: None, seconds },
        }
    }
}

impl<'a, S: Space + ResetRealizer + Sync + ?Sized> Bench<'a, S> {
    /// Runs every algorithm on every query. Rows are ordered by query, then
    /// by the algorithm list.
    pub fn run(&self, algos: &[Algorithm], queries: &[ResolvedQuery], parallel: bool) -> Vec<Row> {
        let one = |rq: &ResolvedQuery| algos.iter().map(|&a| self.row(a, rq.id, &rq.query)).collect::<Vec<_>>();
        if parallel {
            queries.par_iter().flat_map_iter(one).collect()
        } else {
            queries.iter().flat_map(one).collect()
        }
    }
}

/// Loads nothing; runs the scenario against an already built world.
pub fn run_matrix(sc: &Scenario, lw: &LoadedWorld) -> Result<RunReport, IoError> {
    let queries = resolve_queries(sc, lw)?;
    let opts = sc.options.to_options(sc.epsilon)?;
    let space = lw.space(SharedMemo::default());
    let t = Instant::now();
    let bench = Bench::new(&space, opts, sc.k, sc.algorithms.contains(&Algorithm::DewnCos));
    let precompute_seconds = t.elapsed().as_secs_f64();
    Ok(RunReport { rows: bench.run(&sc.algorithms, &queries, sc.parallel), precompute_seconds })
}

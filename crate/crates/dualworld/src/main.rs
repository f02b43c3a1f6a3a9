use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dualworld::gen::{generate_maze, generate_synthetic_city, open_room_spec};
use dualworld::harness::{run_matrix, Algorithm, Bench, OptionsSpec, Scenario};
use dualworld::io::{write_range_csv, CostModelSpec, IoError, LoadedWorld, TableFile, WorldFile};
use dualworld::memo::SharedMemo;
use dualworld::svg::export_paths_svg;
use dualworld_core::baselines::ResetRealizer;
use dualworld_core::dewn::{Dewn, DewnOptions};
use dualworld_core::exact::Query;
use dualworld_core::fixtures::{detour_board, lagrange_board};
use dualworld_core::space::{RwPath, Space};
use dualworld_core::spatial::SpatialEngine;
use dualworld_core::state::LocoState;
use dualworld_core::table::TableSpace;

#[derive(Parser)]
#[command(name = "dualworld", version, about = "Budgeted path planning across a virtual and a physical world")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one query and print the path with its operations.
    Solve(SolveArgs),
    /// Run a scenario file and write CSV reports.
    Bench {
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory for rows.csv and aggregates.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The k POIs with the shortest feasible paths.
    Knn {
        #[command(flatten)]
        world: WorldArgs,
        #[command(flatten)]
        start: StartArgs,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long = "C")]
        budget: f64,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Every POI with a feasible path no longer than the radius.
    Range {
        #[command(flatten)]
        world: WorldArgs,
        #[command(flatten)]
        start: StartArgs,
        #[arg(long)]
        radius: f64,
        #[arg(long = "C")]
        budget: f64,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Generate a perfect maze world file.
    GenMaze {
        #[arg(long, default_value_t = 25)]
        width: usize,
        #[arg(long, default_value_t = 25)]
        height: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Wall block side in meters.
        #[arg(long, default_value_t = 0.5)]
        unit: f64,
        /// Free cells per side of the square physical room.
        #[arg(long, default_value_t = 10)]
        room: usize,
        #[arg(long, default_value_t = 0.3)]
        cell_size: f64,
        #[arg(long, default_value_t = 4)]
        orientations: u16,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a block-city world file.
    GenCity {
        #[arg(long, default_value_t = 20)]
        pois: usize,
        #[arg(long)]
        open_ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lots per side.
        #[arg(long, default_value_t = 40)]
        side: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the MIL range and write it as CSV.
    MilTable {
        #[command(flatten)]
        world: WorldArgs,
        /// Range of the orientation-collapsed space.
        #[arg(long)]
        cos: bool,
        #[arg(long, default_value_t = 0.1)]
        quantum: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a query with several algorithms and render the paths as SVG.
    Render {
        #[command(flatten)]
        q: SolveArgs,
        /// Extra algorithms drawn next to `--algo`.
        #[arg(long, value_delimiter = ',')]
        also: Vec<Algorithm>,
    },
}

#[derive(Args, Clone)]
struct WorldArgs {
    /// World or transition-table JSON file, or `@detour` / `@lagrange` for
    /// the built-in boards.
    #[arg(long)]
    world: String,
    /// Cost-model JSON replacing the world's.
    #[arg(long)]
    cost_model: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct StartArgs {
    /// Start POI; built-in boards default to their start state.
    #[arg(long)]
    from: Option<String>,
    /// Physical start cell as `col,row`.
    #[arg(long, value_delimiter = ',')]
    cell: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    v_heading: u16,
    #[arg(long, default_value_t = 0)]
    p_heading: u16,
}

#[derive(Args, Clone)]
struct Tuning {
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long)]
    delta: Option<f64>,
    /// Collapse headings while searching.
    #[arg(long)]
    cos: bool,
    /// Stop after the reference path.
    #[arg(long)]
    reference_only: bool,
    /// Any of ILSP, SLSP, ULSL.
    #[arg(long, value_delimiter = ',')]
    disable_pruning: Vec<String>,
    /// Any of TECO, PWSO, VWNO.
    #[arg(long, value_delimiter = ',')]
    disable_ordering: Vec<String>,
}

impl Tuning {
    fn options(&self) -> Result<DewnOptions, IoError> {
        OptionsSpec {
            delta: self.delta,
            cos_simplify: self.cos,
            reference_only: self.reference_only,
            disable_pruning: self.disable_pruning.clone(),
            disable_ordering: self.disable_ordering.clone(),
        }
        .to_options(self.epsilon)
    }
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[command(flatten)]
    world: WorldArgs,
    #[command(flatten)]
    start: StartArgs,
    /// Target POI; built-in boards default to their target.
    #[arg(long)]
    to: Option<String>,
    /// RW cost budget; built-in boards default to their budget.
    #[arg(long = "C")]
    budget: Option<f64>,
    #[arg(long, default_value = "dewn")]
    algo: Algorithm,
    /// Candidates for the k-shortest-paths baseline.
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tuning: Tuning,
    /// Write the result (JSON for solve, SVG for render).
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Loaded {
    Kinematic(Box<LoadedWorld>),
    Table(Box<TableSpace>, Option<Query>),
}

fn load(w: &WorldArgs) -> Result<Loaded, IoError> {
    match w.world.as_str() {
        "@detour" => {
            let b = detour_board();
            Ok(Loaded::Table(Box::new(b.space), Some(b.query)))
        }
        "@lagrange" => {
            let b = lagrange_board();
            Ok(Loaded::Table(Box::new(b.space), Some(b.query)))
        }
        path => {
            let text = fs::read_to_string(path)?;
            let json: serde_json::Value = serde_json::from_str(&text)?;
            if json.get("transitions").is_some() {
                let tf: TableFile = serde_json::from_value(json)?;
                return Ok(Loaded::Table(Box::new(tf.build()?), None));
            }
            let mut wf: WorldFile = serde_json::from_value(json)?;
            if let Some(cm) = &w.cost_model {
                wf.cost_model = CostModelSpec::load(cm)?;
            }
            Ok(Loaded::Kinematic(Box::new(wf.build()?)))
        }
    }
}

fn node(space: &impl Space, name: &str) -> Result<u32, IoError> {
    space.graph().find_poi(name).ok_or_else(|| IoError::Invalid(format!("unknown POI `{name}`")))
}

fn start_state(lw: &LoadedWorld, s: &StartArgs) -> Result<LocoState, IoError> {
    let from = s.from.as_deref().ok_or_else(|| IoError::Invalid("--from is required".into()))?;
    let grid = &lw.worlds.grid;
    let cell = match s.cell.as_slice() {
        [] => lw.center_cell(),
        [c, r] if *c < grid.cols() && *r < grid.rows() && grid.is_free(grid.cell(*c, *r)) => grid.cell(*c, *r),
        _ => return Err(IoError::Invalid("--cell must name a free cell as col,row".into())),
    };
    Ok(LocoState::new(lw.poi(from)?, s.v_heading, cell, s.p_heading))
}

fn table_start(space: &TableSpace, default: Option<Query>, s: &StartArgs) -> Result<LocoState, IoError> {
    match &s.from {
        None => default.map(|q| q.start).ok_or_else(|| IoError::Invalid("--from is required".into())),
        Some(name) => {
            let v = node(space, name)?;
            space.states().find(|st| st.v_loc == v).ok_or_else(|| IoError::Invalid(format!("no state at `{name}`")))
        }
    }
}

fn query_for(loaded: &Loaded, a: &SolveArgs) -> Result<Query, IoError> {
    match loaded {
        Loaded::Kinematic(lw) => {
            let start = start_state(lw, &a.start)?;
            let to = a.to.as_deref().ok_or_else(|| IoError::Invalid("--to is required".into()))?;
            let budget = a.budget.ok_or_else(|| IoError::Invalid("--C is required".into()))?;
            Ok(Query::new(start, lw.poi(to)?, budget))
        }
        Loaded::Table(sp, q) => {
            let start = table_start(sp, *q, &a.start)?;
            let target = match (&a.to, q) {
                (Some(t), _) => node(sp.as_ref(), t)?,
                (None, Some(q)) => q.target,
                (None, None) => return Err(IoError::Invalid("--to is required".into())),
            };
            let budget = a.budget.or(q.map(|q| q.budget)).ok_or_else(|| IoError::Invalid("--C is required".into()))?;
            Ok(Query::new(start, target, budget))
        }
    }
}

fn describe<S: Space + ?Sized>(space: &S, p: &RwPath) -> String {
    let g = space.graph();
    let name = |v: u32| match &g.node(v).kind {
        dualworld_core::world::NodeKind::Poi(n) => n.clone(),
        dualworld_core::world::NodeKind::Corner => format!("#{v}"),
    };
    let mut s = format!("length {:.6}  cost {:.6}  hops {}\n", p.length, p.cost, p.hops());
    let st0 = p.first();
    s += &format!("  start {} (heading {})  cell {} (heading {})\n", name(st0.v_loc), st0.v_heading, st0.p_loc, st0.p_heading);
    for (i, w) in p.states.windows(2).enumerate() {
        let ops = space.operations(w[0], w[1]).map(|o| format!("{:?}", o.ops)).unwrap_or_default();
        s += &format!(
            "  -> {} (heading {})  cell {} (heading {})  +{:.4} m  +{:.4}  {}\n",
            name(w[1].v_loc),
            w[1].v_heading,
            w[1].p_loc,
            w[1].p_heading,
            p.hop_lengths[i],
            p.hop_costs[i],
            ops
        );
    }
    s
}

#[derive(serde::Serialize)]
struct SolveJson {
    algorithm: &'static str,
    feasible: bool,
    length: f64,
    cost: f64,
    states: Vec<[u32; 4]>,
}

fn solve_on<S: Space + ResetRealizer + Sync + ?Sized>(space: &S, q: &Query, a: &SolveArgs) -> Result<(), IoError> {
    let opts = a.tuning.options()?;
    let bench = Bench::new(space, opts, a.k, a.algo == Algorithm::DewnCos);
    match bench.solve(a.algo, q) {
        None => {
            println!("{}: no path found", a.algo.name());
        }
        Some((p, feasible)) => {
            println!("{}: {}", a.algo.name(), if feasible { "feasible" } else { "over budget" });
            print!("{}", describe(space, &p));
            if let Some(out) = &a.out {
                let j = SolveJson {
                    algorithm: a.algo.name(),
                    feasible,
                    length: p.length,
                    cost: p.cost,
                    states: p.states.iter().map(|s| [s.v_loc, s.v_heading as u32, s.p_loc, s.p_heading as u32]).collect(),
                };
                fs::write(out, serde_json::to_string_pretty(&j)?)?;
            }
        }
    }
    Ok(())
}

fn render_on<S: Space + ResetRealizer + Sync + ?Sized>(space: &S, lw: Option<&LoadedWorld>, q: &Query, a: &SolveArgs, also: &[Algorithm]) -> Result<(), IoError> {
    let opts = a.tuning.options()?;
    let algos: Vec<Algorithm> = std::iter::once(a.algo).chain(also.iter().copied()).collect();
    let bench = Bench::new(space, opts, a.k, algos.contains(&Algorithm::DewnCos));
    let mut paths = Vec::new();
    for &al in &algos {
        match bench.solve(al, q) {
            Some((p, _)) => paths.push(p),
            None => eprintln!("{}: no path found", al.name()),
        }
    }
    let svg = export_paths_svg(space, lw.map(|l| &l.world), lw.map(|l| &l.worlds.grid), &paths);
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from("paths.svg"));
    fs::write(&out, svg)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn spatial_on<S: Space + ?Sized>(space: &S, tuning: &Tuning, f: impl FnOnce(&SpatialEngine<'_, S>, &[u32])) -> Result<(), IoError> {
    let opts = tuning.options()?;
    let engine = SpatialEngine::new(Dewn::new(space, opts.quantum), opts);
    let pois: Vec<u32> = space.graph().poi_ids().collect();
    f(&engine, &pois);
    Ok(())
}

fn poi_name<S: Space + ?Sized>(space: &S, v: u32) -> String {
    match &space.graph().node(v).kind {
        dualworld_core::world::NodeKind::Poi(n) => n.clone(),
        dualworld_core::world::NodeKind::Corner => format!("#{v}"),
    }
}

fn run(cli: Cli) -> Result<(), IoError> {
    match cli.cmd {
        Cmd::Solve(a) => {
            let loaded = load(&a.world)?;
            let q = query_for(&loaded, &a)?;
            match &loaded {
                Loaded::Kinematic(lw) => solve_on(&lw.space(SharedMemo::default()), &q, &a),
                Loaded::Table(sp, _) => solve_on(sp.as_ref(), &q, &a),
            }
        }
        Cmd::Render { q: a, also } => {
            let loaded = load(&a.world)?;
            let q = query_for(&loaded, &a)?;
            match &loaded {
                Loaded::Kinematic(lw) => render_on(&lw.space(SharedMemo::default()), Some(lw), &q, &a, &also),
                Loaded::Table(sp, _) => render_on(sp.as_ref(), None, &q, &a, &also),
            }
        }
        Cmd::Bench { scenario, out } => {
            let (sc, wf) = Scenario::load(&scenario)?;
            let lw = wf.build()?;
            let report = run_matrix(&sc, &lw)?;
            report.write_aggregates(std::io::stdout())?;
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                report.write_rows(fs::File::create(dir.join("rows.csv"))?)?;
                report.write_aggregates(fs::File::create(dir.join("aggregates.csv"))?)?;
            }
            Ok(())
        }
        Cmd::Knn { world, start, k, budget, tuning } => {
            let loaded = load(&world)?;
            let print = |name: &dyn Fn(u32) -> String, res: Result<Vec<dualworld_core::spatial::Hit>, dualworld_core::spatial::FewerThanK>| {
                let (hits, partial) = match res {
                    Ok(h) => (h, false),
                    Err(e) => (e.found, true),
                };
                for (i, h) in hits.iter().enumerate() {
                    println!("{}. {}  length {:.6}  cost {:.6}", i + 1, name(h.poi), h.path.length, h.path.cost);
                }
                if partial {
                    println!("only {} of {k} reachable within budget", hits.len());
                }
            };
            match &loaded {
                Loaded::Kinematic(lw) => {
                    let sp = lw.space(SharedMemo::default());
                    let st = start_state(lw, &start)?;
                    spatial_on(&sp, &tuning, |e, pois| print(&|v| poi_name(&sp, v), e.dknn(st, pois, k, budget)))
                }
                Loaded::Table(sp, q) => {
                    let st = table_start(sp, *q, &start)?;
                    spatial_on(sp.as_ref(), &tuning, |e, pois| print(&|v| poi_name(sp.as_ref(), v), e.dknn(st, pois, k, budget)))
                }
            }
        }
        Cmd::Range { world, start, radius, budget, tuning } => {
            let loaded = load(&world)?;
            let print = |name: &dyn Fn(u32) -> String, hits: Vec<dualworld_core::spatial::Hit>| {
                for h in &hits {
                    println!("{}  length {:.6}  cost {:.6}", name(h.poi), h.path.length, h.path.cost);
                }
                println!("{} POIs in range", hits.len());
            };
            match &loaded {
                Loaded::Kinematic(lw) => {
                    let sp = lw.space(SharedMemo::default());
                    let st = start_state(lw, &start)?;
                    spatial_on(&sp, &tuning, |e, pois| print(&|v| poi_name(&sp, v), e.drange(st, pois, radius, budget)))
                }
                Loaded::Table(sp, q) => {
                    let st = table_start(sp, *q, &start)?;
                    spatial_on(sp.as_ref(), &tuning, |e, pois| print(&|v| poi_name(sp.as_ref(), v), e.drange(st, pois, radius, budget)))
                }
            }
        }
        Cmd::GenMaze { width, height, seed, unit, room, cell_size, orientations, out } => {
            let maze = generate_maze(width, height, seed, unit).map_err(|e| IoError::Invalid(e.to_string()))?;
            let wf = maze.to_world(open_room_spec(cell_size, room), orientations, 5, CostModelSpec::default());
            wf.save(&out)?;
            println!("wrote {} ({} POIs, {} wall rectangles)", out.display(), wf.virtual_world.pois.len(), wf.virtual_world.obstacles.len());
            Ok(())
        }
        Cmd::GenCity { pois, open_ratio, seed, side, out } => {
            let wf = generate_synthetic_city(pois, open_ratio, seed, side).map_err(|e| IoError::Invalid(e.to_string()))?;
            wf.save(&out)?;
            println!("wrote {} ({} blocks)", out.display(), wf.virtual_world.obstacles.len());
            Ok(())
        }
        Cmd::MilTable { world, cos, quantum, out } => {
            let loaded = load(&world)?;
            let range = match &loaded {
                Loaded::Kinematic(lw) => {
                    let sp = lw.space(SharedMemo::default());
                    if cos {
                        sp.cos_mil_range(quantum)
                    } else {
                        sp.mil_range(quantum)
                    }
                }
                Loaded::Table(sp, _) => {
                    if cos {
                        sp.cos_mil_range(quantum)
                    } else {
                        sp.mil_range(quantum)
                    }
                }
            };
            match out {
                Some(p) => write_range_csv(&range, fs::File::create(p)?),
                None => write_range_csv(&range, std::io::stdout()),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

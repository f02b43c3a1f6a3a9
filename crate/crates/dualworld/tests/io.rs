use dualworld::gen::{generate_maze, open_room_spec};
use dualworld::io::{read_range_csv, write_range_csv, CostModelSpec, IoError, PoiSpec, TableFile, TransitionSpec, WorldFile};
use dualworld_core::exact::{basic_dp, Query};
use dualworld_core::mil::MilRange;
use dualworld_core::space::Space;
use dualworld_core::state::LocoState;
use proptest::prelude::*;

fn small_world() -> WorldFile {
    generate_maze(3, 2, 5, 0.5).unwrap().to_world(open_room_spec(0.3, 5), 4, 3, CostModelSpec::default())
}

#[test]
fn world_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let wf = small_world();
    wf.save(&path).unwrap();
    let back = WorldFile::load(&path).unwrap();
    assert_eq!(back, wf);
    let (a, b) = (wf.build().unwrap(), back.build().unwrap());
    assert_eq!(a.worlds.graph.edge_count(), b.worlds.graph.edge_count());
    assert_eq!(a.worlds.grid.free_cells().count(), 25);
}

#[test]
fn world_file_defaults_and_errors() {
    let json = r#"{
        "virtual": {"bounds": [0, 0, 4, 4], "obstacles": [], "pois": [{"name": "a", "x": 1, "y": 1}, {"name": "b", "x": 3, "y": 1}]},
        "physical": {"cell_size": 0.5, "origin": [0, 0], "rows": ["....", "...."]}
    }"#;
    let wf: WorldFile = serde_json::from_str(json).unwrap();
    assert_eq!(wf.orientations, 8);
    assert_eq!(wf.gain_count, 3);
    assert_eq!(wf.cost_model, CostModelSpec::default());
    let lw = wf.build().unwrap();
    assert_eq!(lw.worlds.graph.edge_length(lw.poi("a").unwrap(), lw.poi("b").unwrap()), Some(2.0));
    assert!(matches!(lw.poi("zzz"), Err(IoError::Invalid(_))));

    let mut bad = wf.clone();
    bad.orientations = 0;
    assert!(matches!(bad.build(), Err(IoError::Invalid(_))));
    let mut bad = wf.clone();
    bad.physical.rows = vec!["..".into(), "...".into()];
    assert!(matches!(bad.build(), Err(IoError::Grid(_))));
    assert!(matches!(WorldFile::load(std::path::Path::new("/nonexistent/w.json")), Err(IoError::Io(_))));
}

fn line_table() -> TableFile {
    let poi = |name: &str, x: f64| PoiSpec { name: name.into(), x, y: 0.0 };
    let t = |from: [u32; 4], to: [u32; 4], cost: f64| TransitionSpec { from, to, cost };
    TableFile {
        nodes: vec![poi("a", 0.0), poi("b", 1.0), poi("c", 2.0)],
        edges: vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.5)],
        transitions: vec![
            t([0, 0, 0, 0], [1, 0, 0, 0], 1.0),
            t([1, 0, 0, 0], [2, 0, 0, 0], 1.0),
            t([0, 0, 0, 0], [2, 0, 1, 0], 0.0),
        ],
        range: None,
        clearance: vec![(0, 1.0), (1, 0.5)],
        correction_cost: Some(2.0),
    }
}

#[test]
fn table_file_builds_the_described_space() {
    let tf = line_table();
    let sp = tf.build().unwrap();
    assert_eq!(sp.state_count(), 4);
    let start = LocoState::new(0, 0, 0, 0);
    // Within budget 2 the two-hop path is shorter; at budget 1 only the
    // free direct edge fits.
    let p = basic_dp(&sp, &Query::new(start, 2, 2.0)).unwrap();
    assert_eq!((p.length, p.cost), (2.0, 2.0));
    let p = basic_dp(&sp, &Query::new(start, 2, 1.0)).unwrap();
    assert_eq!((p.length, p.cost), (2.5, 0.0));

    let json = serde_json::to_string(&tf).unwrap();
    let back: TableFile = serde_json::from_str(&json).unwrap();
    assert_eq!(back, tf);
}

#[test]
fn table_file_rejects_bad_transitions() {
    let mut tf = line_table();
    tf.transitions[0].cost = -1.0;
    assert!(matches!(tf.build(), Err(IoError::Table(_))));
    let mut tf = line_table();
    tf.transitions[0].to = [7, 0, 0, 0];
    assert!(tf.build().is_err());
    let mut tf = line_table();
    tf.edges.push((0, 9, 1.0));
    assert!(matches!(tf.build(), Err(IoError::World(_))));
}

#[test]
fn explicit_range_overrides_the_computed_one() {
    let mut tf = line_table();
    tf.range = Some(vec![[1.0, 0.25, 3.0]]);
    let sp = tf.build().unwrap();
    assert_eq!(sp.mil_range(0.1).get(1.0), Some((0.25, 3.0)));
}

proptest! {
    #[test]
    fn range_csv_round_trips(rows in proptest::collection::vec((0u32..200, 0u32..50, 0u32..50), 0..30)) {
        let q = 0.1;
        let mut range = MilRange::new(q);
        for &(l, a, b) in &rows {
            range.set(l as f64 * q, a as f64 * 0.25, (a + b) as f64 * 0.25);
        }
        let mut buf = Vec::new();
        write_range_csv(&range, &mut buf).unwrap();
        let back = read_range_csv(buf.as_slice(), q).unwrap();
        prop_assert_eq!(back.len(), range.len());
        for (l, a, b) in range.iter() {
            prop_assert_eq!(back.get(l), Some((a, b)));
        }
    }
}

#[test]
fn range_csv_rejects_garbage() {
    assert!(matches!(read_range_csv("length_bin,alpha,beta\n1.0,x,2\n".as_bytes(), 0.1), Err(IoError::Csv(_))));
}

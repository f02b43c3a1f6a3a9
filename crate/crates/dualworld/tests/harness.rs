use std::fs;

use dualworld::gen::{generate_maze, open_room_spec};
use dualworld::harness::{run_matrix, Algorithm, OptionsSpec, Scenario};
use dualworld::io::CostModelSpec;

const BUDGET: f64 = 1.0;
const EPSILON: f64 = 0.1;

fn scenario() -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let wf = generate_maze(3, 3, 21, 0.5).unwrap().to_world(open_room_spec(0.3, 4), 4, 3, CostModelSpec::default());
    wf.save(&dir.path().join("maze.json")).unwrap();
    let sc = serde_json::json!({
        "world": "maze.json",
        "seed": 4,
        "epsilon": EPSILON,
        "k": 4,
        "algorithms": ["basic_dp", "dewn", "s_dewn", "dewn_cos", "mcp", "ksp", "cola"],
        "queries": [{"start": "c0_0", "target": "c2_2", "budget": BUDGET}],
        "sampling": {"count": 5, "min_dist": 0.9, "max_dist": 2.5, "budget": [BUDGET, BUDGET]},
        "parallel": false
    });
    let path = dir.path().join("scenario.json");
    fs::write(&path, sc.to_string()).unwrap();
    (dir, path)
}

#[test]
fn matrix_rows_are_consistent() {
    let (_dir, path) = scenario();
    let (sc, wf) = Scenario::load(&path).unwrap();
    let lw = wf.build().unwrap();
    let report = run_matrix(&sc, &lw).unwrap();
    let queries = 6;
    assert_eq!(report.rows.len(), queries * Algorithm::ALL.len());
    for row in &report.rows {
        match (row.length, row.cost) {
            (Some(_), Some(c)) => assert_eq!(row.feasible, c <= BUDGET + 1e-9, "{row:?}"),
            (None, None) => assert!(!row.feasible),
            _ => panic!("length and cost disagree: {row:?}"),
        }
    }
    for id in 0..queries {
        let exact = report.row(Algorithm::BasicDp, id).unwrap();
        for algo in Algorithm::ALL {
            let r = report.row(algo, id).unwrap();
            if !r.feasible {
                continue;
            }
            assert!(exact.feasible, "{algo:?} feasible where the exact DP is not");
            let (opt, got) = (exact.length.unwrap(), r.length.unwrap());
            assert!(got >= opt - 1e-9, "{algo:?} beat the optimum on query {id}");
            if matches!(algo, Algorithm::Dewn | Algorithm::DewnCos) {
                assert!(got <= (1.0 + EPSILON) * opt + 1e-9, "{algo:?} outside 1+eps on query {id}");
            }
        }
    }
    assert!((0..queries).any(|id| report.row(Algorithm::BasicDp, id).unwrap().feasible));
    let agg = report.aggregates();
    assert_eq!(agg.len(), Algorithm::ALL.len());
    for a in &agg {
        assert_eq!(a.queries, queries);
        assert!((a.feasibility - a.feasible as f64 / queries as f64).abs() < 1e-12);
    }
}

#[test]
fn reports_write_csv() {
    let (_dir, path) = scenario();
    let (mut sc, wf) = Scenario::load(&path).unwrap();
    sc.algorithms = vec![Algorithm::Dewn, Algorithm::Mcp];
    let report = run_matrix(&sc, &wf.build().unwrap()).unwrap();
    let mut rows = Vec::new();
    report.write_rows(&mut rows).unwrap();
    let mut r = csv::Reader::from_reader(rows.as_slice());
    assert_eq!(r.records().count(), report.rows.len());
    let mut agg = Vec::new();
    report.write_aggregates(&mut agg).unwrap();
    let text = String::from_utf8(agg).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("dewn,"));
}

#[test]
fn options_reject_unknown_rules() {
    let bad = OptionsSpec { disable_pruning: vec!["XYZ".into()], ..Default::default() };
    assert!(bad.to_options(0.1).is_err());
    let ok = OptionsSpec { disable_pruning: vec!["ilsp".into()], disable_ordering: vec!["TECO".into()], ..Default::default() };
    let o = ok.to_options(0.2).unwrap();
    assert!(!o.pruning.ilsp && o.pruning.slsp && !o.ordering.teco);
    assert_eq!(o.epsilon, 0.2);
}

#[test]
fn unknown_query_poi_is_an_error() {
    let (dir, path) = scenario();
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    v["queries"][0]["target"] = "nowhere".into();
    let p2 = dir.path().join("bad.json");
    fs::write(&p2, v.to_string()).unwrap();
    let (sc, wf) = Scenario::load(&p2).unwrap();
    assert!(run_matrix(&sc, &wf.build().unwrap()).is_err());
}

use dualworld::svg::export_paths_svg;
use dualworld_core::exact::{basic_dp, min_cost_path};
use dualworld_core::fixtures::detour_board;
use quick_xml::events::Event;
use quick_xml::Reader;

fn elements(svg: &str) -> Vec<String> {
    let mut reader = Reader::from_str(svg);
    let mut depth = 0i32;
    let mut names = Vec::new();
    loop {
        match reader.read_event().expect("well-formed XML") {
            Event::Start(e) => {
                depth += 1;
                names.push(String::from_utf8_lossy(e.name().as_ref()).into_owned());
            }
            Event::Empty(e) => names.push(String::from_utf8_lossy(e.name().as_ref()).into_owned()),
            Event::End(_) => depth -= 1,
            Event::Eof => break,
            _ => {}
        }
        assert!(depth >= 0);
    }
    assert_eq!(depth, 0);
    names
}

#[test]
fn renders_well_formed_svg_per_path() {
    let b = detour_board();
    let paths = vec![basic_dp(&b.space, &b.query).unwrap(), min_cost_path(&b.space, &b.query).unwrap()];
    let svg = export_paths_svg(&b.space, None, None, &paths);
    let names = elements(&svg);
    assert_eq!(names[0], "svg");
    assert_eq!(names.iter().filter(|n| *n == "polyline").count(), paths.len());
    let none = export_paths_svg(&b.space, None, None, &[]);
    assert_eq!(elements(&none).iter().filter(|n| *n == "polyline").count(), 0);
}

#[test]
fn physical_panel_doubles_the_polylines() {
    use dualworld::gen::{generate_maze, open_room_spec};
    use dualworld::io::CostModelSpec;
    use dualworld_core::exact::Query;
    use dualworld_core::kinematic::NoMemo;
    use dualworld_core::state::LocoState;

    let wf = generate_maze(2, 2, 1, 0.5).unwrap().to_world(open_room_spec(0.3, 4), 4, 3, CostModelSpec::default());
    let lw = wf.build().unwrap();
    let space = lw.space(NoMemo);
    let q = Query::new(LocoState::new(lw.poi("c0_0").unwrap(), 0, lw.center_cell(), 0), lw.poi("c1_1").unwrap(), 10.0);
    let p = basic_dp(&space, &q).unwrap();
    let svg = export_paths_svg(&space, Some(&lw.world), Some(&lw.worlds.grid), &[p]);
    assert_eq!(elements(&svg).iter().filter(|n| *n == "polyline").count(), 2);
}

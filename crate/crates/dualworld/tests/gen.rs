use std::collections::VecDeque;

use dualworld::gen::{generate_maze, generate_synthetic_city, open_room_spec, GenError, Maze};
use dualworld::io::CostModelSpec;
use proptest::prelude::*;

fn tree_edges(m: &Maze) -> Vec<((usize, usize), (usize, usize))> {
    let mut out = Vec::new();
    for y in 0..m.height {
        for x in 0..m.width {
            for n in m.cell_neighbors(x, y) {
                if (x, y) < n {
                    out.push(((x, y), n));
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn maze_is_a_spanning_tree(w in 1usize..9, h in 1usize..9, seed in any::<u64>()) {
        let m = generate_maze(w, h, seed, 0.5).unwrap();
        prop_assert_eq!(tree_edges(&m).len(), w * h - 1);
        let mut seen = vec![false; w * h];
        let mut queue = VecDeque::from([(0, 0)]);
        seen[0] = true;
        while let Some((x, y)) = queue.pop_front() {
            for (a, b) in m.cell_neighbors(x, y) {
                prop_assert!(m.cell_neighbors(a, b).contains(&(x, y)));
                if !seen[b * w + a] {
                    seen[b * w + a] = true;
                    queue.push_back((a, b));
                }
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn wall_rects_cover_exactly_the_wall_blocks(w in 1usize..7, h in 1usize..7, seed in any::<u64>()) {
        let m = generate_maze(w, h, seed, 0.5).unwrap();
        let bw = 2 * w + 1;
        let rects = m.wall_rects();
        for by in 0..2 * h + 1 {
            for bx in 0..bw {
                let c = ((bx as f64 + 0.5) * 0.5, (by as f64 + 0.5) * 0.5);
                let hits = rects.iter().filter(|r| r[0] < c.0 && c.0 < r[2] && r[1] < c.1 && c.1 < r[3]).count();
                prop_assert_eq!(hits, usize::from(m.wall[by * bw + bx]), "block ({}, {})", bx, by);
            }
        }
    }

    #[test]
    fn city_hits_the_open_ratio(ratio in 0.3f64..0.9, seed in any::<u64>()) {
        let side = 20;
        let wf = generate_synthetic_city(10, ratio, seed, side).unwrap();
        let world = wf.virtual_world();
        let mut open = 0;
        for j in 0..side {
            for i in 0..side {
                let p = dualworld_core::geom::Point::new(i as f64 + 0.5, j as f64 + 0.5);
                open += usize::from(!world.point_blocked(p));
            }
        }
        let got = open as f64 / (side * side) as f64;
        prop_assert!((got - ratio).abs() <= 0.5 / (side * side) as f64 + 1e-12, "open {} vs {}", got, ratio);
        for poi in &wf.virtual_world.pois {
            prop_assert!(!world.point_blocked(dualworld_core::geom::Point::new(poi.x, poi.y)));
        }
    }
}

#[test]
fn maze_graph_links_exactly_the_open_neighbors() {
    let m = generate_maze(5, 4, 11, 0.5).unwrap();
    let wf = m.to_world(open_room_spec(0.3, 6), 4, 5, CostModelSpec::default());
    let lw = wf.build().unwrap();
    let g = &lw.worlds.graph;
    let id = |x, y| g.find_poi(&Maze::cell_name(x, y)).unwrap();
    for y in 0..m.height {
        for x in 0..m.width {
            for (a, b) in [(x + 1, y), (x, y + 1)] {
                if a >= m.width || b >= m.height {
                    continue;
                }
                let open = m.cell_neighbors(x, y).contains(&(a, b));
                match g.edge_length(id(x, y), id(a, b)) {
                    Some(l) => {
                        assert!(open, "edge through a wall at ({x}, {y})-({a}, {b})");
                        assert!((l - 1.0).abs() < 1e-9);
                    }
                    None => assert!(!open, "missing edge ({x}, {y})-({a}, {b})"),
                }
            }
        }
    }
}

#[test]
fn generators_reject_bad_input() {
    assert_eq!(generate_maze(0, 3, 1, 0.5).unwrap_err(), GenError::TooSmall);
    for r in [0.0, 1.0, -0.2, f64::NAN] {
        assert!(matches!(generate_synthetic_city(3, r, 1, 10), Err(GenError::InvalidRatio(_))));
    }
    assert!(matches!(generate_synthetic_city(500, 0.5, 1, 10), Err(GenError::TooManyPois(500, _))));
}

#[test]
fn generators_are_deterministic() {
    assert_eq!(generate_maze(6, 6, 3, 0.5).unwrap(), generate_maze(6, 6, 3, 0.5).unwrap());
    assert_eq!(generate_synthetic_city(8, 0.6, 9, 15).unwrap(), generate_synthetic_city(8, 0.6, 9, 15).unwrap());
}

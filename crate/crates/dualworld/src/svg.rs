//! Side-by-side SVG rendering of both worlds and solved paths.

use std::fmt::Write;

use dualworld_core::geom::{Point, Rect};
use dualworld_core::grid::PhysicalGrid;
use dualworld_core::kinematics::RwOp;
use dualworld_core::space::{RwPath, Space};
use dualworld_core::world::VirtualWorld;

const PANEL: f64 = 400.0;
const PAD: f64 = 20.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Frame {
    rect: Rect,
    scale: f64,
    dx: f64,
}

impl Frame {
    fn new(rect: Rect, dx: f64) -> Self {
        let scale = (PANEL - 2.0 * PAD) / rect.width().max(rect.height()).max(1e-9);
        Frame { rect, scale, dx }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        (self.dx + PAD + (p.x - self.rect.min.x) * self.scale, PANEL - PAD - (p.y - self.rect.min.y) * self.scale)
    }
}

fn glyph(op: &RwOp) -> char {
    match op {
        RwOp::Translation { .. } => 'T',
        RwOp::Rotation { .. } => 'R',
        RwOp::Curvature { .. } => 'C',
        RwOp::Reset { .. } => 'X',
    }
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str, dash: bool) {
    let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = if dash { " stroke-dasharray=\"6 3\"" } else { "" };
    let _ = writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{dash}/>", d.join(" "));
}

/// Virtual world on the left, physical room on the right. Each path is drawn
/// in both panels; hop midpoints in the virtual panel carry letters for the
/// operations used (T translation, R rotation, C curvature, X reset). The
/// physical panel is omitted when `grid` is `None`.
pub fn export_paths_svg<S: Space + ?Sized>(space: &S, world: Option<&VirtualWorld>, grid: Option<&PhysicalGrid>, paths: &[RwPath]) -> String {
    let g = space.graph();
    let vrect = match world {
        Some(w) => w.bounds,
        None => {
            let pts: Vec<Point> = g.nodes().iter().map(|n| n.pos).collect();
            dualworld_core::geom::bounding_rect(&pts)
        }
    };
    let width = if grid.is_some() { 2.0 * PANEL } else { PANEL };
    let mut out = String::new();
    let _ = writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{PANEL}\" viewBox=\"0 0 {width} {PANEL}\">");
    let vf = Frame::new(vrect, 0.0);
    let _ = writeln!(out, "<g id=\"virtual\">");
    if let Some(w) = world {
        for poly in &w.obstacles {
            let d: Vec<String> = poly.iter().map(|&p| vf.map(p)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(out, "<polygon points=\"{}\" fill=\"#888\"/>", d.join(" "));
        }
    }
    for n in g.nodes() {
        let (x, y) = vf.map(n.pos);
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"1.5\" fill=\"#444\"/>");
    }
    for (i, p) in paths.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = p.v_path().iter().map(|&v| vf.map(g.pos(v))).collect();
        polyline(&mut out, &pts, color, false);
        for w in p.states.windows(2) {
            let Some(seq) = space.operations(w[0], w[1]) else { continue };
            let label: String = seq.ops.iter().map(glyph).collect();
            let (x, y) = vf.map(g.pos(w[0].v_loc).lerp(g.pos(w[1].v_loc), 0.5));
            let _ = writeln!(out, "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"10\" fill=\"{color}\">{label}</text>");
        }
    }
    let _ = writeln!(out, "</g>");
    if let Some(grid) = grid {
        let pf = Frame::new(grid.bounds(), PANEL);
        let _ = writeln!(out, "<g id=\"physical\">");
        for id in 0..grid.cell_count() as u32 {
            if grid.is_free(id) {
                continue;
            }
            let r = grid.cell_rect(id);
            let (x0, y1) = pf.map(r.min);
            let (x1, y0) = pf.map(r.max);
            let _ = writeln!(out, "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#888\"/>", x1 - x0, y1 - y0);
        }
        for (i, p) in paths.iter().enumerate() {
            let pts: Vec<(f64, f64)> = p.states.iter().map(|s| pf.map(grid.center(s.p_loc))).collect();
            polyline(&mut out, &pts, COLORS[i % COLORS.len()], true);
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

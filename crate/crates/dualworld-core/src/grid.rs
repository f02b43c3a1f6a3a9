//! Occupancy grid for the physical room and curve collision tests.

use alloc::vec::Vec;

use crate::geom::{Point, Rect};
use crate::math::{self, EPS};

pub type CellId = u32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("grid has no rows or ragged rows")]
    BadShape,
    #[error("unexpected character {0:?} in grid row")]
    BadChar(char),
    #[error("cell size must be positive")]
    BadCellSize,
}

/// Row 0 is the bottom row (smallest y). Cells on the outer ring are
/// always obstacles.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalGrid {
    origin: Point,
    cell_size: f64,
    cols: usize,
    rows: usize,
    free: Vec<bool>,
    clearance: Vec<f64>,
}

impl PhysicalGrid {
    /// `free[r * cols + c]`, row 0 at the bottom.
    pub fn new(origin: Point, cell_size: f64, cols: usize, rows: usize, mut free: Vec<bool>) -> Result<Self, GridError> {
        if !(cell_size > 0.0) {
            return Err(GridError::BadCellSize);
        }
        if cols == 0 || rows == 0 || free.len() != cols * rows {
            return Err(GridError::BadShape);
        }
        for r in 0..rows {
            for c in 0..cols {
                if r == 0 || c == 0 || r + 1 == rows || c + 1 == cols {
                    free[r * cols + c] = false;
                }
            }
        }
        let mut g = PhysicalGrid { origin, cell_size, cols, rows, free, clearance: Vec::new() };
        g.clearance = (0..cols * rows).map(|i| g.compute_clearance(i as CellId)).collect();
        Ok(g)
    }

    /// Parses map rows written top-down: `#` obstacle, `.` free.
    pub fn from_rows<S: AsRef<str>>(origin: Point, cell_size: f64, rows_top_down: &[S]) -> Result<Self, GridError> {
        let rows = rows_top_down.len();
        let cols = rows_top_down.first().map_or(0, |r| r.as_ref().chars().count());
        let mut free = alloc::vec![false; rows * cols];
        for (i, line) in rows_top_down.iter().enumerate() {
            let r = rows - 1 - i;
            let line = line.as_ref();
            if line.chars().count() != cols {
                return Err(GridError::BadShape);
            }
            for (c, ch) in line.chars().enumerate() {
                free[r * cols + c] = match ch {
                    '.' => true,
                    '#' => false,
                    other => return Err(GridError::BadChar(other)),
                };
            }
        }
        PhysicalGrid::new(origin, cell_size, cols, rows, free)
    }

    /// An empty room of `cols x rows` free cells plus the wall ring.
    pub fn open_room(cell_size: f64, free_cols: usize, free_rows: usize) -> Self {
        let (cols, rows) = (free_cols + 2, free_rows + 2);
        PhysicalGrid::new(Point::new(0.0, 0.0), cell_size, cols, rows, alloc::vec![true; cols * rows]).unwrap()
    }

    /// Map rows top-down, the inverse of `from_rows`.
    pub fn to_rows(&self) -> Vec<alloc::string::String> {
        (0..self.rows)
            .rev()
            .map(|r| (0..self.cols).map(|c| if self.free[r * self.cols + c] { '.' } else { '#' }).collect())
            .collect()
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cell_count(&self) -> usize {
        self.free.len()
    }

    pub fn cell(&self, col: usize, row: usize) -> CellId {
        (row * self.cols + col) as CellId
    }

    pub fn col_row(&self, id: CellId) -> (usize, usize) {
        let i = id as usize;
        (i % self.cols, i / self.cols)
    }

    pub fn is_free(&self, id: CellId) -> bool {
        self.free.get(id as usize).copied().unwrap_or(false)
    }

    pub fn free_cells(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..self.free.len()).filter(|&i| self.free[i]).map(|i| i as CellId)
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(
            self.origin,
            Point::new(self.origin.x + self.cols as f64 * self.cell_size, self.origin.y + self.rows as f64 * self.cell_size),
        )
    }

    pub fn cell_rect(&self, id: CellId) -> Rect {
        let (c, r) = self.col_row(id);
        let min = Point::new(self.origin.x + c as f64 * self.cell_size, self.origin.y + r as f64 * self.cell_size);
        Rect::new(min, Point::new(min.x + self.cell_size, min.y + self.cell_size))
    }

    pub fn center(&self, id: CellId) -> Point {
        let r = self.cell_rect(id);
        r.min.lerp(r.max, 0.5)
    }

    /// The cell containing `p`. Points on a shared edge go to the cell
    /// above/right.
    pub fn cell_of(&self, p: Point) -> Option<CellId> {
        let fx = (p.x - self.origin.x) / self.cell_size;
        let fy = (p.y - self.origin.y) / self.cell_size;
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (c, r) = (math::floor(fx) as usize, math::floor(fy) as usize);
        if c >= self.cols || r >= self.rows {
            return None;
        }
        Some(self.cell(c, r))
    }

    /// Distance from the cell center to the nearest obstacle cell.
    pub fn clearance(&self, id: CellId) -> f64 {
        self.clearance.get(id as usize).copied().unwrap_or(0.0)
    }

    fn compute_clearance(&self, id: CellId) -> f64 {
        if !self.free[id as usize] {
            return 0.0;
        }
        let p = self.center(id);
        let mut best = f64::INFINITY;
        for j in 0..self.free.len() {
            if !self.free[j] {
                let r = self.cell_rect(j as CellId);
                let dx = (r.min.x - p.x).max(0.0).max(p.x - r.max.x);
                let dy = (r.min.y - p.y).max(0.0).max(p.y - r.max.y);
                best = best.min(math::hypot(dx, dy));
            }
        }
        best
    }

    /// Cells whose closed square meets `rect`, clipped to the grid.
    fn cells_overlapping(&self, rect: Rect) -> (usize, usize, usize, usize) {
        let s = self.cell_size;
        let lo = |v: f64, o: f64, n: usize| (math::floor((v - o) / s - EPS).max(0.0) as usize).min(n - 1);
        let hi = |v: f64, o: f64, n: usize| (math::floor((v - o) / s + EPS).max(0.0) as usize).min(n - 1);
        (
            lo(rect.min.x, self.origin.x, self.cols),
            hi(rect.max.x, self.origin.x, self.cols),
            lo(rect.min.y, self.origin.y, self.rows),
            hi(rect.max.y, self.origin.y, self.rows),
        )
    }
}

/// A physical trajectory: straight segment or circular arc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Curve {
    Segment { a: Point, b: Point },
    /// Starts at `start` facing `heading_deg`; turns at `curvature` rad/m
    /// (positive = counter-clockwise) for `length` meters.
    Arc { start: Point, heading_deg: f64, curvature: f64, length: f64 },
}

impl Curve {
    pub fn point_at(&self, s: f64) -> Point {
        match *self {
            Curve::Segment { a, b } => {
                let len = a.dist(b);
                if len <= 0.0 {
                    a
                } else {
                    a.lerp(b, s / len)
                }
            }
            Curve::Arc { start, heading_deg, curvature, .. } => arc_point(start, math::to_rad(heading_deg), curvature, s),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Curve::Segment { a, b } => a.dist(b),
            Curve::Arc { length, .. } => length,
        }
    }

    pub fn end(&self) -> Point {
        self.point_at(self.length())
    }
}

/// Position after walking `s` meters along an arc of curvature `k` from
/// heading `theta` (radians).
pub fn arc_point(start: Point, theta: f64, k: f64, s: f64) -> Point {
    if (k * s).abs() < 1e-12 {
        return Point::new(start.x + s * math::cos(theta), start.y + s * math::sin(theta));
    }
    let r = 1.0 / k;
    Point::new(
        start.x + r * (math::sin(theta + k * s) - math::sin(theta)),
        start.y + r * (math::cos(theta) - math::cos(theta + k * s)),
    )
}

/// True iff every cell whose closed square meets the curve is free.
pub fn path_clear_physical(grid: &PhysicalGrid, curve: &Curve) -> bool {
    let bounds = grid.bounds();
    if !bounds.contains(curve.point_at(0.0)) || !bounds.contains(curve.end()) {
        return false;
    }
    match *curve {
        Curve::Segment { a, b } => segment_clear(grid, a, b),
        Curve::Arc { start, heading_deg, curvature, length } => {
            if (curvature * length).abs() < 1e-9 {
                return segment_clear(grid, start, curve.end());
            }
            arc_clear(grid, start, math::to_rad(heading_deg), curvature, length)
        }
    }
}

fn segment_clear(grid: &PhysicalGrid, a: Point, b: Point) -> bool {
    let (c0, c1, r0, r1) = grid.cells_overlapping(Rect::of_segment(a, b));
    for r in r0..=r1 {
        for c in c0..=c1 {
            let id = grid.cell(c, r);
            if !grid.is_free(id) && segment_meets_rect(a, b, &grid.cell_rect(id)) {
                return false;
            }
        }
    }
    true
}

/// Liang-Barsky clip against a closed, slightly inflated rectangle.
pub fn segment_meets_rect(a: Point, b: Point, rect: &Rect) -> bool {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    let checks = [
        (-dx, a.x - (rect.min.x - EPS)),
        (dx, (rect.max.x + EPS) - a.x),
        (-dy, a.y - (rect.min.y - EPS)),
        (dy, (rect.max.y + EPS) - a.y),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

fn arc_clear(grid: &PhysicalGrid, start: Point, theta: f64, k: f64, len: f64) -> bool {
    const SAMPLES: usize = 64;
    let mut bbox = Rect::new(start, start);
    for i in 1..=SAMPLES {
        let p = arc_point(start, theta, k, len * i as f64 / SAMPLES as f64);
        bbox.min.x = bbox.min.x.min(p.x);
        bbox.min.y = bbox.min.y.min(p.y);
        bbox.max.x = bbox.max.x.max(p.x);
        bbox.max.y = bbox.max.y.max(p.y);
    }
    let pad = grid.cell_size();
    let bbox = Rect::new(Point::new(bbox.min.x - pad, bbox.min.y - pad), Point::new(bbox.max.x + pad, bbox.max.y + pad));
    let (c0, c1, r0, r1) = grid.cells_overlapping(bbox);
    for r in r0..=r1 {
        for c in c0..=c1 {
            let id = grid.cell(c, r);
            if !grid.is_free(id) && arc_meets_rect(start, theta, k, len, &grid.cell_rect(id)) {
                return false;
            }
        }
    }
    true
}

/// Exact arc versus closed rectangle test: an endpoint lies inside, or
/// the circle crosses an edge within the swept parameter range.
pub fn arc_meets_rect(start: Point, theta: f64, k: f64, len: f64, rect: &Rect) -> bool {
    let end = arc_point(start, theta, k, len);
    if rect.contains(start) || rect.contains(end) {
        return true;
    }
    let r = 1.0 / k;
    // Center such that position(phi) = center + r * (sin phi, -cos phi), phi = theta + k s.
    let cx = start.x - r * math::sin(theta);
    let cy = start.y + r * math::cos(theta);
    let two_pi = 2.0 * core::f64::consts::PI;
    let on_arc = |phi: f64| -> bool {
        // Smallest s >= 0 with theta + k s = phi (mod 2 pi).
        let mut s = (phi - theta) / k;
        let period = two_pi / k.abs();
        s -= math::floor(s / period) * period;
        s <= len + EPS
    };
    let (lo, hi) = (rect.min, rect.max);
    // Vertical edges: cx + r sin phi = x.
    for x in [lo.x, hi.x] {
        let v = (x - cx) / r;
        if v.abs() <= 1.0 + 1e-12 {
            let a = libm::asin(v.clamp(-1.0, 1.0));
            for phi in [a, core::f64::consts::PI - a] {
                let y = cy - r * math::cos(phi);
                if y >= lo.y - EPS && y <= hi.y + EPS && on_arc(phi) {
                    return true;
                }
            }
        }
    }
    // Horizontal edges: cy - r cos phi = y.
    for y in [lo.y, hi.y] {
        let v = (cy - y) / r;
        if v.abs() <= 1.0 + 1e-12 {
            let a = libm::acos(v.clamp(-1.0, 1.0));
            for phi in [a, -a] {
                let x = cx + r * math::sin(phi);
                if x >= lo.x - EPS && x <= hi.x + EPS && on_arc(phi) {
                    return true;
                }
            }
        }
    }
    false
}

//! Planar primitives shared by both worlds.

use crate::math::{self, EPS};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, o: Point) -> f64 {
        math::hypot(self.x - o.x, self.y - o.y)
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    /// Direction from `self` to `o` in degrees, `[0, 360)`.
    pub fn bearing(self, o: Point) -> f64 {
        math::wrap_unsigned(math::to_deg(math::atan2(o.y - self.y, o.x - self.x)))
    }
}

#[inline]
pub fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Rect { min, max }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x - EPS
            && p.x <= self.max.x + EPS
            && p.y >= self.min.y - EPS
            && p.y <= self.max.y + EPS
    }

    pub fn overlaps(&self, o: &Rect) -> bool {
        self.min.x <= o.max.x + EPS
            && o.min.x <= self.max.x + EPS
            && self.min.y <= o.max.y + EPS
            && o.min.y <= self.max.y + EPS
    }

    pub fn of_segment(a: Point, b: Point) -> Rect {
        Rect::new(
            Point::new(a.x.min(b.x), a.y.min(b.y)),
            Point::new(a.x.max(b.x), a.y.max(b.y)),
        )
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

/// Where a point lies relative to a polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Outside,
    Boundary,
    Inside,
}

/// Distance from `p` to segment `ab`.
pub fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let d = b.sub(a);
    let len2 = d.x * d.x + d.y * d.y;
    if len2 <= 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

/// Point-in-polygon with an explicit boundary band of width `EPS`.
pub fn locate(p: Point, poly: &[Point]) -> Containment {
    let n = poly.len();
    for i in 0..n {
        if point_segment_dist(p, poly[i], poly[(i + 1) % n]) <= EPS {
            return Containment::Boundary;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (poly[i], poly[j]);
        if (pi.y > p.y) != (pj.y > p.y) {
            let x = pj.x + (p.y - pj.y) * (pi.x - pj.x) / (pi.y - pj.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Signed area (positive when counter-clockwise).
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        s += a.x * b.y - b.x * a.y;
    }
    s * 0.5
}

pub fn bounding_rect(poly: &[Point]) -> Rect {
    let mut r = Rect::new(poly[0], poly[0]);
    for p in poly {
        r.min.x = r.min.x.min(p.x);
        r.min.y = r.min.y.min(p.y);
        r.max.x = r.max.x.max(p.x);
        r.max.y = r.max.y.max(p.y);
    }
    r
}

/// Parameters `t` in `[0, 1]` along `ab` where it meets segment `cd`.
/// Collinear overlaps contribute both overlap endpoints.
pub fn segment_hits(a: Point, b: Point, c: Point, d: Point, out: &mut alloc::vec::Vec<f64>) {
    let r = b.sub(a);
    let s = d.sub(c);
    let denom = r.x * s.y - r.y * s.x;
    let qp = c.sub(a);
    let rr = r.x * r.x + r.y * r.y;
    if rr <= 0.0 {
        return;
    }
    let scale = math::sqrt(rr) * math::sqrt(s.x * s.x + s.y * s.y);
    if denom.abs() <= EPS * scale.max(1.0) {
        // Parallel. Only collinear overlaps matter.
        if (qp.x * r.y - qp.y * r.x).abs() > EPS * math::sqrt(rr).max(1.0) {
            return;
        }
        let t0 = (qp.x * r.x + qp.y * r.y) / rr;
        let t1 = ((d.x - a.x) * r.x + (d.y - a.y) * r.y) / rr;
        for t in [t0, t1] {
            if (-EPS..=1.0 + EPS).contains(&t) {
                out.push(t.clamp(0.0, 1.0));
            }
        }
        return;
    }
    let t = (qp.x * s.y - qp.y * s.x) / denom;
    let u = (qp.x * r.y - qp.y * r.x) / denom;
    let tol_t = EPS / math::sqrt(rr);
    if t >= -tol_t && t <= 1.0 + tol_t && u >= -EPS && u <= 1.0 + EPS {
        out.push(t.clamp(0.0, 1.0));
    }
}

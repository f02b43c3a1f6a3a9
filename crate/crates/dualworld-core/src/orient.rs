//! Discrete heading lattice shared by both worlds.

use crate::math;

/// `k` evenly spaced headings `i * 360 / k`, with 0° along +x and
/// counter-clockwise positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrientationSet {
    k: u16,
}

impl OrientationSet {
    pub fn new(k: u16) -> Self {
        assert!(k > 0, "orientation set must be non-empty");
        OrientationSet { k }
    }

    pub fn count(&self) -> u16 {
        self.k
    }

    pub fn step(&self) -> f64 {
        360.0 / self.k as f64
    }

    pub fn degrees(&self, i: u16) -> f64 {
        (i % self.k) as f64 * self.step()
    }

    /// Nearest heading; exact ties go to the counter-clockwise neighbor.
    pub fn snap(&self, deg: f64) -> u16 {
        let x = math::wrap_unsigned(deg) / self.step();
        (math::floor(x + 0.5) as i64).rem_euclid(self.k as i64) as u16
    }

    pub fn add(&self, i: u16, d: i32) -> u16 {
        (i as i32 + d).rem_euclid(self.k as i32) as u16
    }

    /// Signed lattice difference `b - a`, in `(-k/2, k/2]`.
    pub fn diff(&self, a: u16, b: u16) -> i32 {
        let k = self.k as i32;
        let mut d = (b as i32 - a as i32).rem_euclid(k);
        if 2 * d > k {
            d -= k;
        }
        d
    }

    /// Signed angle in degrees for a lattice difference.
    pub fn delta_degrees(&self, d: i32) -> f64 {
        d as f64 * self.step()
    }

    pub fn iter(&self) -> impl Iterator<Item = u16> {
        0..self.k
    }
}

impl Default for OrientationSet {
    fn default() -> Self {
        OrientationSet::new(8)
    }
}

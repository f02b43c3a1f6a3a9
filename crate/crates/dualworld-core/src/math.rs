//! Float helpers that work without `std`.

pub const EPS: f64 = 1e-9;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn to_rad(deg: f64) -> f64 {
    deg * core::f64::consts::PI / 180.0
}

#[inline]
pub fn to_deg(rad: f64) -> f64 {
    rad * 180.0 / core::f64::consts::PI
}

/// Wraps an angle in degrees into `(-180, 180]`.
pub fn wrap_signed(deg: f64) -> f64 {
    let mut a = deg % 360.0;
    if a <= -180.0 {
        a += 360.0;
    } else if a > 180.0 {
        a -= 360.0;
    }
    a
}

/// Wraps an angle in degrees into `[0, 360)`.
pub fn wrap_unsigned(deg: f64) -> f64 {
    let a = deg % 360.0;
    if a < 0.0 {
        a + 360.0
    } else {
        a
    }
}

/// Quantizes a float to an integer key at resolution `q`.
#[inline]
pub fn quantize(x: f64, q: f64) -> i64 {
    round(x / q) as i64
}

/// `f64` with a total order, for heap keys.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Total(pub f64);

impl Eq for Total {}

impl PartialOrd for Total {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Total {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

//! 2D geometry primitives shared by every module.
//!
//! All coordinates are double-precision meters in the ego (BEV) frame.

use serde::{Deserialize, Serialize};

/// Tolerance for the strict `<` comparisons used by distance thresholds.
///
/// Threshold rules ("closer than 0.45 m", "traverse less than 7.5 m") are
/// strict in exact arithmetic. Accumulated float error can land a value a few
/// ulps on either side of the limit, so a value within `STRICT_EPS` of the
/// limit counts as *at* the limit and is excluded.
pub const STRICT_EPS: f64 = 1e-9;

/// `value < limit` under the [`STRICT_EPS`] exclusion band.
#[inline]
pub fn strictly_less(value: f64, limit: f64) -> bool {
    value + STRICT_EPS < limit
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    /// Linear interpolation `self + (other - self) * t`.
    ///
    /// Every subdivision in the crate goes through this one formula so that
    /// splitting an edge and discretizing the equivalent path segment produce
    /// bit-identical coordinates.
    #[inline]
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point {
            x: self.x + (other.x - self.x) * t,
            y: self.y + (other.y - self.y) * t,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Number of equal parts a segment of length `len` is split into under
/// `spacing`: `ceil(len / spacing)` with a tolerance so that exact multiples
/// (e.g. 0.45 / 0.15) do not round up an extra part, and segments not longer
/// than the spacing stay whole.
#[inline]
pub fn segment_count(len: f64, spacing: f64) -> usize {
    debug_assert!(spacing > 0.0);
    let ratio = len / spacing;
    let parts = (ratio - STRICT_EPS).ceil();
    if parts < 1.0 {
        1
    } else {
        parts as usize
    }
}

/// Interior + end subdivision points of the segment `a -> b` split into `k`
/// equal parts: the points at `t = 1/k, 2/k, ..., 1`. The caller already
/// holds `a`.
pub fn subdivide(a: &Point, b: &Point, k: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(k);
    for i in 1..k {
        out.push(a.lerp(b, i as f64 / k as f64));
    }
    out.push(*b);
    out
}

/// Distance from `p` to the closed segment `a -> b`.
pub fn point_segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let abx = b.x - a.x;
    let aby = b.y - a.y;
    let len_sq = abx * abx + aby * aby;
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * abx + (p.y - a.y) * aby) / len_sq).clamp(0.0, 1.0);
    p.distance(&a.lerp(b, t))
}

/// Axis-aligned bounding box in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Bounds {
    pub const fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Bounds {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }

    /// Default perception range: x in [-15, 15], y in [-30, 30].
    pub const fn perception_default() -> Self {
        Bounds::new(-15.0, -30.0, 15.0, 30.0)
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.max_x > self.min_x && self.max_y > self.min_y)
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn clamp(&self, p: &Point) -> Point {
        Point::new(p.x.clamp(self.min_x, self.max_x), p.y.clamp(self.min_y, self.max_y))
    }

    /// Min-max normalize a point into the unit square over these bounds.
    pub fn normalize(&self, p: &Point) -> Point {
        Point::new(
            (p.x - self.min_x) / self.width(),
            (p.y - self.min_y) / self.height(),
        )
    }

    /// Inverse of [`Bounds::normalize`].
    pub fn denormalize(&self, p: &Point) -> Point {
        Point::new(
            self.min_x + p.x * self.width(),
            self.min_y + p.y * self.height(),
        )
    }

    pub fn expand_to(&mut self, p: &Point) {
        self.min_x = self.min_x.min(p.x);
        self.min_y = self.min_y.min(p.y);
        self.max_x = self.max_x.max(p.x);
        self.max_y = self.max_y.max(p.y);
    }
}

//! Polyline and Bezier path parameterizations.
//!
//! A path is one continuous root-to-leaf traversal of the lane graph. The
//! polyline form is an ordered point list; the Bezier form is a control-point
//! list sampled through the Bernstein weight matrix, and a least-squares fit
//! converts between the two.

use crate::error::{Error, Result};
use crate::geom::Point;

/// Largest supported control-point count. Binomial coefficients are built by
/// the multiplicative recurrence in f64, which is exact up to this order.
pub const MAX_BEZIER_POINTS: usize = 20;

/// Default polyline sample count for learning targets.
pub const DEFAULT_POLYLINE_POINTS: usize = 30;

/// Default Bezier control-point count.
pub const DEFAULT_BEZIER_POINTS: usize = 5;

/// An ordered point sequence with no zero-length segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point>,
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::DegeneratePolyline(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        for pair in points.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DegeneratePolyline(format!(
                    "consecutive identical points at ({}, {})",
                    pair[0].x, pair[0].y
                )));
            }
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegeneratePolyline("non-finite coordinate".into()));
        }
        Ok(Polyline { points })
    }

    /// Builds from raw points, collapsing consecutive duplicates.
    pub fn dedup_from(points: Vec<Point>) -> Result<Self> {
        let mut cleaned: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if cleaned.last() != Some(&p) {
                cleaned.push(p);
            }
        }
        Polyline::new(cleaned)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() // always false by invariant
    }

    pub fn first(&self) -> Point {
        self.points[0]
    }

    pub fn last(&self) -> Point {
        *self.points.last().expect("non-empty by invariant")
    }

    /// Total arc length: the sum of Euclidean segment lengths.
    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|pair| pair[0].distance(&pair[1]))
            .sum()
    }

    /// Cumulative arc length at every point; starts at 0.
    pub fn cumulative_lengths(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.points.len());
        out.push(0.0);
        let mut acc = 0.0;
        for pair in self.points.windows(2) {
            acc += pair[0].distance(&pair[1]);
            out.push(acc);
        }
        out
    }

    /// Chord-length parameters in [0, 1] for every point.
    pub fn chord_parameters(&self) -> Vec<f64> {
        let cum = self.cumulative_lengths();
        let total = *cum.last().expect("non-empty");
        cum.iter().map(|c| c / total).collect()
    }

    /// Point at arc length `s` (clamped to [0, length]).
    pub fn point_at_arc_length(&self, s: f64) -> Point {
        let cum = self.cumulative_lengths();
        let total = *cum.last().expect("non-empty");
        let s = s.clamp(0.0, total);
        // linear walk; callers pass monotone targets so a binary search buys
        // nothing at these sizes
        for i in 0..self.points.len() - 1 {
            if s <= cum[i + 1] {
                let seg = cum[i + 1] - cum[i];
                let t = if seg > 0.0 { (s - cum[i]) / seg } else { 0.0 };
                return self.points[i].lerp(&self.points[i + 1], t);
            }
        }
        self.last()
    }

    /// `n` points uniformly spaced by arc length; first and last points are
    /// preserved exactly.
    pub fn resample(&self, n: usize) -> Result<Polyline> {
        if n < 2 {
            return Err(Error::invalid_argument(format!(
                "resample needs n >= 2, got {n}"
            )));
        }
        let total = self.length();
        if !(total > 0.0) {
            return Err(Error::DegeneratePolyline("zero total length".into()));
        }
        let mut out = Vec::with_capacity(n);
        out.push(self.first());
        for i in 1..n - 1 {
            let s = total * (i as f64 / (n - 1) as f64);
            out.push(self.point_at_arc_length(s));
        }
        out.push(self.last());
        Polyline::dedup_from(out)
    }

    /// The sub-polyline between arc lengths `s0 < s1`.
    pub fn slice_by_arc_length(&self, s0: f64, s1: f64) -> Result<Polyline> {
        let total = self.length();
        let s0 = s0.clamp(0.0, total);
        let s1 = s1.clamp(0.0, total);
        if !(s1 > s0) {
            return Err(Error::invalid_argument(
                "slice needs s1 > s0 inside the path",
            ));
        }
        let cum = self.cumulative_lengths();
        let mut pts = vec![self.point_at_arc_length(s0)];
        for (i, &c) in cum.iter().enumerate() {
            if c > s0 && c < s1 {
                pts.push(self.points[i]);
            }
        }
        pts.push(self.point_at_arc_length(s1));
        Polyline::dedup_from(pts)
    }
}

/// Bernstein weight matrix: entry (k, j) is the weight of control point `j`
/// at sample parameter `t_k`, so curve samples are `weights * controls`.
#[derive(Debug, Clone)]
pub struct WeightMatrix {
    entries: Vec<f64>, // row-major, rows = t_values.len(), cols = n_control
    t_values: Vec<f64>,
    n_control: usize,
}

impl WeightMatrix {
    pub fn rows(&self) -> usize {
        self.t_values.len()
    }

    pub fn cols(&self) -> usize {
        self.n_control
    }

    pub fn at(&self, k: usize, j: usize) -> f64 {
        self.entries[k * self.n_control + j]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.entries[k * self.n_control..(k + 1) * self.n_control]
    }

    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }

    /// Multiply by a control-point column: one sampled point per row.
    pub fn apply(&self, controls: &[Point]) -> Vec<Point> {
        debug_assert_eq!(controls.len(), self.n_control);
        (0..self.rows())
            .map(|k| {
                let row = self.row(k);
                let mut x = 0.0;
                let mut y = 0.0;
                for (w, c) in row.iter().zip(controls) {
                    x += w * c.x;
                    y += w * c.y;
                }
                Point::new(x, y)
            })
            .collect()
    }
}

fn binomial_row(n: usize) -> Vec<f64> {
    // C(n, j) by the multiplicative recurrence; exact in f64 for n <= 20
    let mut row = Vec::with_capacity(n + 1);
    let mut c = 1.0;
    row.push(c);
    for j in 0..n {
        c = c * (n - j) as f64 / (j + 1) as f64;
        row.push(c);
    }
    row
}

/// Bernstein basis matrix for the given sample parameters and control count:
/// entry (k, j) = C(n_b-1, j) * t_k^j * (1 - t_k)^(n_b-1-j).
pub fn bezier_weight_matrix(t_values: &[f64], n_control: usize) -> Result<WeightMatrix> {
    if n_control < 2 {
        return Err(Error::invalid_argument(format!(
            "need at least 2 control points, got {n_control}"
        )));
    }
    if n_control > MAX_BEZIER_POINTS {
        return Err(Error::invalid_argument(format!(
            "control point count {n_control} exceeds the supported maximum {MAX_BEZIER_POINTS}"
        )));
    }
    for &t in t_values {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid_argument(format!(
                "sample parameter {t} outside [0, 1]"
            )));
        }
    }
    let degree = n_control - 1;
    let binom = binomial_row(degree);
    let mut entries = Vec::with_capacity(t_values.len() * n_control);
    for &t in t_values {
        let s = 1.0 - t;
        for (j, &c) in binom.iter().enumerate() {
            entries.push(c * t.powi(j as i32) * s.powi((degree - j) as i32));
        }
    }
    Ok(WeightMatrix {
        entries,
        t_values: t_values.to_vec(),
        n_control,
    })
}

/// An ordered set of Bezier control points.
#[derive(Debug, Clone, PartialEq)]
pub struct BezierPath {
    control_points: Vec<Point>,
}

impl BezierPath {
    pub fn new(control_points: Vec<Point>) -> Result<Self> {
        if control_points.len() < 2 {
            return Err(Error::invalid_argument(format!(
                "need at least 2 control points, got {}",
                control_points.len()
            )));
        }
        if control_points.len() > MAX_BEZIER_POINTS {
            return Err(Error::invalid_argument(format!(
                "control point count {} exceeds the supported maximum {MAX_BEZIER_POINTS}",
                control_points.len()
            )));
        }
        if control_points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid_argument("non-finite control point"));
        }
        Ok(BezierPath { control_points })
    }

    pub fn control_points(&self) -> &[Point] {
        &self.control_points
    }

    pub fn degree(&self) -> usize {
        self.control_points.len() - 1
    }

    /// Curve points at the given parameters, via the weight matrix.
    pub fn sample(&self, t_values: &[f64]) -> Result<Vec<Point>> {
        let w = bezier_weight_matrix(t_values, self.control_points.len())?;
        Ok(w.apply(&self.control_points))
    }

    /// Uniform-parameter sampling into a polyline of `n` points.
    pub fn sample_uniform(&self, n: usize) -> Result<Polyline> {
        if n < 2 {
            return Err(Error::invalid_argument(format!(
                "need at least 2 samples, got {n}"
            )));
        }
        let ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        Polyline::dedup_from(self.sample(&ts)?)
    }
}

/// Least-squares Bezier fit at chord-length parameters with the first and
/// last control points clamped to the polyline endpoints.
pub fn fit_bezier(polyline: &Polyline, n_control: usize) -> Result<BezierPath> {
    let ts = polyline.chord_parameters();
    fit_bezier_at(polyline, &ts, n_control)
}

/// Least-squares Bezier fit at explicit sample parameters (one per polyline
/// point, in [0, 1]), endpoints clamped. [`fit_bezier`] is this with
/// chord-length parameters.
pub fn fit_bezier_at(polyline: &Polyline, ts: &[f64], n_control: usize) -> Result<BezierPath> {
    if !(2..=MAX_BEZIER_POINTS).contains(&n_control) {
        return Err(Error::invalid_argument(format!(
            "control point count must be in [2, {MAX_BEZIER_POINTS}], got {n_control}"
        )));
    }
    if polyline.len() < n_control {
        return Err(Error::invalid_argument(format!(
            "polyline has {} points, need at least n_control = {n_control}",
            polyline.len()
        )));
    }
    if ts.len() != polyline.len() {
        return Err(Error::SizeMismatch(format!(
            "{} sample parameters for {} points",
            ts.len(),
            polyline.len()
        )));
    }
    let first = polyline.first();
    let last = polyline.last();
    if n_control == 2 {
        return BezierPath::new(vec![first, last]);
    }

    let weights = bezier_weight_matrix(ts, n_control)?;
    let interior = n_control - 2;

    // Residual targets once the clamped endpoint terms are moved to the rhs.
    let k = polyline.len();
    let mut rhs_x = vec![0.0; k];
    let mut rhs_y = vec![0.0; k];
    for (i, p) in polyline.points().iter().enumerate() {
        let w0 = weights.at(i, 0);
        let wn = weights.at(i, n_control - 1);
        rhs_x[i] = p.x - w0 * first.x - wn * last.x;
        rhs_y[i] = p.y - w0 * first.y - wn * last.y;
    }

    // Normal equations for the interior control points.
    let mut ata = vec![0.0; interior * interior];
    let mut atb_x = vec![0.0; interior];
    let mut atb_y = vec![0.0; interior];
    for i in 0..k {
        for a in 0..interior {
            let wa = weights.at(i, a + 1);
            atb_x[a] += wa * rhs_x[i];
            atb_y[a] += wa * rhs_y[i];
            for b in 0..interior {
                ata[a * interior + b] += wa * weights.at(i, b + 1);
            }
        }
    }

    let xs = solve_dense(&mut ata.clone(), &mut atb_x.clone(), interior)?;
    let ys = solve_dense(&mut ata, &mut atb_y, interior)?;

    let mut controls = Vec::with_capacity(n_control);
    controls.push(first);
    for j in 0..interior {
        controls.push(Point::new(xs[j], ys[j]));
    }
    controls.push(last);
    BezierPath::new(controls)
}

/// Gaussian elimination with partial pivoting on a dense square system.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Result<Vec<f64>> {
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col].abs() < 1e-12 {
            return Err(Error::SingularSystem(format!(
                "pivot {:.3e} at column {col}",
                a[pivot * n + col]
            )));
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for j in col + 1..n {
            acc -= a[col * n + j] * x[j];
        }
        x[col] = acc / a[col * n + col];
    }
    Ok(x)
}

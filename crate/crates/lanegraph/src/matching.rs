//! Bipartite set-matching objective as pure numeric functions: optimal
//! assignment, focal classification loss, L1 path regression loss, and
//! analytic gradients for verification against finite differences.

use crate::error::{Error, Result};
use crate::path::Polyline;

/// Probability clamp keeping log terms finite.
pub const PROB_EPSILON: f64 = 1e-7;

/// Rectangular cost matrix; rows index predictions, columns ground truths.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>, // row-major
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::SizeMismatch(format!(
                "cost matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (i, v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteCost {
                    row: i / cols,
                    col: i % cols,
                });
            }
        }
        Ok(CostMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CostMatrix::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    /// Total cost of an assignment (sum over assigned rows in row order).
    pub fn total_of(&self, assignment: &[Option<usize>]) -> f64 {
        assignment
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| self.at(i, j)))
            .sum()
    }
}

/// Jonker-Volgenant style shortest-augmenting-path solver on an n x m matrix
/// with n <= m. Returns (column per row, row potentials, column potentials),
/// 0-indexed.
fn jv_solve(n: usize, m: usize, cost: &dyn Fn(usize, usize) -> f64) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    debug_assert!(n <= m);
    // 1-indexed internals; p[j] = row assigned to column j, column 0 is virtual
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![usize::MAX; n];
    for j in 1..=m {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    (row_to_col, u, v)
}

/// Minimum-cost assignment. Every row of the smaller side is assigned; the
/// result maps each row to its column (or `None` for rows left unassigned
/// when rows > cols). Among minimum-cost assignments the one with the
/// lexicographically smallest assignment vector is returned, with `None`
/// ordered after any column index.
pub fn hungarian(cost: &CostMatrix) -> Result<Vec<Option<usize>>> {
    let rows = cost.rows();
    let cols = cost.cols();
    if rows == 0 || cols == 0 {
        return Ok(vec![None; rows]);
    }

    // square-pad with zero-cost dummy rows/columns; dummy columns read as
    // "unassigned" in the output
    let n = rows.max(cols);
    let padded = |i: usize, j: usize| -> f64 {
        if i < rows && j < cols {
            cost.at(i, j)
        } else {
            0.0
        }
    };

    let (base, u, v) = jv_solve(n, n, &padded);
    let total: f64 = (0..n).map(|i| padded(i, base[i])).sum();

    let scale = cost
        .data
        .iter()
        .fold(1.0f64, |acc, x| acc.max(x.abs()))
        .max(total.abs());
    let tol = 1e-9 * (1.0 + scale);

    // Complementary slackness: any minimum-cost assignment uses only edges
    // with zero reduced cost against an optimal dual. If each row has a
    // unique such edge the solution is already the unique optimum.
    let reduced = |i: usize, j: usize| padded(i, j) - u[i + 1] - v[j + 1];
    let mut ambiguous = false;
    for i in 0..rows {
        let mut zero_edges = 0usize;
        for j in 0..n {
            if reduced(i, j) <= tol {
                zero_edges += 1;
                if zero_edges > 1 {
                    break;
                }
            }
        }
        if zero_edges > 1 {
            ambiguous = true;
            break;
        }
    }

    let chosen: Vec<usize> = if !ambiguous {
        base
    } else {
        lexicographic_refine(n, rows, cols, &padded, &reduced, total, tol)
    };

    Ok(chosen
        .iter()
        .take(rows)
        .map(|&j| if j < cols { Some(j) } else { None })
        .collect())
}

/// Fixes rows in order to the smallest column that still admits an optimal
/// completion, verified by re-solving the remaining subproblem.
fn lexicographic_refine(
    n: usize,
    rows: usize,
    cols: usize,
    padded: &dyn Fn(usize, usize) -> f64,
    reduced: &dyn Fn(usize, usize) -> f64,
    total: f64,
    tol: f64,
) -> Vec<usize> {
    let mut fixed: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut fixed_cost = 0.0;

    for i in 0..n {
        // candidate columns: real ones ascending, then a single dummy slot;
        // only zero-reduced-cost edges can appear in an optimal assignment
        let mut candidates: Vec<usize> = (0..cols)
            .filter(|&j| !used[j] && (i >= rows || reduced(i, j) <= tol))
            .collect();
        if let Some(dummy) = (cols..n).find(|&j| !used[j]) {
            candidates.push(dummy);
        }

        let mut adopted = None;
        for &j in &candidates {
            if candidates.len() == 1 {
                adopted = Some(j);
                break;
            }
            // optimal completion over unfixed rows > i and unused columns
            let rest_rows: Vec<usize> = (i + 1..n).collect();
            let mut rest_cols: Vec<usize> = (0..n).filter(|&c| !used[c] && c != j).collect();
            rest_cols.sort_unstable();
            let sub_total = if rest_rows.is_empty() {
                0.0
            } else {
                let (sub_assign, _, _) = jv_solve(rest_rows.len(), rest_cols.len(), &|a, b| {
                    padded(rest_rows[a], rest_cols[b])
                });
                rest_rows
                    .iter()
                    .zip(&sub_assign)
                    .map(|(&r, &c)| padded(r, rest_cols[c]))
                    .sum()
            };
            if fixed_cost + padded(i, j) + sub_total <= total + tol {
                adopted = Some(j);
                break;
            }
        }
        let j = adopted.expect("an optimal completion always exists");
        fixed_cost += padded(i, j);
        used[j] = true;
        fixed.push(j);
    }
    fixed
}

/// Focal classification loss for a single probability.
///
/// Positive target: `-alpha * (1 - p)^gamma * ln(p)`.
/// Negative target: `-(1 - alpha) * p^gamma * ln(1 - p)`.
/// `p` is clamped to `[PROB_EPSILON, 1 - PROB_EPSILON]` first.
pub fn focal_loss(p: f64, positive: bool, alpha: f64, gamma: f64) -> Result<f64> {
    check_focal_params(p, alpha, gamma)?;
    let p = clamp_prob(p);
    Ok(if positive {
        -alpha * (1.0 - p).powf(gamma) * p.ln()
    } else {
        -(1.0 - alpha) * p.powf(gamma) * (1.0 - p).ln()
    })
}

/// Analytic derivative of [`focal_loss`] with respect to `p` (inside the
/// clamp interval).
pub fn focal_loss_grad(p: f64, positive: bool, alpha: f64, gamma: f64) -> Result<f64> {
    check_focal_params(p, alpha, gamma)?;
    let p = clamp_prob(p);
    Ok(if positive {
        let power_term = if gamma == 0.0 {
            0.0
        } else {
            -gamma * (1.0 - p).powf(gamma - 1.0) * p.ln()
        };
        -alpha * (power_term + (1.0 - p).powf(gamma) / p)
    } else {
        let power_term = if gamma == 0.0 {
            0.0
        } else {
            gamma * p.powf(gamma - 1.0) * (1.0 - p).ln()
        };
        -(1.0 - alpha) * (power_term - p.powf(gamma) / (1.0 - p))
    })
}

fn check_focal_params(p: f64, alpha: f64, gamma: f64) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::invalid_argument(format!("probability {p} not finite")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid_argument(format!(
            "focal alpha must be in [0, 1], got {alpha}"
        )));
    }
    if !(gamma >= 0.0) {
        return Err(Error::invalid_argument(format!(
            "focal gamma must be >= 0, got {gamma}"
        )));
    }
    Ok(())
}

#[inline]
fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_EPSILON, 1.0 - PROB_EPSILON)
}

/// Sum over points of |dx| + |dy| between two equally sampled paths.
pub fn l1_path_loss(pred: &Polyline, gt: &Polyline) -> Result<f64> {
    if pred.len() != gt.len() {
        return Err(Error::SizeMismatch(format!(
            "path point counts differ: {} vs {}",
            pred.len(),
            gt.len()
        )));
    }
    Ok(pred
        .points()
        .iter()
        .zip(gt.points())
        .map(|(a, b)| (a.x - b.x).abs() + (a.y - b.y).abs())
        .sum())
}

/// Weights and focal parameters of the matching objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchLossConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub cls_weight: f64,
    pub path_weight: f64,
}

impl Default for MatchLossConfig {
    fn default() -> Self {
        MatchLossConfig {
            alpha: 0.25,
            gamma: 2.0,
            cls_weight: 1.0,
            path_weight: 1.0,
        }
    }
}

/// The matching objective split into its terms, plus the assignment.
#[derive(Debug, Clone)]
pub struct LossBreakdown {
    pub total: f64,
    pub cls_term: f64,
    pub path_term: f64,
    /// Per prediction: the matched ground-truth index, or `None` for the
    /// no-object class.
    pub assignment: Vec<Option<usize>>,
}

fn check_loss_inputs(
    pred_paths: &[Polyline],
    pred_probs: &[f64],
    gt_paths: &[Polyline],
) -> Result<()> {
    if pred_paths.len() != pred_probs.len() {
        return Err(Error::SizeMismatch(format!(
            "{} predicted paths but {} probabilities",
            pred_paths.len(),
            pred_probs.len()
        )));
    }
    if pred_paths.len() < gt_paths.len() {
        return Err(Error::SizeMismatch(format!(
            "predictions ({}) must be at least as many as ground truths ({})",
            pred_paths.len(),
            gt_paths.len()
        )));
    }
    let n_v = pred_paths
        .first()
        .or(gt_paths.first())
        .map(Polyline::len)
        .unwrap_or(0);
    for path in pred_paths.iter().chain(gt_paths) {
        if path.len() != n_v {
            return Err(Error::SizeMismatch(format!(
                "all paths must share one sample count; found {} and {n_v}",
                path.len()
            )));
        }
    }
    Ok(())
}

/// The bipartite matching loss: Hungarian assignment over focal + L1 costs,
/// then focal classification over every prediction (matched as positive,
/// unmatched as no-object) plus L1 regression over matched pairs only.
pub fn bipartite_match_loss(
    pred_paths: &[Polyline],
    pred_probs: &[f64],
    gt_paths: &[Polyline],
    config: &MatchLossConfig,
) -> Result<LossBreakdown> {
    check_loss_inputs(pred_paths, pred_probs, gt_paths)?;

    let n = pred_paths.len();
    let m = gt_paths.len();
    let assignment = if m == 0 {
        vec![None; n]
    } else {
        let mut cost = Vec::with_capacity(n * m);
        for i in 0..n {
            let cls = focal_loss(pred_probs[i], true, config.alpha, config.gamma)?;
            for gt in gt_paths {
                cost.push(
                    config.cls_weight * cls
                        + config.path_weight * l1_path_loss(&pred_paths[i], gt)?,
                );
            }
        }
        hungarian(&CostMatrix::new(n, m, cost)?)?
    };

    let mut cls_term = 0.0;
    let mut path_term = 0.0;
    for i in 0..n {
        cls_term += config.cls_weight
            * focal_loss(pred_probs[i], assignment[i].is_some(), config.alpha, config.gamma)?;
        if let Some(j) = assignment[i] {
            path_term += config.path_weight * l1_path_loss(&pred_paths[i], &gt_paths[j])?;
        }
    }

    Ok(LossBreakdown {
        total: cls_term + path_term,
        cls_term,
        path_term,
        assignment,
    })
}

/// Analytic gradients of the matching objective with the assignment held
/// fixed.
#[derive(Debug, Clone)]
pub struct LossGradients {
    /// d total / d (x, y) for every predicted path point.
    pub point_grads: Vec<Vec<(f64, f64)>>,
    /// d total / d p for every predicted probability.
    pub prob_grads: Vec<f64>,
    pub assignment: Vec<Option<usize>>,
    /// (prediction, point) locations where some coordinate difference is
    /// exactly zero: the L1 kink, where sign(0) = 0 is a subgradient choice.
    pub kinks: Vec<(usize, usize)>,
}

/// Gradient of [`bipartite_match_loss`] w.r.t. predicted coordinates and
/// probabilities. Matched path points get `path_weight * sign(delta)` per
/// coordinate, unmatched predictions contribute zero; probabilities get the
/// focal derivative under their assigned target class.
pub fn loss_gradients(
    pred_paths: &[Polyline],
    pred_probs: &[f64],
    gt_paths: &[Polyline],
    config: &MatchLossConfig,
) -> Result<LossGradients> {
    let breakdown = bipartite_match_loss(pred_paths, pred_probs, gt_paths, config)?;

    let mut point_grads = Vec::with_capacity(pred_paths.len());
    let mut kinks = Vec::new();
    for (i, path) in pred_paths.iter().enumerate() {
        match breakdown.assignment[i] {
            Some(j) => {
                let gt = &gt_paths[j];
                let grads: Vec<(f64, f64)> = path
                    .points()
                    .iter()
                    .zip(gt.points())
                    .enumerate()
                    .map(|(k, (a, b))| {
                        let dx = a.x - b.x;
                        let dy = a.y - b.y;
                        if dx == 0.0 || dy == 0.0 {
                            kinks.push((i, k));
                        }
                        (
                            config.path_weight * sign(dx),
                            config.path_weight * sign(dy),
                        )
                    })
                    .collect();
                point_grads.push(grads);
            }
            None => point_grads.push(vec![(0.0, 0.0); path.len()]),
        }
    }

    let mut prob_grads = Vec::with_capacity(pred_probs.len());
    for (i, &p) in pred_probs.iter().enumerate() {
        prob_grads.push(
            config.cls_weight
                * focal_loss_grad(p, breakdown.assignment[i].is_some(), config.alpha, config.gamma)?,
        );
    }

    Ok(LossGradients {
        point_grads,
        prob_grads,
        assignment: breakdown.assignment,
        kinks,
    })
}

#[inline]
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::rng::SplitMix64;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn square(data: &[&[f64]]) -> CostMatrix {
        let rows = data.len();
        let cols = data[0].len();
        CostMatrix::new(rows, cols, data.iter().flat_map(|r| r.iter().copied()).collect())
            .unwrap()
    }

    /// Brute-force minimum assignment with the same lexicographic tie-break.
    fn brute_force(cost: &CostMatrix) -> (Vec<Option<usize>>, f64) {
        let rows = cost.rows();
        let cols = cost.cols();
        let mut best: Option<(f64, Vec<Option<usize>>)> = None;
        let mut assign: Vec<Option<usize>> = vec![None; rows];
        let mut used = vec![false; cols];
        fn key(a: &[Option<usize>]) -> Vec<usize> {
            a.iter().map(|j| j.map_or(usize::MAX, |j| j)).collect()
        }
        fn rec(
            i: usize,
            remaining: usize,
            cost: &CostMatrix,
            assign: &mut Vec<Option<usize>>,
            used: &mut Vec<bool>,
            best: &mut Option<(f64, Vec<Option<usize>>)>,
        ) {
            let rows = cost.rows();
            if i == rows {
                if remaining > 0 {
                    return; // every column must be covered when cols <= rows
                }
                let total = cost.total_of(assign);
                let better = match best {
                    None => true,
                    Some((bt, ba)) => {
                        total < *bt || (total == *bt && key(assign) < key(ba))
                    }
                };
                if better {
                    *best = Some((total, assign.clone()));
                }
                return;
            }
            let spare_rows = rows - i;
            for j in 0..cost.cols() {
                if !used[j] {
                    used[j] = true;
                    assign[i] = Some(j);
                    rec(i + 1, remaining - 1, cost, assign, used, best);
                    assign[i] = None;
                    used[j] = false;
                }
            }
            if spare_rows > remaining {
                rec(i + 1, remaining, cost, assign, used, best);
            }
        }
        let needed = cols.min(rows);
        rec(0, needed, cost, &mut assign, &mut used, &mut best);
        let (total, assignment) = best.unwrap();
        (assignment, total)
    }

    #[test]
    fn hungarian_identity_diagonal() {
        let c = square(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let a = hungarian(&c).unwrap();
        assert_eq!(a, vec![Some(0), Some(1)]);
        assert_eq!(c.total_of(&a), 0.0);
    }

    #[test]
    fn hungarian_single_cell() {
        let c = square(&[&[5.0]]);
        let a = hungarian(&c).unwrap();
        assert_eq!(a, vec![Some(0)]);
        assert_eq!(c.total_of(&a), 5.0);
    }

    #[test]
    fn hungarian_tie_break_lexicographic() {
        let c = square(&[&[0.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(hungarian(&c).unwrap(), vec![Some(0), Some(1)]);

        let c = square(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]]);
        assert_eq!(hungarian(&c).unwrap(), vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn hungarian_rectangular_rows_exceed_cols() {
        // three predictions, one ground truth: lexicographic prefers the
        // earliest row among equal costs
        let c = CostMatrix::new(3, 1, vec![2.0, 1.0, 1.0]).unwrap();
        let a = hungarian(&c).unwrap();
        assert_eq!(a, vec![None, Some(0), None]);
    }

    #[test]
    fn hungarian_rejects_non_finite() {
        assert!(CostMatrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(CostMatrix::new(1, 2, vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn hungarian_matches_brute_force_random() {
        let mut rng = SplitMix64::new(0xC057);
        for case in 0..300 {
            let rows = 1 + (rng.next_below(6)) as usize;
            let cols = 1 + (rng.next_below(rows as u64)) as usize;
            let data: Vec<f64> = (0..rows * cols).map(|_| rng.uniform(0.0, 10.0)).collect();
            let c = CostMatrix::new(rows, cols, data).unwrap();
            let got = hungarian(&c).unwrap();
            let (want, want_total) = brute_force(&c);
            assert_eq!(got, want, "case {case} {rows}x{cols}");
            assert_eq!(c.total_of(&got), want_total);
        }
    }

    #[test]
    fn hungarian_matches_brute_force_with_negative_entries() {
        let mut rng = SplitMix64::new(0x9E6);
        for case in 0..200 {
            let rows = 1 + (rng.next_below(5)) as usize;
            let cols = 1 + (rng.next_below(5)) as usize;
            let data: Vec<f64> = (0..rows * cols).map(|_| rng.uniform(-5.0, 5.0)).collect();
            let c = CostMatrix::new(rows, cols, data).unwrap();
            let got = hungarian(&c).unwrap();
            let (want, want_total) = brute_force(&c);
            assert_eq!(got, want, "case {case} {rows}x{cols}");
            assert_eq!(c.total_of(&got), want_total);
        }
    }

    #[test]
    fn hungarian_matches_brute_force_with_ties() {
        let mut rng = SplitMix64::new(0x7135);
        for case in 0..200 {
            let n = 2 + (rng.next_below(4)) as usize;
            // small integer costs force plenty of exact ties
            let data: Vec<f64> = (0..n * n).map(|_| rng.next_below(3) as f64).collect();
            let c = CostMatrix::new(n, n, data).unwrap();
            let got = hungarian(&c).unwrap();
            let (want, want_total) = brute_force(&c);
            assert_eq!(got, want, "case {case} n={n} {:?}", c);
            assert_eq!(c.total_of(&got), want_total);
        }
    }

    #[test]
    fn hungarian_invariant_under_row_constant_shift() {
        let mut rng = SplitMix64::new(0xADD);
        for _ in 0..50 {
            let n = 2 + (rng.next_below(4)) as usize;
            let data: Vec<f64> = (0..n * n).map(|_| rng.uniform(0.0, 5.0)).collect();
            let c = CostMatrix::new(n, n, data.clone()).unwrap();
            let base = hungarian(&c).unwrap();

            let row = rng.next_below(n as u64) as usize;
            let mut shifted = data.clone();
            for j in 0..n {
                shifted[row * n + j] += 3.5;
            }
            let cs = CostMatrix::new(n, n, shifted).unwrap();
            assert_eq!(hungarian(&cs).unwrap(), base);

            let col = rng.next_below(n as u64) as usize;
            let mut shifted = data;
            for i in 0..n {
                shifted[i * n + col] += 2.25;
            }
            let cs = CostMatrix::new(n, n, shifted).unwrap();
            assert_eq!(hungarian(&cs).unwrap(), base);
        }
    }

    #[test]
    fn focal_loss_examples() {
        // gamma = 0, alpha = 1 reduces to cross-entropy
        let v = focal_loss(0.5, true, 1.0, 0.0).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-12);

        // perfectly confident positive
        let v = focal_loss(1.0, true, 0.25, 2.0).unwrap();
        assert!(v < 1e-10);

        let v = focal_loss(0.9, true, 0.25, 2.0).unwrap();
        let want = -0.25 * 0.1f64.powi(2) * 0.9f64.ln();
        assert!((v - want).abs() < 1e-15);
        assert!((v - 2.634e-4).abs() < 5e-7);
    }

    #[test]
    fn focal_loss_rejects_bad_params() {
        assert!(focal_loss(0.5, true, -0.1, 2.0).is_err());
        assert!(focal_loss(0.5, true, 1.1, 2.0).is_err());
        assert!(focal_loss(0.5, true, 0.25, -1.0).is_err());
    }

    #[test]
    fn focal_loss_monotonic() {
        let mut prev = focal_loss(0.05, true, 0.25, 2.0).unwrap();
        for i in 1..20 {
            let p = 0.05 + 0.045 * i as f64;
            let cur = focal_loss(p, true, 0.25, 2.0).unwrap();
            assert!(cur < prev, "positive focal not decreasing at p={p}");
            prev = cur;
        }
        let mut prev = focal_loss(0.05, false, 0.25, 2.0).unwrap();
        for i in 1..20 {
            let p = 0.05 + 0.045 * i as f64;
            let cur = focal_loss(p, false, 0.25, 2.0).unwrap();
            assert!(cur > prev, "negative focal not increasing at p={p}");
            prev = cur;
        }
    }

    fn straight_path(x_off: f64, n: usize) -> Polyline {
        Polyline::new((0..n).map(|i| p(x_off, i as f64)).collect()).unwrap()
    }

    #[test]
    fn l1_loss_examples() {
        let a = straight_path(0.0, 30);
        assert_eq!(l1_path_loss(&a, &a).unwrap(), 0.0);

        let b = straight_path(0.1, 30);
        assert!((l1_path_loss(&a, &b).unwrap() - 3.0).abs() < 1e-12);

        let c = Polyline::new(vec![p(0.0, 0.0), p(1.0, 1.0)]).unwrap();
        let d = Polyline::new(vec![p(0.3, -0.4), p(1.0, 1.0)]).unwrap();
        assert!((l1_path_loss(&c, &d).unwrap() - 0.7).abs() < 1e-12);

        let e = straight_path(0.0, 5);
        assert!(l1_path_loss(&a, &e).is_err());
    }

    #[test]
    fn bipartite_perfect_prediction_is_zero() {
        let gt = vec![straight_path(0.0, 10)];
        let pred = vec![straight_path(0.0, 10)];
        let out = bipartite_match_loss(&pred, &[1.0 - PROB_EPSILON], &gt, &MatchLossConfig::default())
            .unwrap();
        assert!(out.total < 1e-6, "total {}", out.total);
        assert_eq!(out.assignment, vec![Some(0)]);
        assert!((out.total - (out.cls_term + out.path_term)).abs() < 1e-12);
    }

    #[test]
    fn bipartite_nearer_prediction_wins() {
        let gt = vec![straight_path(0.0, 10)];
        let pred = vec![straight_path(5.0, 10), straight_path(0.2, 10)];
        let out =
            bipartite_match_loss(&pred, &[0.9, 0.9], &gt, &MatchLossConfig::default()).unwrap();
        assert_eq!(out.assignment, vec![None, Some(0)]);
    }

    #[test]
    fn bipartite_no_ground_truth() {
        let pred = vec![straight_path(0.0, 4), straight_path(1.0, 4)];
        let probs = [0.3, 0.6];
        let cfg = MatchLossConfig::default();
        let out = bipartite_match_loss(&pred, &probs, &[], &cfg).unwrap();
        assert_eq!(out.path_term, 0.0);
        let want: f64 = probs
            .iter()
            .map(|&q| focal_loss(q, false, cfg.alpha, cfg.gamma).unwrap())
            .sum();
        assert!((out.cls_term - want).abs() < 1e-12);
    }

    #[test]
    fn bipartite_rejects_fewer_preds_than_gts() {
        let gt = vec![straight_path(0.0, 4), straight_path(1.0, 4)];
        let pred = vec![straight_path(0.0, 4)];
        assert!(bipartite_match_loss(&pred, &[0.5], &gt, &MatchLossConfig::default()).is_err());
    }

    #[test]
    fn gradients_match_signs() {
        let gt = vec![straight_path(0.0, 5)];
        let pred = vec![straight_path(0.4, 5)];
        let out = loss_gradients(&pred, &[0.8], &gt, &MatchLossConfig::default()).unwrap();
        for &(gx, gy) in &out.point_grads[0] {
            assert_eq!(gx, 1.0); // every dx = +0.4
            assert_eq!(gy, 0.0); // dy = 0 kink, sign(0) = 0
        }
        assert_eq!(out.kinks.len(), 5);
    }

    #[test]
    fn gradients_zero_for_unmatched() {
        let gt = vec![straight_path(0.0, 5)];
        let pred = vec![straight_path(0.1, 5), straight_path(7.0, 5)];
        let out = loss_gradients(&pred, &[0.8, 0.8], &gt, &MatchLossConfig::default()).unwrap();
        assert_eq!(out.assignment[1], None);
        for &(gx, gy) in &out.point_grads[1] {
            assert_eq!((gx, gy), (0.0, 0.0));
        }
    }

    #[test]
    fn focal_grad_matches_finite_difference() {
        let h = 1e-6;
        for &(alpha, gamma) in &[(0.25, 2.0), (0.5, 0.0), (0.9, 1.5)] {
            for &positive in &[true, false] {
                for i in 1..10 {
                    let p = 0.1 * i as f64 - 0.05;
                    let g = focal_loss_grad(p, positive, alpha, gamma).unwrap();
                    let fd = (focal_loss(p + h, positive, alpha, gamma).unwrap()
                        - focal_loss(p - h, positive, alpha, gamma).unwrap())
                        / (2.0 * h);
                    assert!(
                        (g - fd).abs() <= 1e-5 * g.abs().max(1.0),
                        "p={p} alpha={alpha} gamma={gamma} positive={positive}: {g} vs {fd}"
                    );
                }
            }
        }
    }
}

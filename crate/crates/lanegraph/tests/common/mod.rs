//! Shared fixtures and the independent brute-force metric oracle.
//!
//! The oracle reimplements the evaluation protocol from scratch on plain
//! position/edge lists: its own interpolation, exhaustive matching (memoized
//! search over ground-truth subsets, exact for the fixture sizes used here),
//! an O(V^2) Dijkstra, and the precision/recall sums. It shares no algorithm
//! with the library implementation it checks.

#![allow(dead_code)]

use lanegraph::geom::Point;
use lanegraph::graph::DirectedLaneGraph;
use lanegraph::rng::SplitMix64;

pub fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

pub fn chain_small() -> DirectedLaneGraph {
    let pts: Vec<Point> = (0..5).map(|i| p(0.0, i as f64 * 0.12)).collect();
    DirectedLaneGraph::from_positions(&pts, &[(0, 1), (1, 2), (2, 3), (3, 4)])
}

/// Chain whose edges are longer than the metric spacing, so the metric's
/// internal interpolation inserts vertices (7 after interpolation at 0.15).
pub fn chain_interp() -> DirectedLaneGraph {
    DirectedLaneGraph::from_positions(
        &[p(0.0, 0.0), p(0.0, 0.4), p(0.0, 0.8)],
        &[(0, 1), (1, 2)],
    )
}

pub fn chain_eleven() -> DirectedLaneGraph {
    let pts: Vec<Point> = (0..11).map(|i| p(0.0, i as f64 * 0.12)).collect();
    let edges: Vec<(u32, u32)> = (0..10).map(|i| (i, i + 1)).collect();
    DirectedLaneGraph::from_positions(&pts, &edges)
}

pub fn chain_twenty() -> DirectedLaneGraph {
    let pts: Vec<Point> = (0..20).map(|i| p(0.0, i as f64 * 0.15)).collect();
    let edges: Vec<(u32, u32)> = (0..19).map(|i| (i, i + 1)).collect();
    DirectedLaneGraph::from_positions(&pts, &edges)
}

pub fn fork_small() -> DirectedLaneGraph {
    DirectedLaneGraph::from_positions(
        &[
            p(0.0, 0.0),
            p(0.0, 0.12),
            p(-0.09, 0.24),
            p(0.09, 0.24),
            p(-0.12, 0.36),
            p(0.12, 0.36),
        ],
        &[(0, 1), (1, 2), (1, 3), (2, 4), (3, 5)],
    )
}

pub fn merge_small() -> DirectedLaneGraph {
    DirectedLaneGraph::from_positions(
        &[
            p(-0.12, 0.0),
            p(0.12, 0.0),
            p(-0.09, 0.12),
            p(0.09, 0.12),
            p(0.0, 0.24),
            p(0.0, 0.36),
        ],
        &[(0, 2), (1, 3), (2, 4), (3, 4), (4, 5)],
    )
}

pub fn diamond() -> DirectedLaneGraph {
    DirectedLaneGraph::from_positions(
        &[p(0.0, 0.0), p(-0.09, 0.12), p(0.1, 0.13), p(0.0, 0.25)],
        &[(0, 1), (0, 2), (1, 3), (2, 3)],
    )
}

pub fn double_diamond() -> DirectedLaneGraph {
    DirectedLaneGraph::from_positions(
        &[
            p(0.0, 0.0),
            p(-0.09, 0.12),
            p(0.1, 0.13),
            p(0.0, 0.25),
            p(-0.11, 0.37),
            p(0.08, 0.38),
            p(0.0, 0.5),
        ],
        &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6)],
    )
}

/// Rigid translation of a graph.
pub fn shifted(g: &DirectedLaneGraph, dx: f64, dy: f64) -> DirectedLaneGraph {
    DirectedLaneGraph::new(
        g.vertices()
            .iter()
            .map(|(id, q)| (*id, p(q.x + dx, q.y + dy)))
            .collect(),
        g.edges().to_vec(),
    )
}

/// Seeded per-vertex jitter.
pub fn jittered(g: &DirectedLaneGraph, sigma: f64, seed: u64) -> DirectedLaneGraph {
    let mut rng = SplitMix64::new(seed);
    DirectedLaneGraph::new(
        g.vertices()
            .iter()
            .map(|(id, q)| {
                (
                    *id,
                    p(q.x + sigma * rng.normal(), q.y + sigma * rng.normal()),
                )
            })
            .collect(),
        g.edges().to_vec(),
    )
}

/// The full fixture suite as (name, predicted, ground truth) triples.
pub fn fixture_suite() -> Vec<(String, DirectedLaneGraph, DirectedLaneGraph)> {
    let mut suite = Vec::new();
    // every base stays at or below 12 vertices after interpolation, the
    // feasibility bound of the exhaustive oracle matcher
    let bases: Vec<(&str, DirectedLaneGraph)> = vec![
        ("chain", chain_small()),
        ("chain-interp", chain_interp()),
        ("chain-11", chain_eleven()),
        ("fork", fork_small()),
        ("merge", merge_small()),
        ("diamond", diamond()),
        ("double-diamond", double_diamond()),
    ];
    for (name, base) in bases {
        suite.push((format!("{name}/identity"), base.clone(), base.clone()));
        suite.push((format!("{name}/shift-0.2"), shifted(&base, 0.2, 0.0), base.clone()));
        suite.push((format!("{name}/shift-1.0"), shifted(&base, 1.0, 0.0), base.clone()));
        suite.push((
            format!("{name}/noisy"),
            jittered(&base, 0.05, 0xFEED ^ name.len() as u64),
            base.clone(),
        ));
    }
    // structural mismatch: prediction misses the fork's right branch
    let fork = fork_small();
    let partial = DirectedLaneGraph::from_positions(
        &[p(0.0, 0.0), p(0.0, 0.12), p(-0.09, 0.24), p(-0.12, 0.36)],
        &[(0, 1), (1, 2), (2, 3)],
    );
    suite.push(("fork/missing-branch".to_string(), partial, fork));
    suite
}

// ---------------------------------------------------------------------------
// the independent oracle
// ---------------------------------------------------------------------------

pub mod oracle {
    use std::collections::HashMap;

    /// Strict-less comparison with the documented 1e-9 exclusion band.
    fn lt(value: f64, limit: f64) -> bool {
        value + 1e-9 < limit
    }

    #[derive(Clone)]
    pub struct FlatGraph {
        pub pos: Vec<(f64, f64)>,
        pub edges: Vec<(usize, usize)>,
    }

    impl FlatGraph {
        pub fn from_graph(g: &lanegraph::graph::DirectedLaneGraph) -> FlatGraph {
            let slot: HashMap<_, _> = g
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, (id, _))| (*id, i))
                .collect();
            FlatGraph {
                pos: g.vertices().iter().map(|(_, p)| (p.x, p.y)).collect(),
                edges: g.edges().iter().map(|(a, b)| (slot[a], slot[b])).collect(),
            }
        }

        pub fn undirected(&self) -> FlatGraph {
            let mut set: std::collections::BTreeSet<(usize, usize)> = Default::default();
            for &(a, b) in &self.edges {
                set.insert((a, b));
                set.insert((b, a));
            }
            FlatGraph {
                pos: self.pos.clone(),
                edges: set.into_iter().collect(),
            }
        }
    }

    fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
        let dx = a.0 - b.0;
        let dy = a.1 - b.1;
        (dx * dx + dy * dy).sqrt()
    }

    /// Splits every edge longer than the spacing into ceil(len/spacing)
    /// equal parts (tolerant ceil, same documented rule).
    pub fn interpolate(g: &FlatGraph, spacing: f64) -> FlatGraph {
        let mut pos = g.pos.clone();
        let mut edges = Vec::new();
        for &(a, b) in &g.edges {
            let len = dist(g.pos[a], g.pos[b]);
            let parts = ((len / spacing - 1e-9).ceil()).max(1.0) as usize;
            let mut prev = a;
            for i in 1..parts {
                let t = i as f64 / parts as f64;
                let x = g.pos[a].0 + (g.pos[b].0 - g.pos[a].0) * t;
                let y = g.pos[a].1 + (g.pos[b].1 - g.pos[a].1) * t;
                pos.push((x, y));
                edges.push((prev, pos.len() - 1));
                prev = pos.len() - 1;
            }
            edges.push((prev, b));
        }
        FlatGraph { pos, edges }
    }

    /// All (pred, gt, distance) pairs strictly under the threshold.
    fn candidates(pred: &[(f64, f64)], gt: &[(f64, f64)], threshold: f64) -> Vec<Vec<(usize, f64)>> {
        pred.iter()
            .map(|&pp| {
                gt.iter()
                    .enumerate()
                    .filter_map(|(j, &gp)| {
                        let d = dist(pp, gp);
                        lt(d, threshold).then_some((j, d))
                    })
                    .collect()
            })
            .collect()
    }

    /// Exhaustive maximum-cardinality minimum-distance matching by memoized
    /// search over ground-truth subsets. Exact; feasible while the reachable
    /// subset count stays small (all fixtures here).
    pub struct ExactMatcher {
        cand: Vec<Vec<(usize, f64)>>,
        memo: HashMap<(usize, u32), (usize, f64)>,
    }

    impl ExactMatcher {
        pub fn new(pred: &[(f64, f64)], gt: &[(f64, f64)], threshold: f64) -> ExactMatcher {
            assert!(gt.len() <= 32, "oracle matcher is for small fixtures");
            ExactMatcher {
                cand: candidates(pred, gt, threshold),
                memo: HashMap::new(),
            }
        }

        /// (cardinality, total distance) best achievable from pred `i` on,
        /// with `mask` ground truths already taken.
        fn best(&mut self, i: usize, mask: u32) -> (usize, f64) {
            if i == self.cand.len() {
                return (0, 0.0);
            }
            if let Some(&v) = self.memo.get(&(i, mask)) {
                return v;
            }
            let mut best = self.best(i + 1, mask); // leave pred i unmatched
            for k in 0..self.cand[i].len() {
                let (j, d) = self.cand[i][k];
                if mask & (1 << j) == 0 {
                    let (c, t) = self.best(i + 1, mask | (1 << j));
                    let v = (c + 1, t + d);
                    if v.0 > best.0 || (v.0 == best.0 && v.1 < best.1) {
                        best = v;
                    }
                }
            }
            self.memo.insert((i, mask), best);
            best
        }

        pub fn optimum(&mut self) -> (usize, f64) {
            self.best(0, 0)
        }

        /// Reconstructs one optimal pair list by walking the memo.
        pub fn pairs(&mut self) -> Vec<(usize, usize, f64)> {
            let mut out = Vec::new();
            let mut mask = 0u32;
            let mut want = self.best(0, 0);
            for i in 0..self.cand.len() {
                let skip = self.best(i + 1, mask);
                if skip == want {
                    continue;
                }
                let mut advanced = false;
                for k in 0..self.cand[i].len() {
                    let (j, d) = self.cand[i][k];
                    if mask & (1 << j) == 0 {
                        let (c, t) = self.best(i + 1, mask | (1 << j));
                        if (c + 1, t + d) == want {
                            out.push((i, j, d));
                            mask |= 1 << j;
                            want = (c, t);
                            advanced = true;
                            break;
                        }
                    }
                }
                assert!(advanced, "memo walk must follow an optimal branch");
            }
            out
        }
    }

    /// O(V^2) Dijkstra; vertices kept strictly inside the bound, anchor
    /// always kept.
    pub fn traverse(g: &FlatGraph, anchor: usize, max_dist: f64) -> Vec<usize> {
        let n = g.pos.len();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(a, b) in &g.edges {
            adj[a].push((b, dist(g.pos[a], g.pos[b])));
        }
        let mut d = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        d[anchor] = 0.0;
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..n {
                if !done[v] && d[v] < best {
                    best = d[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            for &(v, w) in &adj[u] {
                if d[u] + w < d[v] {
                    d[v] = d[u] + w;
                }
            }
        }
        (0..n)
            .filter(|&v| v == anchor || lt(d[v], max_dist))
            .collect()
    }

    fn match_count(pred: &[(f64, f64)], gt: &[(f64, f64)], threshold: f64) -> usize {
        ExactMatcher::new(pred, gt, threshold).optimum().0
    }

    fn subgraph_pr(pred: &[(f64, f64)], gt: &[(f64, f64)], threshold: f64) -> (f64, f64) {
        if pred.is_empty() {
            return if gt.is_empty() { (1.0, 1.0) } else { (0.0, 0.0) };
        }
        if gt.is_empty() {
            return (0.0, 1.0);
        }
        let n = match_count(pred, gt, threshold) as f64;
        (n / pred.len() as f64, n / gt.len() as f64)
    }

    pub struct OracleConfig {
        pub spacing: f64,
        pub threshold: f64,
        pub traverse: f64,
        pub directed: bool,
    }

    fn positions_of(g: &FlatGraph, keep: &[usize]) -> Vec<(f64, f64)> {
        keep.iter().map(|&i| g.pos[i]).collect()
    }

    /// Independent TOPO computation; returns (precision, recall).
    pub fn topo(pred: &FlatGraph, gt: &FlatGraph, cfg: &OracleConfig) -> (f64, f64) {
        let pred_i = interpolate(pred, cfg.spacing);
        let gt_i = interpolate(gt, cfg.spacing);
        let (pred_t, gt_t) = if cfg.directed {
            (pred_i.clone(), gt_i.clone())
        } else {
            (pred_i.undirected(), gt_i.undirected())
        };
        let n_pred = pred_t.pos.len();
        let n_gt = gt_t.pos.len();
        if n_pred == 0 || n_gt == 0 {
            return match (n_pred, n_gt) {
                (0, 0) => (1.0, 1.0),
                (0, _) => (0.0, 0.0),
                _ => (0.0, 1.0),
            };
        }

        let pairs = ExactMatcher::new(&pred_t.pos, &gt_t.pos, cfg.threshold).pairs();
        let mut pre_sum = 0.0;
        let mut rec_sum = 0.0;
        for &(pv, gv, _) in &pairs {
            let ps = positions_of(&pred_t, &traverse(&pred_t, pv, cfg.traverse));
            let gs = positions_of(&gt_t, &traverse(&gt_t, gv, cfg.traverse));
            let (pre, rec) = subgraph_pr(&ps, &gs, cfg.threshold);
            pre_sum += pre;
            rec_sum += rec;
        }
        (pre_sum / n_pred as f64, rec_sum / n_gt as f64)
    }

    /// Independent Junction TOPO computation; returns (precision, recall)
    /// plus the junction count.
    pub fn junction_topo(pred: &FlatGraph, gt: &FlatGraph, cfg: &OracleConfig) -> (f64, f64, usize) {
        let pred_i = interpolate(pred, cfg.spacing);
        let gt_i = interpolate(gt, cfg.spacing);

        // junctions come from the directed interpolated ground truth
        let mut indeg = vec![0usize; gt_i.pos.len()];
        let mut outdeg = vec![0usize; gt_i.pos.len()];
        for &(a, b) in &gt_i.edges {
            outdeg[a] += 1;
            indeg[b] += 1;
        }
        let junctions: Vec<usize> = (0..gt_i.pos.len())
            .filter(|&v| indeg[v] >= 2 || outdeg[v] >= 2)
            .collect();
        if junctions.is_empty() {
            return (1.0, 1.0, 0);
        }

        let (pred_t, gt_t) = if cfg.directed {
            (pred_i.clone(), gt_i.clone())
        } else {
            (pred_i.undirected(), gt_i.undirected())
        };

        let pairs = ExactMatcher::new(&pred_t.pos, &gt_t.pos, cfg.threshold).pairs();
        let partner: HashMap<usize, usize> = pairs.iter().map(|&(p, g, _)| (g, p)).collect();

        let mut pre_sum = 0.0;
        let mut rec_sum = 0.0;
        for &j in &junctions {
            let gs = positions_of(&gt_t, &traverse(&gt_t, j, cfg.traverse));
            let anchor = partner.get(&j).copied().or_else(|| {
                // nearest predicted vertex strictly within the threshold
                let mut best: Option<(f64, usize)> = None;
                for (i, &pp) in pred_t.pos.iter().enumerate() {
                    let d = dist(pp, gt_t.pos[j]);
                    if lt(d, cfg.threshold) && best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, i));
                    }
                }
                best.map(|(_, i)| i)
            });
            let (pre, rec) = match anchor {
                Some(a) => {
                    let ps = positions_of(&pred_t, &traverse(&pred_t, a, cfg.traverse));
                    subgraph_pr(&ps, &gs, cfg.threshold)
                }
                None => subgraph_pr(&[], &gs, cfg.threshold),
            };
            pre_sum += pre;
            rec_sum += rec;
        }
        let n = junctions.len() as f64;
        (pre_sum / n, rec_sum / n, junctions.len())
    }
}

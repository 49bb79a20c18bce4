//! The lane-graph evaluation protocol: vertex matching, subgraph
//! precision/recall, TOPO and Junction TOPO, directed and undirected.
//!
//! Both graphs are interpolated to the configured spacing; vertices closer
//! than the match threshold are candidates; a maximum-cardinality one-to-one
//! matching (minimum total distance among those) pairs them; each pair
//! contributes the precision/recall of the subgraphs traversed around its two
//! vertices, normalized by the total interpolated vertex counts.

use crate::error::Result;
use crate::geom::{strictly_less, Point};
use crate::graph::{DirectedLaneGraph, Subgraph, VertexId};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// Interpolation spacing in meters applied to both graphs.
    pub interpolation_spacing: f64,
    /// Vertex pairs strictly closer than this are match candidates.
    pub match_threshold: f64,
    /// Subgraph traversal bound in meters.
    pub traverse_dist: f64,
    /// Directed traversal (false = undirected variant).
    pub directed: bool,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            interpolation_spacing: 0.15,
            match_threshold: 0.45,
            traverse_dist: 7.5,
            directed: true,
        }
    }
}

impl MetricConfig {
    pub fn undirected() -> Self {
        MetricConfig {
            directed: false,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if !(self.interpolation_spacing > 0.0) {
            return Err(Error::invalid_argument(format!(
                "interpolation_spacing must be > 0, got {}",
                self.interpolation_spacing
            )));
        }
        if !(self.match_threshold > 0.0) {
            return Err(Error::invalid_argument(format!(
                "match_threshold must be > 0, got {}",
                self.match_threshold
            )));
        }
        if !(self.traverse_dist > 0.0) {
            return Err(Error::invalid_argument(format!(
                "traverse_dist must be > 0, got {}",
                self.traverse_dist
            )));
        }
        if self.match_threshold < self.interpolation_spacing {
            return Err(Error::invalid_argument(format!(
                "match_threshold {} must be >= interpolation_spacing {}",
                self.match_threshold, self.interpolation_spacing
            )));
        }
        Ok(())
    }
}

/// One-to-one vertex correspondence between a predicted and a ground-truth
/// graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchResult {
    /// (predicted id, ground-truth id, distance), sorted by predicted id.
    pub pairs: Vec<(VertexId, VertexId, f64)>,
    pub unmatched_pred: Vec<VertexId>,
    pub unmatched_gt: Vec<VertexId>,
}

impl MatchResult {
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn gt_partner_of(&self) -> HashMap<VertexId, VertexId> {
        self.pairs.iter().map(|&(p, g, _)| (g, p)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorScore {
    /// Ground-truth-side anchor in the interpolated graph.
    pub anchor: VertexId,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFlags {
    /// The evaluated prediction came from a truncated path decomposition.
    pub truncated_input: bool,
    /// An empty-graph convention determined the headline numbers.
    pub empty_graph: bool,
    /// Junction metric on a ground truth with no junctions.
    pub degenerate_no_junctions: bool,
}

/// Precision/recall/F1 plus per-anchor detail for one metric evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopoReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_anchor: Vec<AnchorScore>,
    pub config: MetricConfig,
    pub flags: ReportFlags,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl TopoReport {
    fn new(precision: f64, recall: f64, per_anchor: Vec<AnchorScore>, config: MetricConfig, flags: ReportFlags) -> Self {
        TopoReport {
            precision,
            recall,
            f1: f1_score(precision, recall),
            per_anchor,
            config,
            flags,
            metadata: BTreeMap::new(),
        }
    }
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Maximum-cardinality one-to-one matching between vertices of `pred` and
/// `gt`, minimizing total distance among maximum matchings. Candidate pairs
/// are those strictly closer than `threshold`.
pub fn match_vertices(
    pred: &DirectedLaneGraph,
    gt: &DirectedLaneGraph,
    threshold: f64,
) -> MatchResult {
    let pred_vs = pred.vertices();
    let gt_vs = gt.vertices();

    // spatial hash over ground-truth vertices, cell size = threshold
    let cell = |p: &Point| -> (i64, i64) {
        ((p.x / threshold).floor() as i64, (p.y / threshold).floor() as i64)
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (slot, (_, p)) in gt_vs.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(slot);
    }

    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (pi, (_, pp)) in pred_vs.iter().enumerate() {
        let (cx, cy) = cell(pp);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(slots) = grid.get(&(cx + dx, cy + dy)) {
                    for &gi in slots {
                        let d = pp.distance(&gt_vs[gi].1);
                        if strictly_less(d, threshold) {
                            edges.push((pi, gi, d));
                        }
                    }
                }
            }
        }
    }

    let matched = min_cost_max_matching(pred_vs.len(), gt_vs.len(), &edges);

    let mut pairs: Vec<(VertexId, VertexId, f64)> = matched
        .iter()
        .map(|&(pi, gi, d)| (pred_vs[pi].0, gt_vs[gi].0, d))
        .collect();
    pairs.sort_unstable_by_key(|&(p, _, _)| p);

    let matched_pred: std::collections::HashSet<usize> =
        matched.iter().map(|&(pi, _, _)| pi).collect();
    let matched_gt: std::collections::HashSet<usize> =
        matched.iter().map(|&(_, gi, _)| gi).collect();
    let mut unmatched_pred: Vec<VertexId> = pred_vs
        .iter()
        .enumerate()
        .filter(|(slot, _)| !matched_pred.contains(slot))
        .map(|(_, (id, _))| *id)
        .collect();
    unmatched_pred.sort_unstable();
    let mut unmatched_gt: Vec<VertexId> = gt_vs
        .iter()
        .enumerate()
        .filter(|(slot, _)| !matched_gt.contains(slot))
        .map(|(_, (id, _))| *id)
        .collect();
    unmatched_gt.sort_unstable();

    MatchResult {
        pairs,
        unmatched_pred,
        unmatched_gt,
    }
}

/// Successive-shortest-path min-cost flow specialized to unit-capacity
/// bipartite matching. Augments one unit along the cheapest path until no
/// augmenting path remains, which yields the maximum-cardinality matching of
/// minimum total cost. Costs are non-negative; Johnson potentials keep every
/// Dijkstra run on non-negative reduced costs.
fn min_cost_max_matching(
    n_left: usize,
    n_right: usize,
    edges: &[(usize, usize, f64)],
) -> Vec<(usize, usize, f64)> {
    if edges.is_empty() {
        return Vec::new();
    }

    // adjacency of candidate edges per left vertex
    let mut adj: Vec<Vec<(usize, f64, usize)>> = vec![Vec::new(); n_left]; // (right, cost, edge idx)
    for (idx, &(l, r, c)) in edges.iter().enumerate() {
        adj[l].push((r, c, idx));
    }

    let mut match_of_right: Vec<Option<usize>> = vec![None; n_right]; // right -> left
    let mut match_of_left: Vec<Option<(usize, f64)>> = vec![None; n_left]; // left -> (right, cost)
    let mut pot_left = vec![0.0f64; n_left];
    let mut pot_right = vec![0.0f64; n_right];

    loop {
        // multi-source Dijkstra from every unmatched left vertex over the
        // residual graph: forward left->right on unmatched edges, backward
        // right->left on matched ones. The first *free* right vertex popped
        // has the minimal final distance, so the search stops there.
        let mut dist_l = vec![f64::INFINITY; n_left];
        let mut dist_r = vec![f64::INFINITY; n_right];
        let mut parent_r: Vec<Option<(usize, f64)>> = vec![None; n_right]; // right <- (left, cost)
        let mut heap: std::collections::BinaryHeap<MatchHeapEntry> = Default::default();
        for l in 0..n_left {
            if match_of_left[l].is_none() {
                dist_l[l] = 0.0;
                heap.push(MatchHeapEntry { dist: 0.0, node: l, is_left: true });
            }
        }

        let mut sink: Option<(usize, f64)> = None;
        while let Some(MatchHeapEntry { dist, node, is_left }) = heap.pop() {
            if is_left {
                if dist > dist_l[node] {
                    continue;
                }
                for &(r, cost, _) in &adj[node] {
                    if match_of_right[r] == Some(node) {
                        continue;
                    }
                    let reduced = cost + pot_left[node] - pot_right[r];
                    let nd = dist + reduced;
                    if nd < dist_r[r] {
                        dist_r[r] = nd;
                        parent_r[r] = Some((node, cost));
                        heap.push(MatchHeapEntry { dist: nd, node: r, is_left: false });
                    }
                }
            } else {
                if dist > dist_r[node] {
                    continue;
                }
                if match_of_right[node].is_none() {
                    sink = Some((node, dist));
                    break;
                }
                let l = match_of_right[node].expect("matched right vertex");
                // residual backward edge: cost -matched_cost
                let (_, matched_cost) = match_of_left[l].expect("consistent matching");
                let reduced = -matched_cost + pot_right[node] - pot_left[l];
                let nd = dist + reduced;
                if nd < dist_l[l] {
                    dist_l[l] = nd;
                    heap.push(MatchHeapEntry { dist: nd, node: l, is_left: true });
                }
            }
        }

        let Some((mut r, sink_dist)) = sink else {
            break; // no augmenting path: matching is maximum
        };

        // potentials move by the distance capped at the sink distance, which
        // keeps every residual reduced cost non-negative
        for l in 0..n_left {
            pot_left[l] += dist_l[l].min(sink_dist);
        }
        for j in 0..n_right {
            pot_right[j] += dist_r[j].min(sink_dist);
        }

        // flip matched/unmatched along the path
        loop {
            let (l, cost) = parent_r[r].expect("augmenting path parent");
            let prev = match_of_left[l].map(|(pr, _)| pr);
            match_of_right[r] = Some(l);
            match_of_left[l] = Some((r, cost));
            match prev {
                Some(pr) => r = pr,
                None => break,
            }
        }
    }

    let mut out: Vec<(usize, usize, f64)> = match_of_left
        .iter()
        .enumerate()
        .filter_map(|(l, m)| m.map(|(r, c)| (l, r, c)))
        .collect();
    out.sort_unstable_by_key(|&(l, r, _)| (l, r));
    out
}

struct MatchHeapEntry {
    dist: f64,
    node: usize,
    is_left: bool,
}

impl PartialEq for MatchHeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.node == other.node && self.is_left == other.is_left
    }
}
impl Eq for MatchHeapEntry {}
impl Ord for MatchHeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .expect("finite distance")
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.is_left.cmp(&self.is_left))
    }
}
impl PartialOrd for MatchHeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Precision and recall between two traversed subgraphs: their vertices are
/// matched one-to-one under the threshold; precision = matched / |pred|,
/// recall = matched / |gt|. Empty-side conventions: an empty prediction
/// scores precision 0 (1 if the ground truth is empty too); an empty ground
/// truth scores recall 1.
pub fn subgraph_pr(pred_sub: &Subgraph, gt_sub: &Subgraph, threshold: f64) -> (f64, f64) {
    let n_pred = pred_sub.vertex_count();
    let n_gt = gt_sub.vertex_count();
    if n_pred == 0 {
        let precision = if n_gt == 0 { 1.0 } else { 0.0 };
        let recall = if n_gt == 0 { 1.0 } else { 0.0 };
        return (precision, recall);
    }
    if n_gt == 0 {
        return (0.0, 1.0);
    }
    let matched = match_vertices(&pred_sub.graph, &gt_sub.graph, threshold).pair_count() as f64;
    (matched / n_pred as f64, matched / n_gt as f64)
}

struct Prepared {
    pred: DirectedLaneGraph,
    gt: DirectedLaneGraph,
    /// Junctions of the interpolated *directed* ground truth; the undirected
    /// variant traverses undirected but junctions stay merge/fork points of
    /// the directed graph.
    gt_junctions: Vec<VertexId>,
}

fn prepare(
    pred: &DirectedLaneGraph,
    gt: &DirectedLaneGraph,
    config: &MetricConfig,
) -> Result<Prepared> {
    config.validate()?;
    let pred_i = pred.interpolate(config.interpolation_spacing)?;
    let gt_i = gt.interpolate(config.interpolation_spacing)?;
    let gt_junctions = gt_i.junctions();
    if config.directed {
        Ok(Prepared {
            pred: pred_i,
            gt: gt_i,
            gt_junctions,
        })
    } else {
        Ok(Prepared {
            pred: pred_i.to_undirected(),
            gt: gt_i.to_undirected(),
            gt_junctions,
        })
    }
}

/// The TOPO metric over the whole graph.
pub fn topo_metric(
    pred: &DirectedLaneGraph,
    gt: &DirectedLaneGraph,
    config: &MetricConfig,
) -> Result<TopoReport> {
    let prepared = prepare(pred, gt, config)?;
    let n_pred = prepared.pred.vertex_count();
    let n_gt = prepared.gt.vertex_count();

    let mut flags = ReportFlags::default();
    if n_pred == 0 || n_gt == 0 {
        flags.empty_graph = true;
        let (precision, recall) = match (n_pred, n_gt) {
            (0, 0) => (1.0, 1.0),
            (0, _) => (0.0, 0.0),
            (_, 0) => (0.0, 1.0),
            _ => unreachable!(),
        };
        return Ok(TopoReport::new(precision, recall, Vec::new(), *config, flags));
    }

    let global = match_vertices(&prepared.pred, &prepared.gt, config.match_threshold);
    let mut per_anchor = Vec::with_capacity(global.pair_count());
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    for &(pv, gv, _) in &global.pairs {
        let pred_sub = prepared.pred.bounded_traverse(pv, config.traverse_dist)?;
        let gt_sub = prepared.gt.bounded_traverse(gv, config.traverse_dist)?;
        let (pre, rec) = subgraph_pr(&pred_sub, &gt_sub, config.match_threshold);
        precision_sum += pre;
        recall_sum += rec;
        per_anchor.push(AnchorScore {
            anchor: gv,
            precision: pre,
            recall: rec,
        });
    }

    let precision = precision_sum / n_pred as f64;
    let recall = recall_sum / n_gt as f64;
    Ok(TopoReport::new(precision, recall, per_anchor, *config, flags))
}

/// The Junction TOPO metric: the same protocol restricted to subgraphs
/// traversed from the ground truth's junction points, averaged unweighted
/// over junctions.
pub fn junction_topo_metric(
    pred: &DirectedLaneGraph,
    gt: &DirectedLaneGraph,
    config: &MetricConfig,
) -> Result<TopoReport> {
    let prepared = prepare(pred, gt, config)?;

    let mut flags = ReportFlags::default();
    if prepared.gt_junctions.is_empty() {
        flags.degenerate_no_junctions = true;
        return Ok(TopoReport::new(1.0, 1.0, Vec::new(), *config, flags));
    }
    if prepared.pred.is_empty() {
        flags.empty_graph = true;
    }

    let global = match_vertices(&prepared.pred, &prepared.gt, config.match_threshold);
    let partner = global.gt_partner_of();

    let mut per_anchor = Vec::with_capacity(prepared.gt_junctions.len());
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    for &junction in &prepared.gt_junctions {
        let gt_sub = prepared.gt.bounded_traverse(junction, config.traverse_dist)?;
        let anchor = partner
            .get(&junction)
            .copied()
            .or_else(|| nearest_within(&prepared.pred, &prepared.gt, junction, config.match_threshold));
        let pred_sub = match anchor {
            Some(a) => prepared.pred.bounded_traverse(a, config.traverse_dist)?,
            None => Subgraph::empty(),
        };
        let (pre, rec) = subgraph_pr(&pred_sub, &gt_sub, config.match_threshold);
        precision_sum += pre;
        recall_sum += rec;
        per_anchor.push(AnchorScore {
            anchor: junction,
            precision: pre,
            recall: rec,
        });
    }

    let count = prepared.gt_junctions.len() as f64;
    Ok(TopoReport::new(
        precision_sum / count,
        recall_sum / count,
        per_anchor,
        *config,
        flags,
    ))
}

/// Nearest predicted vertex strictly within the threshold of the given
/// ground-truth vertex; ties break to the smaller id.
fn nearest_within(
    pred: &DirectedLaneGraph,
    gt: &DirectedLaneGraph,
    gt_vertex: VertexId,
    threshold: f64,
) -> Option<VertexId> {
    let target = gt.position(gt_vertex)?;
    let mut best: Option<(f64, VertexId)> = None;
    for (id, p) in pred.vertices() {
        let d = p.distance(&target);
        if strictly_less(d, threshold) {
            let better = match best {
                None => true,
                Some((bd, bid)) => d < bd || (d == bd && *id < bid),
            };
            if better {
                best = Some((d, *id));
            }
        }
    }
    best.map(|(_, id)| id)
}

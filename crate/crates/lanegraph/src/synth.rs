//! Deterministic synthetic lane-graph generator and perturbation model.
//!
//! The generator grows a DAG layer by layer in the driving (+y) direction:
//! each active lane advances one vertex per layer with lateral jitter, forks
//! split a lane into two, merges join two adjacent lanes into one. All edges
//! point in +y, so the output is acyclic by construction, and every draw
//! comes from one seeded [`SplitMix64`] stream, so a seed reproduces the
//! graph bit for bit.

use crate::error::{Error, Result};
use crate::geom::{Bounds, Point};
use crate::graph::{DirectedLaneGraph, GraphBuilder, VertexId};
use crate::graph2path::PathSet;
use crate::path::Polyline;
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub seed: u64,
    pub bounds: Bounds,
    pub num_roots: usize,
    pub max_depth: usize,
    pub fork_prob: f64,
    pub merge_prob: f64,
    pub min_edge_len: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            bounds: Bounds::perception_default(),
            num_roots: 2,
            max_depth: 5,
            fork_prob: 0.25,
            merge_prob: 0.25,
            min_edge_len: 2.0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_roots == 0 {
            return Err(Error::invalid_argument("num_roots must be >= 1"));
        }
        if self.max_depth == 0 {
            return Err(Error::invalid_argument("max_depth must be >= 1"));
        }
        if self.bounds.is_degenerate() {
            return Err(Error::invalid_argument("bounds are degenerate"));
        }
        for (name, p) in [("fork_prob", self.fork_prob), ("merge_prob", self.merge_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid_argument(format!(
                    "{name} must be in [0, 1], got {p}"
                )));
            }
        }
        if !(self.min_edge_len > 0.0) {
            return Err(Error::invalid_argument(format!(
                "min_edge_len must be > 0, got {}",
                self.min_edge_len
            )));
        }
        if self.min_edge_len >= self.bounds.height() {
            return Err(Error::invalid_argument(
                "min_edge_len does not fit inside the bounds",
            ));
        }
        Ok(())
    }
}

const MAX_LANES: usize = 6;
const MIN_LANE_GAP: f64 = 0.8;

/// Generates a valid acyclic lane graph inside the configured bounds.
/// Identical configs (seed included) produce bit-identical graphs.
pub fn generate_graph(config: &SynthConfig) -> Result<DirectedLaneGraph> {
    config.validate()?;
    let mut rng = SplitMix64::new(config.seed);
    let b = config.bounds;
    let margin = 0.05 * b.width().min(b.height());
    let lo_x = b.min_x + margin;
    let hi_x = b.max_x - margin;

    let mut builder = GraphBuilder::new();

    // roots spread laterally across the lower edge
    let usable = hi_x - lo_x;
    let mut y = b.min_y + margin;
    let mut pending: Vec<(Vec<VertexId>, f64)> = (0..config.num_roots)
        .map(|i| {
            let frac = (i as f64 + 0.5) / config.num_roots as f64;
            let x = lo_x
                + usable * frac
                + rng.uniform(-0.2, 0.2) * usable / config.num_roots as f64;
            (Vec::new(), x)
        })
        .collect();
    let mut lanes: Vec<(VertexId, f64)> =
        place_layer(&mut builder, &mut pending, y, lo_x, hi_x, &mut rng);

    for _ in 0..config.max_depth {
        let dy = rng.uniform(config.min_edge_len, config.min_edge_len * 1.75);
        if y + dy > b.max_y - margin {
            break;
        }
        y += dy;

        // plan the next layer: (parent vertices, desired x)
        let mut plan: Vec<(Vec<VertexId>, f64)> = Vec::with_capacity(lanes.len() + 1);
        let mut skip = false;
        for i in 0..lanes.len() {
            if skip {
                skip = false;
                continue;
            }
            let (vertex, x) = lanes[i];
            let fork = rng.chance(config.fork_prob);
            let merge = rng.chance(config.merge_prob);
            let projected = plan.len() + (lanes.len() - i);
            if merge && i + 1 < lanes.len() {
                // adjacent pair joins into one vertex between them
                let (other, ox) = lanes[i + 1];
                let mx = (x + ox) / 2.0 + rng.uniform(-0.1, 0.1);
                plan.push((vec![vertex, other], mx));
                skip = true;
            } else if fork && projected < MAX_LANES {
                let spread = rng.uniform(MIN_LANE_GAP, 1.8);
                for side in [-1.0, 1.0] {
                    let nx = x + side * spread / 2.0 + rng.uniform(-0.1, 0.1);
                    plan.push((vec![vertex], nx));
                }
            } else {
                plan.push((vec![vertex], x + rng.uniform(-0.5, 0.5)));
            }
        }
        lanes = place_layer(&mut builder, &mut plan, y, lo_x, hi_x, &mut rng);
        if lanes.is_empty() {
            break;
        }
    }

    let graph = builder.build();
    debug_assert!(graph.validate().is_valid);
    Ok(graph)
}

/// Materializes one planned layer at height `y`: sorts by desired x, pushes
/// positions apart to at least `MIN_LANE_GAP` inside [lo, hi], then adds the
/// vertices and their incoming edges. Separating before adding keeps every
/// vertex position distinct even when lanes were clamped together. The gap
/// is jittered: exactly regular spacing would let crossing edges subdivide
/// through bit-identical points, which collapses under exact merging.
fn place_layer(
    builder: &mut GraphBuilder,
    plan: &mut [(Vec<VertexId>, f64)],
    y: f64,
    lo: f64,
    hi: f64,
    rng: &mut SplitMix64,
) -> Vec<(VertexId, f64)> {
    plan.sort_by(|a, b| a.1.total_cmp(&b.1));
    let n = plan.len();
    let mut xs: Vec<f64> = plan.iter().map(|(_, x)| x.clamp(lo, hi)).collect();
    for i in 1..n {
        if xs[i] - xs[i - 1] < MIN_LANE_GAP {
            xs[i] = xs[i - 1] + MIN_LANE_GAP + rng.uniform(0.0, 0.05);
        }
    }
    // slide the block back inside the bounds if the gap enforcement
    // overshot; a uniform shift preserves all gaps
    if n > 0 && xs[n - 1] > hi {
        let shift = xs[n - 1] - hi;
        for x in xs.iter_mut() {
            *x -= shift;
        }
    }
    // bounds win over lane separation when the box is too narrow to hold
    // every lane
    for x in xs.iter_mut() {
        *x = x.clamp(lo, hi);
    }
    plan.iter()
        .zip(&xs)
        .map(|((parents, _), &x)| {
            let id = builder.add_vertex(Point::new(x, y));
            for &parent in parents {
                builder.add_edge(parent, id);
            }
            (id, x)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerturbConfig {
    pub seed: u64,
    /// Per-point Gaussian jitter, meters.
    pub noise_sigma: f64,
    pub drop_path_prob: f64,
    pub truncate_prob: f64,
    pub spurious_path_prob: f64,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        PerturbConfig {
            seed: 0,
            noise_sigma: 0.0,
            drop_path_prob: 0.0,
            truncate_prob: 0.0,
            spurious_path_prob: 0.0,
        }
    }
}

impl PerturbConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::invalid_argument(format!(
                "noise_sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        for (name, p) in [
            ("drop_path_prob", self.drop_path_prob),
            ("truncate_prob", self.truncate_prob),
            ("spurious_path_prob", self.spurious_path_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid_argument(format!(
                    "{name} must be in [0, 1], got {p}"
                )));
            }
        }
        Ok(())
    }

    fn is_identity(&self) -> bool {
        self.noise_sigma == 0.0
            && self.drop_path_prob == 0.0
            && self.truncate_prob == 0.0
            && self.spurious_path_prob == 0.0
    }
}

/// Turns a ground-truth path set into a "predicted" one: whole-path drops,
/// endpoint truncation, per-point Gaussian jitter, and spurious extra paths,
/// all driven by the seeded stream. The identity config returns the input
/// unchanged bit for bit.
pub fn perturb_paths(paths: &PathSet, config: &PerturbConfig) -> Result<PathSet> {
    config.validate()?;
    if config.is_identity() {
        return Ok(paths.clone());
    }
    let mut rng = SplitMix64::new(config.seed);

    // bounding box of the inputs hosts any spurious paths
    let mut bbox: Option<Bounds> = None;
    for path in &paths.paths {
        for p in path.points() {
            match &mut bbox {
                None => {
                    bbox = Some(Bounds::new(p.x, p.y, p.x, p.y));
                }
                Some(b) => b.expand_to(p),
            }
        }
    }
    let bbox = bbox.unwrap_or(Bounds::perception_default());

    let mut out: Vec<Polyline> = Vec::with_capacity(paths.paths.len());
    for path in &paths.paths {
        if rng.chance(config.drop_path_prob) {
            continue;
        }
        let mut current = path.clone();
        if rng.chance(config.truncate_prob) {
            let keep = rng.uniform(0.5, 0.9);
            let total = current.length();
            let from_start = rng.chance(0.5);
            let sliced = if from_start {
                current.slice_by_arc_length(total * (1.0 - keep), total)
            } else {
                current.slice_by_arc_length(0.0, total * keep)
            };
            if let Ok(s) = sliced {
                current = s;
            }
        }
        if config.noise_sigma > 0.0 {
            let jittered: Vec<Point> = current
                .points()
                .iter()
                .map(|p| {
                    Point::new(
                        p.x + config.noise_sigma * rng.normal(),
                        p.y + config.noise_sigma * rng.normal(),
                    )
                })
                .collect();
            if let Ok(j) = Polyline::dedup_from(jittered) {
                current = j;
            }
        }
        out.push(current);
    }
    let spurious_draws = paths.paths.len();
    for _ in 0..spurious_draws {
        if rng.chance(config.spurious_path_prob) {
            out.push(random_path(&mut rng, &bbox)?);
        }
    }

    Ok(PathSet {
        paths: out,
        source_graph_digest: paths.source_graph_digest.clone(),
        truncated: paths.truncated,
    })
}

fn random_path(rng: &mut SplitMix64, bbox: &Bounds) -> Result<Polyline> {
    let n = 3 + rng.next_below(3) as usize;
    let mut x = rng.uniform(bbox.min_x, bbox.max_x);
    let mut y = rng.uniform(bbox.min_y, bbox.max_y);
    let heading = rng.uniform(0.0, std::f64::consts::TAU);
    let mut pts = Vec::with_capacity(n);
    pts.push(Point::new(x, y));
    for _ in 1..n {
        let step = rng.uniform(0.8, 2.0);
        let wobble = rng.uniform(-0.4, 0.4);
        x += step * (heading + wobble).cos();
        y += step * (heading + wobble).sin();
        pts.push(Point::new(x, y));
    }
    Polyline::new(pts)
}

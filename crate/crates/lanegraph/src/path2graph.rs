//! Reconstruction of a directed lane graph from a set of paths.
//!
//! Each path is discretized into a vertex sequence (per-segment ceil rule,
//! matching the graph interpolation arithmetic, so a decompose-reconstruct
//! roundtrip reproduces bit-identical coordinates), consecutive vertices
//! become directed edges, and overlapping vertices of different paths are
//! merged into one.

use crate::error::{Error, Result};
use crate::geom::{segment_count, subdivide, Point};
use crate::graph::{DirectedLaneGraph, GraphBuilder, VertexId};
use crate::graph2path::PathSet;
use crate::path::Polyline;
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeConfig {
    /// Arc-length discretization step in meters.
    pub discretize_step: f64,
    /// Merge radius in meters. 0 means exact coordinate coincidence after
    /// quantization; positive values merge transitively-near clusters via
    /// union-find, placing the merged vertex at the cluster centroid.
    pub merge_radius: f64,
    /// Coordinate quantization grid for exact-mode merging.
    pub quantum: f64,
}

impl Default for MergeConfig {
    fn default() -> Self {
        MergeConfig {
            discretize_step: 0.15,
            merge_radius: 0.0,
            quantum: 1e-6,
        }
    }
}

impl MergeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.discretize_step > 0.0) {
            return Err(Error::invalid_argument(format!(
                "discretize_step must be > 0, got {}",
                self.discretize_step
            )));
        }
        if !(self.merge_radius >= 0.0) {
            return Err(Error::invalid_argument(format!(
                "merge_radius must be >= 0, got {}",
                self.merge_radius
            )));
        }
        if !(self.quantum > 0.0) {
            return Err(Error::invalid_argument(format!(
                "quantum must be > 0, got {}",
                self.quantum
            )));
        }
        Ok(())
    }
}

/// Discretizes a path into a vertex sequence: every polyline segment is split
/// into `ceil(len/step)` equal parts, so original path vertices are always
/// kept and the spacing never exceeds `step`.
pub fn discretize_path(path: &Polyline, step: f64) -> Result<Vec<Point>> {
    if !(step > 0.0) {
        return Err(Error::invalid_argument(format!(
            "discretize step must be > 0, got {step}"
        )));
    }
    let mut out = vec![path.first()];
    for pair in path.points().windows(2) {
        let parts = segment_count(pair[0].distance(&pair[1]), step);
        out.extend(subdivide(&pair[0], &pair[1], parts));
    }
    Ok(out)
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, id: usize) -> usize {
        let mut root = id;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = id;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            self.parent[ra] = rb;
            self.size[rb] += self.size[ra];
        } else {
            self.parent[rb] = ra;
            self.size[ra] += self.size[rb];
        }
    }
}

/// Collapses overlapping vertices of a graph into one vertex each.
///
/// With `radius == 0`, vertices coincide when their coordinates quantized to
/// the `quantum` grid are equal. With `radius > 0`, vertices within `radius`
/// of each other are unioned transitively via a spatial hash, and each
/// cluster collapses to its centroid (summed in sorted coordinate order, so
/// the placement is independent of input order). Duplicate edges are
/// deduplicated and self-loops produced by merging are dropped.
pub fn merge_vertices_by_overlap(
    graph: &DirectedLaneGraph,
    radius: f64,
    quantum: f64,
) -> Result<DirectedLaneGraph> {
    if !(radius >= 0.0) {
        return Err(Error::invalid_argument(format!(
            "merge radius must be >= 0, got {radius}"
        )));
    }
    if !(quantum > 0.0) {
        return Err(Error::invalid_argument(format!(
            "quantum must be > 0, got {quantum}"
        )));
    }

    let verts = graph.vertices();
    let n = verts.len();
    let mut uf = UnionFind::new(n);

    if radius == 0.0 {
        let mut cells: HashMap<(i64, i64), usize> = HashMap::new();
        for (slot, (_, p)) in verts.iter().enumerate() {
            let key = quantize(p, quantum);
            if let Some(&rep) = cells.get(&key) {
                uf.union(rep, slot);
            } else {
                cells.insert(key, slot);
            }
        }
    } else {
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (slot, (_, p)) in verts.iter().enumerate() {
            let key = quantize(p, radius);
            cells.entry(key).or_default().push(slot);
        }
        for (slot, (_, p)) in verts.iter().enumerate() {
            let (cx, cy) = quantize(p, radius);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(others) = cells.get(&(cx + dx, cy + dy)) {
                        for &other in others {
                            if other > slot && p.distance(&verts[other].1) <= radius {
                                uf.union(slot, other);
                            }
                        }
                    }
                }
            }
        }
    }

    // gather clusters in first-appearance order
    let cluster_of: Vec<usize> = (0..n).map(|slot| uf.find(slot)).collect();
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for (slot, &root) in cluster_of.iter().enumerate() {
        members.entry(root).or_default().push(slot);
    }

    let mut builder = GraphBuilder::new();
    let mut new_of_root: HashMap<usize, VertexId> = HashMap::new();
    for (slot, (_, p)) in verts.iter().enumerate() {
        let root = cluster_of[slot];
        if new_of_root.contains_key(&root) {
            continue;
        }
        let cluster = &members[&root];
        let pos = if cluster.len() == 1 {
            *p
        } else {
            centroid(cluster.iter().map(|&s| verts[s].1))
        };
        new_of_root.insert(root, builder.add_vertex(pos));
    }

    let mut edge_seen: HashSet<(VertexId, VertexId)> = HashSet::new();
    // resolve ids through the slot index of the input graph
    let slot_of_id: HashMap<VertexId, usize> = verts
        .iter()
        .enumerate()
        .map(|(slot, (id, _))| (*id, slot))
        .collect();
    for (from, to) in graph.edges() {
        let (Some(&fs), Some(&ts)) = (slot_of_id.get(from), slot_of_id.get(to)) else {
            continue;
        };
        let nf = new_of_root[&cluster_of[fs]];
        let nt = new_of_root[&cluster_of[ts]];
        if nf == nt {
            continue; // self-loop from merging; carries no topology
        }
        if edge_seen.insert((nf, nt)) {
            builder.add_edge(nf, nt);
        }
    }
    Ok(builder.build())
}

fn quantize(p: &Point, grid: f64) -> (i64, i64) {
    ((p.x / grid).round() as i64, (p.y / grid).round() as i64)
}

fn centroid(points: impl Iterator<Item = Point>) -> Point {
    let mut pts: Vec<Point> = points.collect();
    pts.sort_unstable_by(|a, b| {
        a.x.total_cmp(&b.x).then_with(|| a.y.total_cmp(&b.y))
    });
    let n = pts.len() as f64;
    let (sx, sy) = pts
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point::new(sx / n, sy / n)
}

/// Rebuilds a directed lane graph from a path set: discretize each path,
/// chain the discretized vertices with directed edges, then merge
/// overlapping vertices.
pub fn paths_to_graph(paths: &PathSet, config: &MergeConfig) -> Result<DirectedLaneGraph> {
    config.validate()?;
    if paths.paths.is_empty() {
        return Err(Error::invalid_argument(
            "cannot reconstruct a graph from an empty path set",
        ));
    }
    let mut builder = GraphBuilder::new();
    for path in &paths.paths {
        let sequence = discretize_path(path, config.discretize_step)?;
        let mut prev: Option<VertexId> = None;
        for point in sequence {
            let id = builder.add_vertex(point);
            if let Some(prev) = prev {
                builder.add_edge(prev, id);
            }
            prev = Some(id);
        }
    }
    merge_vertices_by_overlap(&builder.build(), config.merge_radius, config.quantum)
}

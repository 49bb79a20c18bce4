//! Directed lane-graph data model and the geometric graph primitives.
//!
//! A [`DirectedLaneGraph`] stores vertices (opaque integer ids plus 2D
//! positions in meters) and directed edges. Values are immutable after
//! construction; every operation is a pure function returning a new graph,
//! so shared graphs are safe to use concurrently.

use crate::error::{Error, Result};
use crate::geom::{segment_count, strictly_less, subdivide, Point};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueKind {
    DuplicateVertexId,
    DanglingEdge,
    SelfLoop,
    DuplicateEdge,
    DirectedCycle,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Issue {
    pub kind: IssueKind,
    pub ids: Vec<VertexId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub is_valid: bool,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn new(issues: Vec<Issue>) -> Self {
        ValidationReport {
            is_valid: issues.is_empty(),
            issues,
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self
            .issues
            .iter()
            .map(|issue| {
                let ids: Vec<String> = issue.ids.iter().map(|v| v.to_string()).collect();
                format!("{:?}[{}]", issue.kind, ids.join(","))
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A directed lane graph: vertices with 2D positions plus directed edges.
///
/// The container never rejects input; [`DirectedLaneGraph::validate`] reports
/// problems and operations that require a well-formed acyclic graph return an
/// error when given one that is not.
#[derive(Debug, Clone)]
pub struct DirectedLaneGraph {
    vertices: Vec<(VertexId, Point)>,
    edges: Vec<(VertexId, VertexId)>,
    index: HashMap<VertexId, usize>,
    // adjacency over vertex slots, built from edges with both endpoints known;
    // neighbor lists sorted by vertex id for deterministic traversal order
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

/// Incremental constructor that assigns sequential vertex ids.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    vertices: Vec<(VertexId, Point)>,
    edges: Vec<(VertexId, VertexId)>,
    next_id: u32,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, position: Point) -> VertexId {
        let id = VertexId(self.next_id);
        self.next_id += 1;
        self.vertices.push((id, position));
        id
    }

    pub fn add_edge(&mut self, from: VertexId, to: VertexId) {
        self.edges.push((from, to));
    }

    pub fn build(self) -> DirectedLaneGraph {
        DirectedLaneGraph::new(self.vertices, self.edges)
    }
}

/// A graph slice produced by [`DirectedLaneGraph::bounded_traverse`], plus the
/// anchor it was traversed from. `anchor` is `None` only for the empty
/// subgraph used when no anchor exists on the predicted side.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: DirectedLaneGraph,
    pub anchor: Option<VertexId>,
}

impl Subgraph {
    pub fn empty() -> Self {
        Subgraph {
            graph: DirectedLaneGraph::new(Vec::new(), Vec::new()),
            anchor: None,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }
}

impl DirectedLaneGraph {
    pub fn new(vertices: Vec<(VertexId, Point)>, edges: Vec<(VertexId, VertexId)>) -> Self {
        let mut index = HashMap::with_capacity(vertices.len());
        for (slot, (id, _)) in vertices.iter().enumerate() {
            index.entry(*id).or_insert(slot);
        }
        let mut out_adj = vec![Vec::new(); vertices.len()];
        let mut in_adj = vec![Vec::new(); vertices.len()];
        for (from, to) in &edges {
            if let (Some(&f), Some(&t)) = (index.get(from), index.get(to)) {
                out_adj[f].push(t);
                in_adj[t].push(f);
            }
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable_by_key(|&slot| vertices[slot].0);
        }
        DirectedLaneGraph {
            vertices,
            edges,
            index,
            out_adj,
            in_adj,
        }
    }

    /// Build from bare positions and (from, to) index pairs, assigning ids
    /// 0..n in order. Convenient for fixtures.
    pub fn from_positions(points: &[Point], edges: &[(u32, u32)]) -> Self {
        let vertices = points
            .iter()
            .enumerate()
            .map(|(i, p)| (VertexId(i as u32), *p))
            .collect();
        let edges = edges
            .iter()
            .map(|&(a, b)| (VertexId(a), VertexId(b)))
            .collect();
        DirectedLaneGraph::new(vertices, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[(VertexId, Point)] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn contains(&self, id: VertexId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn position(&self, id: VertexId) -> Option<Point> {
        self.index.get(&id).map(|&slot| self.vertices[slot].1)
    }

    fn slot(&self, id: VertexId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn out_degree(&self, id: VertexId) -> usize {
        self.slot(id).map_or(0, |s| self.out_adj[s].len())
    }

    pub fn in_degree(&self, id: VertexId) -> usize {
        self.slot(id).map_or(0, |s| self.in_adj[s].len())
    }

    /// Outgoing neighbor ids in ascending id order.
    pub fn out_neighbors(&self, id: VertexId) -> Vec<VertexId> {
        self.slot(id).map_or_else(Vec::new, |s| {
            self.out_adj[s].iter().map(|&t| self.vertices[t].0).collect()
        })
    }

    /// Checks structural well-formedness: unique ids, resolvable edge
    /// endpoints, no self-loops, no duplicate edges, no directed cycles.
    /// Problems are reported, never thrown.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();

        let mut seen: HashMap<VertexId, usize> = HashMap::new();
        for (id, _) in &self.vertices {
            *seen.entry(*id).or_insert(0) += 1;
        }
        let mut dup_ids: Vec<VertexId> =
            seen.iter().filter(|(_, &n)| n > 1).map(|(&id, _)| id).collect();
        dup_ids.sort_unstable();
        for id in dup_ids {
            issues.push(Issue {
                kind: IssueKind::DuplicateVertexId,
                ids: vec![id],
            });
        }

        let mut edge_seen: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        for &(from, to) in &self.edges {
            if !self.index.contains_key(&from) || !self.index.contains_key(&to) {
                issues.push(Issue {
                    kind: IssueKind::DanglingEdge,
                    ids: vec![from, to],
                });
                continue;
            }
            if from == to {
                issues.push(Issue {
                    kind: IssueKind::SelfLoop,
                    ids: vec![from],
                });
                continue;
            }
            if !edge_seen.insert((from, to)) {
                issues.push(Issue {
                    kind: IssueKind::DuplicateEdge,
                    ids: vec![from, to],
                });
            }
        }

        let cyclic = self.vertices_on_cycles();
        if !cyclic.is_empty() {
            issues.push(Issue {
                kind: IssueKind::DirectedCycle,
                ids: cyclic,
            });
        }

        ValidationReport::new(issues)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid {
            Ok(())
        } else {
            Err(Error::InvalidGraph(report))
        }
    }

    /// Vertices belonging to a strongly connected component of size >= 2
    /// (iterative Tarjan), i.e. the vertices on directed cycles. Self-loops
    /// are reported separately by `validate`.
    fn vertices_on_cycles(&self) -> Vec<VertexId> {
        let n = self.vertices.len();
        let mut index_of = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut next_index = 0usize;
        let mut result: Vec<VertexId> = Vec::new();

        // explicit DFS stack: (vertex, next child position)
        let mut call: Vec<(usize, usize)> = Vec::new();
        for start in 0..n {
            if index_of[start] != usize::MAX {
                continue;
            }
            call.push((start, 0));
            index_of[start] = next_index;
            low[start] = next_index;
            next_index += 1;
            stack.push(start);
            on_stack[start] = true;

            while let Some(&mut (v, ref mut child)) = call.last_mut() {
                if *child < self.out_adj[v].len() {
                    let w = self.out_adj[v][*child];
                    *child += 1;
                    if index_of[w] == usize::MAX {
                        index_of[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index_of[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index_of[v] {
                        let mut component = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            component.push(w);
                            if w == v {
                                break;
                            }
                        }
                        if component.len() >= 2 {
                            result.extend(component.iter().map(|&s| self.vertices[s].0));
                        }
                    }
                }
            }
        }
        result.sort_unstable();
        result
    }

    /// Splits every edge longer than `spacing` into `ceil(len/spacing)`
    /// equal collinear parts by inserting new vertices. The result gets fresh
    /// sequential ids (originals first, then inserted points in edge order).
    pub fn interpolate(&self, spacing: f64) -> Result<DirectedLaneGraph> {
        if !(spacing > 0.0) {
            return Err(Error::invalid_argument(format!(
                "interpolation spacing must be > 0, got {spacing}"
            )));
        }
        self.ensure_valid()?;

        let mut builder = GraphBuilder::new();
        let mut new_id: HashMap<VertexId, VertexId> = HashMap::with_capacity(self.vertices.len());
        for (id, p) in &self.vertices {
            new_id.insert(*id, builder.add_vertex(*p));
        }
        for &(from, to) in &self.edges {
            let a = self.position(from).expect("validated edge endpoint");
            let b = self.position(to).expect("validated edge endpoint");
            let parts = segment_count(a.distance(&b), spacing);
            let mut prev = new_id[&from];
            let chain = subdivide(&a, &b, parts);
            for (i, p) in chain.iter().enumerate() {
                let next = if i + 1 == chain.len() {
                    new_id[&to]
                } else {
                    builder.add_vertex(*p)
                };
                builder.add_edge(prev, next);
                prev = next;
            }
        }
        Ok(builder.build())
    }

    /// Vertices with in-degree >= 2 (merge points) or out-degree >= 2 (fork
    /// points), ascending by id.
    pub fn junctions(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(slot, _)| self.in_adj[*slot].len() >= 2 || self.out_adj[*slot].len() >= 2)
            .map(|(_, (id, _))| *id)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Symmetric closure of the edge relation: for every edge (u, v) the
    /// result holds both (u, v) and (v, u). The vertex set is unchanged.
    ///
    /// The result intentionally contains two-vertex cycles, so it fails
    /// `validate`; it exists for undirected traversal inside the metrics and
    /// is not a valid input to the DAG-only operations.
    pub fn to_undirected(&self) -> DirectedLaneGraph {
        let mut set: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        for &(from, to) in &self.edges {
            set.insert((from, to));
            set.insert((to, from));
        }
        DirectedLaneGraph::new(self.vertices.clone(), set.into_iter().collect())
    }

    /// Dijkstra from `anchor` along outgoing edges with Euclidean edge
    /// lengths. A vertex is kept iff its shortest along-graph distance is
    /// strictly below `max_dist` (under the crate's strict-comparison band);
    /// the anchor is always kept. Edges induced on the kept set are included.
    pub fn bounded_traverse(&self, anchor: VertexId, max_dist: f64) -> Result<Subgraph> {
        if !(max_dist > 0.0) {
            return Err(Error::invalid_argument(format!(
                "traversal bound must be > 0, got {max_dist}"
            )));
        }
        let anchor_slot = self
            .slot(anchor)
            .ok_or(Error::VertexNotFound(anchor.0))?;

        let n = self.vertices.len();
        let mut dist = vec![f64::INFINITY; n];
        dist[anchor_slot] = 0.0;
        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
        heap.push(HeapEntry {
            dist: 0.0,
            slot: anchor_slot,
        });
        while let Some(HeapEntry { dist: d, slot }) = heap.pop() {
            if d > dist[slot] {
                continue;
            }
            let here = self.vertices[slot].1;
            for &next in &self.out_adj[slot] {
                let nd = d + here.distance(&self.vertices[next].1);
                if nd < dist[next] && strictly_less(nd, max_dist) {
                    dist[next] = nd;
                    heap.push(HeapEntry {
                        dist: nd,
                        slot: next,
                    });
                }
            }
        }

        let mut keep = vec![false; n];
        for slot in 0..n {
            keep[slot] = slot == anchor_slot || strictly_less(dist[slot], max_dist);
        }
        let vertices: Vec<(VertexId, Point)> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(slot, _)| keep[*slot])
            .map(|(_, v)| *v)
            .collect();
        let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
        for slot in 0..n {
            if !keep[slot] {
                continue;
            }
            for &next in &self.out_adj[slot] {
                if keep[next] {
                    edges.push((self.vertices[slot].0, self.vertices[next].0));
                }
            }
        }
        Ok(Subgraph {
            graph: DirectedLaneGraph::new(vertices, edges),
            anchor: Some(anchor),
        })
    }

    /// Content hash over the sorted vertex/edge structure (SHA-256, hex).
    pub fn digest(&self) -> String {
        let mut vs: Vec<(VertexId, Point)> = self.vertices.clone();
        vs.sort_unstable_by_key(|(id, _)| *id);
        let mut es: Vec<(VertexId, VertexId)> = self.edges.clone();
        es.sort_unstable();
        let mut hasher = Sha256::new();
        for (id, p) in &vs {
            hasher.update(id.0.to_le_bytes());
            hasher.update(p.x.to_le_bytes());
            hasher.update(p.y.to_le_bytes());
        }
        hasher.update([0xFFu8]);
        for (a, b) in &es {
            hasher.update(a.0.to_le_bytes());
            hasher.update(b.0.to_le_bytes());
        }
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Canonical (positions, edges) form under coordinate quantization:
    /// vertices sorted by quantized position and relabeled by rank, edges
    /// sorted. Two graphs with equal canonical forms are isomorphic as
    /// geometric graphs (assuming distinct quantized positions).
    pub fn canonical_form(&self, quantum: f64) -> CanonicalForm {
        let q = |v: f64| (v / quantum).round() as i64;
        let mut keyed: Vec<(i64, i64, VertexId)> = self
            .vertices
            .iter()
            .map(|(id, p)| (q(p.x), q(p.y), *id))
            .collect();
        keyed.sort_unstable();
        let mut rank: HashMap<VertexId, usize> = HashMap::with_capacity(keyed.len());
        for (r, (_, _, id)) in keyed.iter().enumerate() {
            rank.insert(*id, r);
        }
        let positions = keyed.iter().map(|(x, y, _)| (*x, *y)).collect();
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter_map(|(a, b)| Some((*rank.get(a)?, *rank.get(b)?)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        (positions, edges)
    }
}

/// Quantized vertex positions plus rank-relabeled sorted edges.
pub type CanonicalForm = (Vec<(i64, i64)>, Vec<(usize, usize)>);

/// Geometric-graph isomorphism via canonical forms at the given quantum.
pub fn geometry_isomorphic(a: &DirectedLaneGraph, b: &DirectedLaneGraph, quantum: f64) -> bool {
    a.canonical_form(quantum) == b.canonical_form(quantum)
}

struct HeapEntry {
    dist: f64,
    slot: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.slot == other.slot
    }
}
impl Eq for HeapEntry {}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // min-heap over (dist, slot); dist is always finite here
        other
            .dist
            .partial_cmp(&self.dist)
            .expect("finite distance")
            .then_with(|| other.slot.cmp(&self.slot))
    }
}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

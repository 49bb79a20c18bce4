//! Decomposition of a directed lane graph into continuous root-to-leaf paths.
//!
//! Roots are vertices with in-degree 0, leaves have out-degree 0. For every
//! (root, leaf) pair a depth-first search enumerates all simple directed
//! paths in lexicographic successor order; their union is the path set. A
//! per-pair cap guards against combinatorial blow-up; hitting it marks the
//! result truncated so downstream metrics can warn.

use crate::error::{Error, Result};
use crate::graph::{DirectedLaneGraph, VertexId};
use crate::path::Polyline;

/// Default per-(root, leaf) cap on enumerated simple paths.
pub const DEFAULT_PATH_CAP: usize = 256;

/// The decomposed path set of a graph.
#[derive(Debug, Clone)]
pub struct PathSet {
    pub paths: Vec<Polyline>,
    /// Content hash of the graph the paths came from.
    pub source_graph_digest: String,
    /// True when some (root, leaf) pair hit the enumeration cap, i.e. the
    /// set does not cover every path of the graph.
    pub truncated: bool,
}

impl PathSet {
    pub fn path_count(&self) -> usize {
        self.paths.len()
    }
}

/// Root vertices (in-degree 0) and leaf vertices (out-degree 0) in container
/// order. An isolated vertex appears in both lists.
pub fn roots_and_leaves(graph: &DirectedLaneGraph) -> (Vec<VertexId>, Vec<VertexId>) {
    let mut roots = Vec::new();
    let mut leaves = Vec::new();
    for (id, _) in graph.vertices() {
        if graph.in_degree(*id) == 0 {
            roots.push(*id);
        }
        if graph.out_degree(*id) == 0 {
            leaves.push(*id);
        }
    }
    (roots, leaves)
}

/// All simple directed paths from `root` to `leaf`, depth-first in
/// lexicographic order of successor ids, truncated at `cap`. Empty when no
/// path exists.
pub fn find_paths(
    graph: &DirectedLaneGraph,
    root: VertexId,
    leaf: VertexId,
    cap: usize,
) -> Result<Vec<Vec<VertexId>>> {
    if cap < 1 {
        return Err(Error::invalid_argument("path cap must be >= 1"));
    }
    if !graph.contains(root) {
        return Err(Error::VertexNotFound(root.0));
    }
    if !graph.contains(leaf) {
        return Err(Error::VertexNotFound(leaf.0));
    }

    let mut found: Vec<Vec<VertexId>> = Vec::new();
    // stack of (vertex, next successor index); successors are pre-sorted by id
    let mut stack: Vec<(VertexId, usize)> = vec![(root, 0)];
    let mut trail: Vec<VertexId> = vec![root];

    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if found.len() >= cap {
            break;
        }
        if v == leaf {
            found.push(trail.clone());
            stack.pop();
            trail.pop();
            continue;
        }
        let successors = graph.out_neighbors(v);
        if *next < successors.len() {
            let w = successors[*next];
            *next += 1;
            if !trail.contains(&w) {
                trail.push(w);
                stack.push((w, 0));
            }
        } else {
            stack.pop();
            trail.pop();
        }
    }
    Ok(found)
}

/// Decomposes the graph into its path set: the union of `find_paths` over
/// every (root, leaf) pair, realized as position polylines.
pub fn graph_to_paths(graph: &DirectedLaneGraph, cap: usize) -> Result<PathSet> {
    graph.ensure_valid()?;
    if graph.is_empty() {
        return Err(Error::invalid_argument(
            "cannot decompose an empty graph",
        ));
    }

    let (roots, leaves) = roots_and_leaves(graph);
    let mut paths: Vec<Polyline> = Vec::new();
    let mut truncated = false;
    for &root in &roots {
        for &leaf in &leaves {
            if root == leaf {
                continue; // isolated vertex; no two-point path exists
            }
            // probe one past the cap to detect truncation
            let mut sequences = find_paths(graph, root, leaf, cap + 1)?;
            if sequences.len() > cap {
                sequences.truncate(cap);
                truncated = true;
            }
            for seq in sequences {
                let pts = seq
                    .iter()
                    .map(|id| graph.position(*id).expect("path vertex exists"))
                    .collect();
                paths.push(Polyline::dedup_from(pts)?);
            }
        }
    }
    Ok(PathSet {
        paths,
        source_graph_digest: graph.digest(),
        truncated,
    })
}

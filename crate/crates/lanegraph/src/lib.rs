//! Path-wise lane-graph toolkit.
//!
//! A directed lane graph decomposes into continuous root-to-leaf paths
//! ([`graph2path`]), paths carry polyline or Bezier parameterizations
//! ([`path`]), and a reconstruction pass merges discretized paths back into a
//! graph ([`path2graph`]). The [`metrics`] module scores predicted against
//! ground-truth graphs with the TOPO and Junction TOPO protocols, and
//! [`matching`] provides the bipartite set-matching losses. A seeded
//! synthetic generator ([`synth`]) plus JSON/SVG IO ([`io`], [`svg`]) make
//! the full decompose -> perturb -> reconstruct -> score pipeline runnable
//! without any trained network.

pub mod error;
pub mod geom;
pub mod graph;
pub mod graph2path;
pub mod io;
pub mod matching;
pub mod metrics;
pub mod path;
pub mod path2graph;
pub mod rng;
pub mod svg;
pub mod synth;

pub use error::{Error, Result};
pub use geom::{Bounds, Point};
pub use graph::{
    geometry_isomorphic, DirectedLaneGraph, GraphBuilder, Subgraph, ValidationReport, VertexId,
};
pub use graph2path::{find_paths, graph_to_paths, roots_and_leaves, PathSet, DEFAULT_PATH_CAP};
pub use matching::{
    bipartite_match_loss, focal_loss, hungarian, l1_path_loss, loss_gradients, CostMatrix,
    LossBreakdown, LossGradients, MatchLossConfig,
};
pub use metrics::{
    junction_topo_metric, match_vertices, subgraph_pr, topo_metric, MatchResult, MetricConfig,
    TopoReport,
};
pub use path::{bezier_weight_matrix, fit_bezier, fit_bezier_at, BezierPath, Polyline, WeightMatrix};
pub use path2graph::{discretize_path, merge_vertices_by_overlap, paths_to_graph, MergeConfig};
pub use synth::{generate_graph, perturb_paths, PerturbConfig, SynthConfig};

//! JSON document schemas for graphs and path sets.
//!
//! Documents are versioned, human-diffable JSON. Coordinates serialize with
//! shortest-roundtrip decimal formatting, so save/load is bit-exact. Parse
//! failures carry the path to the offending field.

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::graph::{DirectedLaneGraph, VertexId};
use crate::graph2path::PathSet;
use crate::path::{BezierPath, Polyline};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const GRAPH_SCHEMA_VERSION: &str = "1";
pub const PATHS_SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub schema_version: String,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<[u32; 2]>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl GraphDocument {
    pub fn from_graph(graph: &DirectedLaneGraph) -> Self {
        GraphDocument {
            schema_version: GRAPH_SCHEMA_VERSION.to_string(),
            vertices: graph
                .vertices()
                .iter()
                .map(|(id, p)| VertexRecord {
                    id: id.0,
                    x: p.x,
                    y: p.y,
                })
                .collect(),
            edges: graph.edges().iter().map(|(a, b)| [a.0, b.0]).collect(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn to_graph(&self) -> Result<DirectedLaneGraph> {
        check_schema(&self.schema_version, GRAPH_SCHEMA_VERSION)?;
        Ok(DirectedLaneGraph::new(
            self.vertices
                .iter()
                .map(|v| (VertexId(v.id), Point::new(v.x, v.y)))
                .collect(),
            self.edges
                .iter()
                .map(|[a, b]| (VertexId(*a), VertexId(*b)))
                .collect(),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Polyline,
    Bezier,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathRecord {
    pub points: Vec<[f64; 2]>,
    pub kind: PathKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathDocument {
    pub schema_version: String,
    pub paths: Vec<PathRecord>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl PathDocument {
    pub fn from_path_set(set: &PathSet) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("source_graph_digest".to_string(), set.source_graph_digest.clone());
        if set.truncated {
            metadata.insert("truncated".to_string(), "true".to_string());
        }
        PathDocument {
            schema_version: PATHS_SCHEMA_VERSION.to_string(),
            paths: set
                .paths
                .iter()
                .map(|p| PathRecord {
                    points: p.points().iter().map(|q| [q.x, q.y]).collect(),
                    kind: PathKind::Polyline,
                })
                .collect(),
            metadata,
        }
    }

    pub fn to_path_set(&self) -> Result<PathSet> {
        check_schema(&self.schema_version, PATHS_SCHEMA_VERSION)?;
        let mut paths = Vec::with_capacity(self.paths.len());
        for (i, record) in self.paths.iter().enumerate() {
            let pts: Vec<Point> = record.points.iter().map(|[x, y]| Point::new(*x, *y)).collect();
            let polyline = match record.kind {
                PathKind::Polyline => Polyline::new(pts).map_err(|e| Error::Parse {
                    field_path: format!("paths[{i}].points"),
                    message: e.to_string(),
                })?,
                // a Bezier record carries control points; realize it as a
                // polyline at the default sampling density
                PathKind::Bezier => BezierPath::new(pts)
                    .and_then(|b| b.sample_uniform(crate::path::DEFAULT_POLYLINE_POINTS))
                    .map_err(|e| Error::Parse {
                        field_path: format!("paths[{i}].points"),
                        message: e.to_string(),
                    })?,
            };
            paths.push(polyline);
        }
        Ok(PathSet {
            paths,
            source_graph_digest: self
                .metadata
                .get("source_graph_digest")
                .cloned()
                .unwrap_or_default(),
            truncated: self.metadata.get("truncated").map(String::as_str) == Some("true"),
        })
    }
}

fn check_schema(found: &str, supported: &str) -> Result<()> {
    if found == supported {
        Ok(())
    } else {
        Err(Error::SchemaVersion {
            found: found.to_string(),
            supported: supported.to_string(),
        })
    }
}

fn parse_with_path<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        field_path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn graph_to_json(graph: &DirectedLaneGraph) -> String {
    let doc = GraphDocument::from_graph(graph);
    serde_json::to_string_pretty(&doc).expect("document serializes")
}

pub fn graph_from_json(bytes: &[u8]) -> Result<DirectedLaneGraph> {
    parse_with_path::<GraphDocument>(bytes)?.to_graph()
}

pub fn paths_to_json(set: &PathSet) -> String {
    let doc = PathDocument::from_path_set(set);
    serde_json::to_string_pretty(&doc).expect("document serializes")
}

pub fn paths_from_json(bytes: &[u8]) -> Result<PathSet> {
    parse_with_path::<PathDocument>(bytes)?.to_path_set()
}

pub fn save_graph(graph: &DirectedLaneGraph, path: &Path) -> Result<()> {
    save_graph_document(&GraphDocument::from_graph(graph), path)
}

pub fn save_graph_document(doc: &GraphDocument, path: &Path) -> Result<()> {
    let body = serde_json::to_string_pretty(doc).expect("document serializes");
    write_file(path, body.as_bytes())
}

pub fn load_graph_document(path: &Path) -> Result<GraphDocument> {
    let bytes = read_file(path)?;
    parse_with_path(&bytes)
}

pub fn load_graph(path: &Path) -> Result<DirectedLaneGraph> {
    load_graph_document(path)?.to_graph()
}

pub fn save_paths_document(doc: &PathDocument, path: &Path) -> Result<()> {
    let body = serde_json::to_string_pretty(doc).expect("document serializes");
    write_file(path, body.as_bytes())
}

pub fn save_paths(set: &PathSet, path: &Path) -> Result<()> {
    save_paths_document(&PathDocument::from_path_set(set), path)
}

pub fn load_paths_document(path: &Path) -> Result<PathDocument> {
    let bytes = read_file(path)?;
    parse_with_path(&bytes)
}

pub fn load_paths(path: &Path) -> Result<PathSet> {
    load_paths_document(path)?.to_path_set()
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

//! C ABI for the lanegraph toolkit.
//!
//! Graphs and path sets travel across the boundary as opaque handles;
//! structured data (documents, reports, configs) goes as JSON strings in the
//! crate's document schemas. Every fallible call returns an [`LgStatus`];
//! on failure a thread-local message is readable through
//! [`lg_last_error_message`]. Strings returned through out-pointers are
//! heap-allocated and must be released with [`lg_string_free`].

use lanegraph::graph::DirectedLaneGraph;
use lanegraph::graph2path::PathSet;
use lanegraph::metrics::{junction_topo_metric, topo_metric, MetricConfig};
use lanegraph::path2graph::{paths_to_graph, MergeConfig};
use lanegraph::svg::{render_svg, RenderOptions};
use lanegraph::synth::{generate_graph, perturb_paths, PerturbConfig, SynthConfig};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

/// Opaque directed lane graph handle.
pub struct LgGraph {
    inner: DirectedLaneGraph,
}

/// Opaque path set handle.
pub struct LgPathSet {
    inner: PathSet,
}

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LgStatus {
    Ok = 0,
    NullPointer = 1,
    Utf8Error = 2,
    InvalidArgument = 3,
    InvalidGraph = 4,
    NotFound = 5,
    ParseError = 6,
    Internal = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").expect("empty cstring"));
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("no interior nul");
    });
}

fn status_of(err: &lanegraph::Error) -> LgStatus {
    use lanegraph::Error::*;
    match err {
        InvalidGraph(_) => LgStatus::InvalidGraph,
        VertexNotFound(_) => LgStatus::NotFound,
        InvalidArgument(_) | DegeneratePolyline(_) | SizeMismatch(_) | NonFiniteCost { .. }
        | SingularSystem(_) => LgStatus::InvalidArgument,
        Io { .. } | Parse { .. } | SchemaVersion { .. } => LgStatus::ParseError,
    }
}

fn fail(err: &lanegraph::Error) -> LgStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through an out-parameter of
/// this library, or null.
#[no_mangle]
pub unsafe extern "C" fn lg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn read_cstr<'a>(ptr: *const c_char) -> Result<&'a str, LgStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(LgStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| {
        set_error(&format!("invalid UTF-8: {e}"));
        LgStatus::Utf8Error
    })
}

fn give_string(out: *mut *mut c_char, body: String) -> LgStatus {
    let c = match CString::new(body) {
        Ok(c) => c,
        Err(e) => {
            set_error(&format!("string contains interior nul: {e}"));
            return LgStatus::Internal;
        }
    };
    unsafe { *out = c.into_raw() };
    LgStatus::Ok
}

macro_rules! require {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_error(concat!("null pointer argument: ", stringify!($ptr)));
            return LgStatus::NullPointer;
        }
    };
}

// ---------------------------------------------------------------------------
// graphs
// ---------------------------------------------------------------------------

/// Parses a graph document (JSON) into a graph handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lg_graph_from_json(
    json: *const c_char,
    out: *mut *mut LgGraph,
) -> LgStatus {
    require!(out);
    let body = match read_cstr(json) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match lanegraph::io::graph_from_json(body.as_bytes()) {
        Ok(graph) => {
            *out = Box::into_raw(Box::new(LgGraph { inner: graph }));
            LgStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Serializes a graph handle into a graph document (JSON).
///
/// # Safety
/// `graph` must be a live handle from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lg_graph_to_json(
    graph: *const LgGraph,
    out: *mut *mut c_char,
) -> LgStatus {
    require!(graph);
    require!(out);
    give_string(out, lanegraph::io::graph_to_json(&(*graph).inner))
}

/// Releases a graph handle.
///
/// # Safety
/// `graph` must be a handle from this library (or null) and not used again.
#[no_mangle]
pub unsafe extern "C" fn lg_graph_free(graph: *mut LgGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of vertices (0 for null).
///
/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lg_graph_vertex_count(graph: *const LgGraph) -> u64 {
    if graph.is_null() {
        return 0;
    }
    (*graph).inner.vertex_count() as u64
}

/// Number of edges (0 for null).
///
/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lg_graph_edge_count(graph: *const LgGraph) -> u64 {
    if graph.is_null() {
        return 0;
    }
    (*graph).inner.edge_count() as u64
}

/// Number of junction vertices (in-degree or out-degree at least 2).
///
/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lg_graph_junction_count(graph: *const LgGraph) -> u64 {
    if graph.is_null() {
        return 0;
    }
    (*graph).inner.junctions().len() as u64
}

/// Validates the graph; writes the validation report as JSON.
///
/// # Safety
/// Pointers must be valid; see [`lg_graph_from_json`].
#[no_mangle]
pub unsafe extern "C" fn lg_graph_validate(
    graph: *const LgGraph,
    out_is_valid: *mut bool,
    out_report_json: *mut *mut c_char,
) -> LgStatus {
    require!(graph);
    require!(out_is_valid);
    require!(out_report_json);
    let report = (*graph).inner.validate();
    *out_is_valid = report.is_valid;
    match serde_json::to_string(&report) {
        Ok(body) => give_string(out_report_json, body),
        Err(e) => {
            set_error(&e.to_string());
            LgStatus::Internal
        }
    }
}

/// Splits every edge longer than `spacing` into equal parts.
///
/// # Safety
/// Pointers must be valid; see [`lg_graph_from_json`].
#[no_mangle]
pub unsafe extern "C" fn lg_graph_interpolate(
    graph: *const LgGraph,
    spacing: f64,
    out: *mut *mut LgGraph,
) -> LgStatus {
    require!(graph);
    require!(out);
    match (*graph).inner.interpolate(spacing) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(LgGraph { inner: g }));
            LgStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

// ---------------------------------------------------------------------------
// paths
// ---------------------------------------------------------------------------

/// Parses a path document (JSON) into a path-set handle.
///
/// # Safety
/// See [`lg_graph_from_json`].
#[no_mangle]
pub unsafe extern "C" fn lg_pathset_from_json(
    json: *const c_char,
    out: *mut *mut LgPathSet,
) -> LgStatus {
    require!(out);
    let body = match read_cstr(json) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match lanegraph::io::paths_from_json(body.as_bytes()) {
        Ok(set) => {
            *out = Box::into_raw(Box::new(LgPathSet { inner: set }));
            LgStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Serializes a path-set handle into a path document (JSON).
///
/// # Safety
/// See [`lg_graph_to_json`].
#[no_mangle]
pub unsafe extern "C" fn lg_pathset_to_json(
    paths: *const LgPathSet,
    out: *mut *mut c_char,
) -> LgStatus {
    require!(paths);
    require!(out);
    give_string(out, lanegraph::io::paths_to_json(&(*paths).inner))
}

/// Releases a path-set handle.
///
/// # Safety
/// `paths` must be a handle from this library (or null) and not used again.
#[no_mangle]
pub unsafe extern "C" fn lg_pathset_free(paths: *mut LgPathSet) {
    if !paths.is_null() {
        drop(Box::from_raw(paths));
    }
}

/// Number of paths (0 for null).
///
/// # Safety
/// `paths` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lg_pathset_len(paths: *const LgPathSet) -> u64 {
    if paths.is_null() {
        return 0;
    }
    (*paths).inner.path_count() as u64
}

/// True when the decomposition hit its enumeration cap.
///
/// # Safety
/// `paths` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lg_pathset_truncated(paths: *const LgPathSet) -> bool {
    if paths.is_null() {
        return false;
    }
    (*paths).inner.truncated
}

/// Decomposes a graph into its root-to-leaf path set.
///
/// # Safety
/// See [`lg_graph_from_json`].
#[no_mangle]
pub unsafe extern "C" fn lg_graph_to_paths(
    graph: *const LgGraph,
    cap: u64,
    out: *mut *mut LgPathSet,
) -> LgStatus {
    require!(graph);
    require!(out);
    match lanegraph::graph2path::graph_to_paths(&(*graph).inner, cap as usize) {
        Ok(set) => {
            *out = Box::into_raw(Box::new(LgPathSet { inner: set }));
            LgStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Reconstructs a graph from a path set (discretize, chain, merge).
///
/// # Safety
/// See [`lg_graph_from_json`].
#[no_mangle]
pub unsafe extern "C" fn lg_paths_to_graph(
    paths: *const LgPathSet,
    discretize_step: f64,
    merge_radius: f64,
    out: *mut *mut LgGraph,
) -> LgStatus {
    require!(paths);
    require!(out);
    let config = MergeConfig {
        discretize_step,
        merge_radius,
        ..Default::default()
    };
    match paths_to_graph(&(*paths).inner, &config) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(LgGraph { inner: g }));
            LgStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

// ---------------------------------------------------------------------------
// metrics, synthesis, rendering
// ---------------------------------------------------------------------------

/// Evaluates prediction against ground truth; writes the report as JSON.
/// `junction` picks Junction TOPO over TOPO, `undirected` the undirected
/// variants.
///
/// # Safety
/// See [`lg_graph_from_json`].
#[no_mangle]
pub unsafe extern "C" fn lg_topo_eval(
    pred: *const LgGraph,
    gt: *const LgGraph,
    interpolation_spacing: f64,
    match_threshold: f64,
    traverse_dist: f64,
    undirected: bool,
    junction: bool,
    out_report_json: *mut *mut c_char,
) -> LgStatus {
    require!(pred);
    require!(gt);
    require!(out_report_json);
    let config = MetricConfig {
        interpolation_spacing,
        match_threshold,
        traverse_dist,
        directed: !undirected,
    };
    let result = if junction {
        junction_topo_metric(&(*pred).inner, &(*gt).inner, &config)
    } else {
        topo_metric(&(*pred).inner, &(*gt).inner, &config)
    };
    match result {
        Ok(report) => match serde_json::to_string(&report) {
            Ok(body) => give_string(out_report_json, body),
            Err(e) => {
                set_error(&e.to_string());
                LgStatus::Internal
            }
        },
        Err(e) => fail(&e),
    }
}

/// Generates a seeded synthetic lane graph. `config_json` may be null for
/// defaults; `seed` overrides the config's seed either way.
///
/// # Safety
/// See [`lg_graph_from_json`].
#[no_mangle]
pub unsafe extern "C" fn lg_generate_graph(
    config_json: *const c_char,
    seed: u64,
    out: *mut *mut LgGraph,
) -> LgStatus {
    require!(out);
    let mut config = if config_json.is_null() {
        SynthConfig::default()
    } else {
        let body = match read_cstr(config_json) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match serde_json::from_str::<SynthConfig>(body) {
            Ok(c) => c,
            Err(e) => {
                set_error(&format!("synth config: {e}"));
                return LgStatus::ParseError;
            }
        }
    };
    config.seed = seed;
    match generate_graph(&config) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(LgGraph { inner: g }));
            LgStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Applies the seeded perturbation model to a path set.
///
/// # Safety
/// See [`lg_graph_from_json`].
#[no_mangle]
pub unsafe extern "C" fn lg_perturb_paths(
    paths: *const LgPathSet,
    seed: u64,
    noise_sigma: f64,
    drop_path_prob: f64,
    truncate_prob: f64,
    spurious_path_prob: f64,
    out: *mut *mut LgPathSet,
) -> LgStatus {
    require!(paths);
    require!(out);
    let config = PerturbConfig {
        seed,
        noise_sigma,
        drop_path_prob,
        truncate_prob,
        spurious_path_prob,
    };
    match perturb_paths(&(*paths).inner, &config) {
        Ok(set) => {
            *out = Box::into_raw(Box::new(LgPathSet { inner: set }));
            LgStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Renders the graph (and optional paths) as an SVG string.
///
/// # Safety
/// See [`lg_graph_from_json`]; `paths` may be null.
#[no_mangle]
pub unsafe extern "C" fn lg_render_svg(
    graph: *const LgGraph,
    paths: *const LgPathSet,
    out_svg: *mut *mut c_char,
) -> LgStatus {
    require!(graph);
    require!(out_svg);
    let path_ref = if paths.is_null() {
        None
    } else {
        Some(&(*paths).inner)
    };
    let svg = render_svg(&(*graph).inner, path_ref, &RenderOptions::default());
    give_string(out_svg, svg)
}

#ifndef LANEGRAPH_H
#define LANEGRAPH_H

/* Generated with cbindgen:0.26.0 */

/* Generated by cbindgen from the lanegraph-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum LgStatus {
  LG_STATUS_OK = 0,
  LG_STATUS_NULL_POINTER = 1,
  LG_STATUS_UTF8_ERROR = 2,
  LG_STATUS_INVALID_ARGUMENT = 3,
  LG_STATUS_INVALID_GRAPH = 4,
  LG_STATUS_NOT_FOUND = 5,
  LG_STATUS_PARSE_ERROR = 6,
  LG_STATUS_INTERNAL = 7,
} LgStatus;

// Opaque directed lane graph handle.
typedef struct LgGraph LgGraph;

// Opaque path set handle.
typedef struct LgPathSet LgPathSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread. The pointer stays
// valid until the next failing call on the same thread.
const char *lg_last_error_message(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be a pointer previously returned through an out-parameter of
// this library, or null.
void lg_string_free(char *s);

// Parses a graph document (JSON) into a graph handle.
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a valid pointer.
enum LgStatus lg_graph_from_json(const char *json, struct LgGraph **out);

// Serializes a graph handle into a graph document (JSON).
//
// # Safety
// `graph` must be a live handle from this library; `out` must be valid.
enum LgStatus lg_graph_to_json(const struct LgGraph *graph, char **out);

// Releases a graph handle.
//
// # Safety
// `graph` must be a handle from this library (or null) and not used again.
void lg_graph_free(struct LgGraph *graph);

// Number of vertices (0 for null).
//
// # Safety
// `graph` must be a live handle or null.
uint64_t lg_graph_vertex_count(const struct LgGraph *graph);

// Number of edges (0 for null).
//
// # Safety
// `graph` must be a live handle or null.
uint64_t lg_graph_edge_count(const struct LgGraph *graph);

// Number of junction vertices (in-degree or out-degree at least 2).
//
// # Safety
// `graph` must be a live handle or null.
uint64_t lg_graph_junction_count(const struct LgGraph *graph);

// Validates the graph; writes the validation report as JSON.
//
// # Safety
// Pointers must be valid; see [`lg_graph_from_json`].
enum LgStatus lg_graph_validate(const struct LgGraph *graph,
                                bool *out_is_valid,
                                char **out_report_json);

// Splits every edge longer than `spacing` into equal parts.
//
// # Safety
// Pointers must be valid; see [`lg_graph_from_json`].
enum LgStatus lg_graph_interpolate(const struct LgGraph *graph,
                                   double spacing,
                                   struct LgGraph **out);

// Parses a path document (JSON) into a path-set handle.
//
// # Safety
// See [`lg_graph_from_json`].
enum LgStatus lg_pathset_from_json(const char *json, struct LgPathSet **out);

// Serializes a path-set handle into a path document (JSON).
//
// # Safety
// See [`lg_graph_to_json`].
enum LgStatus lg_pathset_to_json(const struct LgPathSet *paths, char **out);

// Releases a path-set handle.
//
// # Safety
// `paths` must be a handle from this library (or null) and not used again.
void lg_pathset_free(struct LgPathSet *paths);

// Number of paths (0 for null).
//
// # Safety
// `paths` must be a live handle or null.
uint64_t lg_pathset_len(const struct LgPathSet *paths);

// True when the decomposition hit its enumeration cap.
//
// # Safety
// `paths` must be a live handle or null.
bool lg_pathset_truncated(const struct LgPathSet *paths);

// Decomposes a graph into its root-to-leaf path set.
//
// # Safety
// See [`lg_graph_from_json`].
enum LgStatus lg_graph_to_paths(const struct LgGraph *graph, uint64_t cap, struct LgPathSet **out);

// Reconstructs a graph from a path set (discretize, chain, merge).
//
// # Safety
// See [`lg_graph_from_json`].
enum LgStatus lg_paths_to_graph(const struct LgPathSet *paths,
                                double discretize_step,
                                double merge_radius,
                                struct LgGraph **out);

// Evaluates prediction against ground truth; writes the report as JSON.
// `junction` picks Junction TOPO over TOPO, `undirected` the undirected
// variants.
//
// # Safety
// See [`lg_graph_from_json`].
enum LgStatus lg_topo_eval(const struct LgGraph *pred,
                           const struct LgGraph *gt,
                           double interpolation_spacing,
                           double match_threshold,
                           double traverse_dist,
                           bool undirected,
                           bool junction,
                           char **out_report_json);

// Generates a seeded synthetic lane graph. `config_json` may be null for
// defaults; `seed` overrides the config's seed either way.
//
// # Safety
// See [`lg_graph_from_json`].
enum LgStatus lg_generate_graph(const char *config_json, uint64_t seed, struct LgGraph **out);

// Applies the seeded perturbation model to a path set.
//
// # Safety
// See [`lg_graph_from_json`].
enum LgStatus lg_perturb_paths(const struct LgPathSet *paths,
                               uint64_t seed,
                               double noise_sigma,
                               double drop_path_prob,
                               double truncate_prob,
                               double spurious_path_prob,
                               struct LgPathSet **out);

// Renders the graph (and optional paths) as an SVG string.
//
// # Safety
// See [`lg_graph_from_json`]; `paths` may be null.
enum LgStatus lg_render_svg(const struct LgGraph *graph,
                            const struct LgPathSet *paths,
                            char **out_svg);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LANEGRAPH_H */

#ifndef MWC_H
#define MWC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes.
typedef enum MwcStatus {
  MWC_STATUS_OK = 0,
  MWC_STATUS_NULL_POINTER = 1,
  MWC_STATUS_INVALID_ARGUMENT = 2,
  MWC_STATUS_PARSE = 3,
  MWC_STATUS_CAP_EXCEEDED = 4,
  MWC_STATUS_SOLVER_FAILURE = 5,
  MWC_STATUS_UNSPLITTABLE = 6,
  MWC_STATUS_BUFFER_TOO_SMALL = 7,
  MWC_STATUS_IO = 8,
  // A must-pass verification check failed; the reports are still returned.
  MWC_STATUS_CHECK_FAILED = 9,
  MWC_STATUS_PANIC = 10,
} MwcStatus;

// Cut oracle for [`mwc_partition`].
typedef enum MwcMode {
  MWC_MODE_EXACT = 0,
  MWC_MODE_SWEEP = 1,
} MwcMode;

// Opaque graph handle.
typedef struct MwcGraph MwcGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message on this thread, or null. Valid until the next call.
const char *mwc_last_error(void);

// Graph on `n` vertices from `edge_count` pairs stored flat in `edges`.
//
// # Safety
// `edges` must point to `2 * edge_count` readable values (or be null when
// `edge_count` is 0) and `out` must be writable.
enum MwcStatus mwc_graph_new(size_t n,
                             const uint32_t *edges,
                             size_t edge_count,
                             struct MwcGraph **out);

// Graph from a family descriptor such as `chain(k3*8)`.
//
// # Safety
// `spec` must be a nul-terminated string and `out` writable.
enum MwcStatus mwc_graph_from_family(const char *spec, struct MwcGraph **out);

// Graph from edge-list text (`n m` header, then `u v` lines).
//
// # Safety
// `text` must be a nul-terminated string and `out` writable.
enum MwcStatus mwc_graph_from_edge_list(const char *text, struct MwcGraph **out);

// # Safety
// `g` must come from a constructor here and not be freed twice.
void mwc_graph_free(struct MwcGraph *g);

// # Safety
// `g` must be a live handle or null (returns 0).
size_t mwc_graph_vertex_count(const struct MwcGraph *g);

// # Safety
// `g` must be a live handle or null (returns 0).
size_t mwc_graph_edge_count(const struct MwcGraph *g);

// Exact expansion constant `h(G)`.
//
// # Safety
// `g` must be a live handle; `num` and `den` writable.
enum MwcStatus mwc_expansion(const struct MwcGraph *g, uint64_t *num, uint64_t *den);

// Exact `k`-way expansion constant `h_k(G)`.
//
// # Safety
// `g` must be a live handle; `num` and `den` writable.
enum MwcStatus mwc_kway_expansion(const struct MwcGraph *g, size_t k, uint64_t *num, uint64_t *den);

// Laplacian eigenvalues in ascending order into `values[0..n]`.
//
// # Safety
// `g` must be a live handle; `values` must hold `len` doubles.
enum MwcStatus mwc_spectrum(const struct MwcGraph *g, double *values, size_t len);

// Recursive `k`-partition. Writes block labels into `labels[0..n]` and,
// when `trace_json_out` is non-null, the division trace as JSON.
//
// # Safety
// `g` must be a live handle; `labels` must hold `len` values;
// `trace_json_out` null or writable.
enum MwcStatus mwc_partition(const struct MwcGraph *g,
                             size_t k,
                             enum MwcMode mode,
                             size_t *labels,
                             size_t len,
                             char **trace_json_out);

// Runs a verification suite. `corpus` is a `;`-separated list of family
// descriptors, or null for the built-in corpus. Reports are written as
// JSON lines to `reports_out`; `CheckFailed` signals a must-pass failure.
//
// # Safety
// `suite` must be a nul-terminated string, `corpus` null or one, and
// `reports_out` writable.
enum MwcStatus mwc_verify(const char *suite, const char *corpus, char **reports_out);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not be freed twice.
void mwc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MWC_H */

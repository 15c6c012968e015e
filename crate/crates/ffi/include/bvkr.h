#ifndef BVKR_H
#define BVKR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BvkrStatus {
  BVKR_STATUS_OK = 0,
  BVKR_STATUS_NULL_ARGUMENT = 1,
  BVKR_STATUS_INVALID_UTF8 = 2,
  BVKR_STATUS_INVALID_INPUT = 3,
  BVKR_STATUS_STAGE_FAILED = 4,
  BVKR_STATUS_OUT_OF_RANGE = 5,
  BVKR_STATUS_PANIC = 6,
} BvkrStatus;

typedef enum BvkrVerdict {
  BVKR_VERDICT_HOLDS = 0,
  BVKR_VERDICT_FAILS = 1,
  BVKR_VERDICT_UNKNOWN = 2,
} BvkrVerdict;

typedef struct BvkrDiagram BvkrDiagram;

typedef struct BvkrPipeline BvkrPipeline;

typedef struct BvkrSystem BvkrSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *bvkr_last_error(void);

// # Safety
// `s` is null or a string returned by this library and not yet freed.
void bvkr_string_free(char *s);

// Loads a bundled system (`full-2`, `golden-mean`, ...) or a system file.
//
// # Safety
// `source` is a NUL-terminated string and `out` is valid for writes.
enum BvkrStatus bvkr_system_load(const char *source, struct BvkrSystem **out);

// # Safety
// `sys` is null or a handle from [`bvkr_system_load`] not yet freed.
void bvkr_system_free(struct BvkrSystem *sys);

// Decides whether a clopen set such as `"00@-1|101@-1"` is a complete
// section. `forward_bound` receives the number of forward images covering
// the space, or 0 when the set is not complete.
//
// # Safety
// Handles and strings are valid; the outputs are valid for writes.
enum BvkrStatus bvkr_section_is_complete(const struct BvkrSystem *sys,
                                         const char *set,
                                         bool *complete,
                                         size_t *forward_bound);

// Runs every stage to `depth`. A zero `shift_bound` or `window` selects
// the level-dependent default.
//
// # Safety
// `sys` is a valid handle and `out` is valid for writes.
enum BvkrStatus bvkr_pipeline_run(const struct BvkrSystem *sys,
                                  size_t depth,
                                  size_t shift_bound,
                                  size_t window,
                                  struct BvkrPipeline **out);

// # Safety
// `p` is null or a handle from [`bvkr_pipeline_run`] not yet freed.
void bvkr_pipeline_free(struct BvkrPipeline *p);

// Number of property verdicts the pipeline produced.
//
// # Safety
// `p` is a valid handle and `count` is valid for writes.
enum BvkrStatus bvkr_pipeline_verdict_count(const struct BvkrPipeline *p, size_t *count);

// Verdict `index` with its property name.
//
// # Safety
// `p` is a valid handle; `verdict` and `property` are valid for writes.
// The name is released with [`bvkr_string_free`].
enum BvkrStatus bvkr_pipeline_verdict(const struct BvkrPipeline *p,
                                      size_t index,
                                      enum BvkrVerdict *verdict,
                                      char **property);

// Contents of one artifact (`kr.json`, `diagram.dot`, ...).
//
// # Safety
// `p` is a valid handle, `name` a NUL-terminated string and `contents`
// valid for writes. The result is released with [`bvkr_string_free`].
enum BvkrStatus bvkr_pipeline_artifact(const struct BvkrPipeline *p,
                                       const char *name,
                                       char **contents);

// A copy of the pipeline's diagram.
//
// # Safety
// `p` is a valid handle and `out` is valid for writes.
enum BvkrStatus bvkr_pipeline_diagram(const struct BvkrPipeline *p, struct BvkrDiagram **out);

// A bundled diagram (`odometer`, `fibonacci`, ...) to the given depth.
//
// # Safety
// `name` is a NUL-terminated string and `out` is valid for writes.
enum BvkrStatus bvkr_diagram_builtin(const char *name, size_t depth, struct BvkrDiagram **out);

// # Safety
// `d` is null or a diagram handle not yet freed.
void bvkr_diagram_free(struct BvkrDiagram *d);

// # Safety
// `d` is a valid handle and `depth` is valid for writes.
enum BvkrStatus bvkr_diagram_depth(const struct BvkrDiagram *d, size_t *depth);

// # Safety
// `d` is a valid handle and `count` is valid for writes.
enum BvkrStatus bvkr_diagram_vertex_count(const struct BvkrDiagram *d, size_t level, size_t *count);

// Vershik successor of a path given as `len` edge indices. On success
// `next` holds the successor and `maximal` is false; when the path is
// maximal at this depth `maximal` is true and `next` is left untouched.
//
// # Safety
// `edges` and `next` are valid for `len` elements; `maximal` is valid
// for writes.
enum BvkrStatus bvkr_diagram_successor(const struct BvkrDiagram *d,
                                       const size_t *edges,
                                       size_t len,
                                       size_t *next,
                                       bool *maximal);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BVKR_H */

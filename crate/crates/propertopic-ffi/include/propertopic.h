#ifndef PROPERTOPIC_H
#define PROPERTOPIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PtStatus {
  PT_STATUS_OK = 0,
  PT_STATUS_NULL_ARGUMENT = 1,
  PT_STATUS_INVALID_UTF8 = 2,
  PT_STATUS_PARSE = 3,
  PT_STATUS_FAILURE = 4,
  PT_STATUS_PANIC = 5,
} PtStatus;

// A PROP built from a JSON spec.
typedef struct PtProp PtProp;

// A propertopic set.
typedef struct PtPtSet PtPtSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The message of the last failed call on this thread, or null.
//
// The pointer stays valid until the next `pt_` call on the same thread.
const char *pt_last_error(void);

// Frees a string returned by this library.
//
// # Safety
// `s` must be null or a string returned through an `out` parameter of this
// library that has not been freed yet.
void pt_string_free(char *s);

// Builds a PROP from a JSON spec such as `{"kind": "terminal"}`.
//
// # Safety
// `spec_json` must be null or a NUL-terminated string and `out` must be
// null or valid for writes. The handle is released with [`pt_prop_free`].
enum PtStatus pt_prop_from_json(const char *spec_json, struct PtProp **out);

// # Safety
// `p` must be null or a handle from [`pt_prop_from_json`] not yet freed.
void pt_prop_free(struct PtProp *p);

// Writes the identifier of the PROP as a newly allocated string.
//
// # Safety
// `p` must be a live handle and `out` must be null or valid for writes.
enum PtStatus pt_prop_id(const struct PtProp *p, char **out);

// Decides whether a JSON element belongs to the PROP.
//
// # Safety
// `p` must be a live handle, `element_json` a NUL-terminated string and
// `out` valid for writes.
enum PtStatus pt_prop_contains(const struct PtProp *p, const char *element_json, bool *out);

// Evaluates a decorated graph in the PROP and writes the resulting
// element as JSON. Free it with [`pt_string_free`].
//
// # Safety
// `p` must be a live handle, `graph_json` a NUL-terminated string and
// `out` valid for writes.
enum PtStatus pt_prop_eval_graph(const struct PtProp *p, const char *graph_json, char **out);

// Builds ψ of an algebra spec up to dimension `bound`.
//
// # Safety
// `algebra_json` must be a NUL-terminated string and `out` valid for
// writes. The handle is released with [`pt_ptset_free`].
enum PtStatus pt_psi_build(const char *algebra_json,
                           uintptr_t bound,
                           uint64_t seed,
                           struct PtPtSet **out);

// Reads a propertopic set from JSON. `base` may be null when the set lives
// over `T` or `I`.
//
// # Safety
// `json` must be a NUL-terminated string, `base` null or a live handle and
// `out` valid for writes.
enum PtStatus pt_ptset_from_json(const char *json,
                                 const struct PtProp *base,
                                 uintptr_t bound,
                                 struct PtPtSet **out);

// # Safety
// `x` must be null or a handle not yet freed.
void pt_ptset_free(struct PtPtSet *x);

// Writes the set as JSON. Free it with [`pt_string_free`].
//
// # Safety
// `x` must be a live handle and `out` valid for writes.
enum PtStatus pt_ptset_to_json(const struct PtPtSet *x, char **out);

// The top dimension of the set.
//
// # Safety
// `x` must be a live handle and `out` valid for writes.
enum PtStatus pt_ptset_bound(const struct PtPtSet *x, uintptr_t *out);

// Checks the presheaf conditions and writes whether they hold. When
// `report` is non-null it receives the violations as JSON.
//
// # Safety
// `x` must be a live handle, `ok` valid for writes and `report` null or
// valid for writes.
enum PtStatus pt_ptset_validate(const struct PtPtSet *x, bool *ok, char **report);

// Checks the weak-`n` filling conditions up to `bound` and writes whether
// they hold. When `report` is non-null it receives the report as JSON.
//
// # Safety
// `x` must be a live handle, `passed` valid for writes and `report` null
// or valid for writes.
enum PtStatus pt_ptset_check_weak(const struct PtPtSet *x,
                                  uintptr_t n,
                                  uintptr_t bound,
                                  bool *passed,
                                  char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROPERTOPIC_H */

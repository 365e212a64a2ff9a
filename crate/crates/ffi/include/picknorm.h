#ifndef PICKNORM_H
#define PICKNORM_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  PN_STATUS_OK = 0,
  PN_STATUS_NULL_POINTER = 1,
  PN_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed problem: parse error, bad site, duplicate, length mismatch.
   */
  PN_STATUS_INVALID = 3,
  /**
   * The solver gave up; a partial result may still have been returned.
   */
  PN_STATUS_STALL = 4,
  PN_STATUS_PANIC = 5,
} PnStatus;

/**
 * A validated interpolation problem.
 */
typedef struct PnProblem PnProblem;

/**
 * A certified bracket for the NP norm.
 */
typedef struct PnResult PnResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pn_version(void);

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next `pn_` call on the same thread.
 */
const char *pn_last_error_message(void);

/**
 * Parses a problem document (the CLI's JSON problem-file format).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
PnStatus pn_problem_from_json(const char *json, PnProblem **out);

/**
 * Number of interpolation sites.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t pn_problem_len(const PnProblem *problem);

/**
 * # Safety
 * `problem` must be null or a handle not yet freed.
 */
void pn_problem_free(PnProblem *problem);

/**
 * Brackets the NP norm. `tolerance <= 0` keeps the problem's own tolerance.
 * On [`PnStatus::Stall`] `*out` holds the best partial bracket when one
 * exists and is null otherwise.
 *
 * # Safety
 * `problem` must be a live handle and `out` a writable pointer.
 */
PnStatus pn_compute(const PnProblem *problem, double tolerance, PnResult **out);

/**
 * # Safety
 * `result` must be a live handle.
 */
double pn_result_lower(const PnResult *result);

/**
 * # Safety
 * `result` must be a live handle.
 */
double pn_result_upper(const PnResult *result);

/**
 * # Safety
 * `result` must be a live handle.
 */
size_t pn_result_iterations(const PnResult *result);

/**
 * 1 when the bracket is a partial result from a stalled solve.
 *
 * # Safety
 * `result` must be a live handle.
 */
int32_t pn_result_stalled(const PnResult *result);

/**
 * Full result document as JSON; free with [`pn_string_free`].
 *
 * # Safety
 * `result` must be a live handle and `out` a writable pointer.
 */
PnStatus pn_result_to_json(const PnResult *result, char **out);

/**
 * # Safety
 * `result` must be null or a handle not yet freed.
 */
void pn_result_free(PnResult *result);

/**
 * Gleason distance matrix and partition of the problem's sites as JSON;
 * `theorem4 != 0` appends the consistency report. Free with
 * [`pn_string_free`].
 *
 * # Safety
 * `problem` must be a live handle and `out` a writable pointer.
 */
PnStatus pn_gleason_json(const PnProblem *problem, int32_t theorem4, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void pn_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PICKNORM_H */

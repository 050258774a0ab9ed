#ifndef SELENTROPY_H
#define SELENTROPY_H

/* generated by cbindgen; do not edit by hand */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum SelStatus {
  SEL_STATUS_OK = 0,
  SEL_STATUS_INVALID_INPUT = 2,
  SEL_STATUS_NUMERICAL_FAILURE = 3,
  SEL_STATUS_VALIDITY_THRESHOLD = 4,
  SEL_STATUS_NULL_POINTER = 5,
} SelStatus;

/**
 * Opaque multipartite state handle.
 */
typedef struct SelState SelState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message on this thread into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null (query mode).
 */
uintptr_t sel_last_error(char *buf, uintptr_t len);

/**
 * Crate version as a static NUL-terminated string.
 */
const char *sel_version(void);

/**
 * Loads a JSON state file. Returns null on failure; see `sel_last_error`.
 *
 * # Safety
 * `path` must be a NUL-terminated string.
 */
struct SelState *sel_state_load_json(const char *path);

/**
 * Parses a state from a JSON string. Returns null on failure.
 *
 * # Safety
 * `json` must be a NUL-terminated string.
 */
struct SelState *sel_state_parse_json(const char *json);

/**
 * Releases a state handle. Null is ignored.
 *
 * # Safety
 * `state` must come from a `sel_state_*` constructor and not be freed
 * twice.
 */
void sel_state_free(struct SelState *state);

/**
 * Total Hilbert-space dimension of the state, 0 for null.
 *
 * # Safety
 * `state` must be a live handle or null.
 */
uintptr_t sel_state_dim(const struct SelState *state);

/**
 * Trace of the state; NaN for null.
 *
 * # Safety
 * `state` must be a live handle or null.
 */
double sel_state_trace(const struct SelState *state);

/**
 * Conditional min-entropy H_min(A|B) in bits with its certified
 * tolerance. Labels are comma-separated subsystem lists.
 *
 * # Safety
 * Pointers must be valid as documented on `sel_state_load_json`.
 */
enum SelStatus sel_h_min(const struct SelState *state,
                         const char *a,
                         const char *b,
                         double *out_bits,
                         double *out_tol);

/**
 * Conditional max-entropy H_max(A|B) in bits.
 *
 * # Safety
 * As for `sel_h_min`.
 */
enum SelStatus sel_h_max(const struct SelState *state,
                         const char *a,
                         const char *b,
                         double *out_bits,
                         double *out_tol);

/**
 * Conditional von Neumann entropy H(A|B) in bits.
 *
 * # Safety
 * As for `sel_h_min`.
 */
enum SelStatus sel_h_vn(const struct SelState *state,
                        const char *a,
                        const char *b,
                        double *out_bits,
                        double *out_tol);

/**
 * Smooth min-entropy H_min^eps(A|B) in bits.
 *
 * # Safety
 * As for `sel_h_min`.
 */
enum SelStatus sel_smooth_h_min(const struct SelState *state,
                                const char *a,
                                const char *b,
                                double eps,
                                double *out_bits,
                                double *out_tol);

/**
 * Smooth max-entropy H_max^eps(A|B) in bits.
 *
 * # Safety
 * As for `sel_h_min`.
 */
enum SelStatus sel_smooth_h_max(const struct SelState *state,
                                const char *a,
                                const char *b,
                                double eps,
                                double *out_bits,
                                double *out_tol);

/**
 * Generalized trace distance between two states.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum SelStatus sel_trace_distance(const struct SelState *rho,
                                  const struct SelState *tau,
                                  double *out);

/**
 * Generalized fidelity between two states.
 *
 * # Safety
 * As for `sel_trace_distance`.
 */
enum SelStatus sel_fidelity(const struct SelState *rho, const struct SelState *tau, double *out);

/**
 * Purified distance between two states.
 *
 * # Safety
 * As for `sel_trace_distance`.
 */
enum SelStatus sel_purified_distance(const struct SelState *rho,
                                     const struct SelState *tau,
                                     double *out);

/**
 * Finite-key length and rate for blocklength n at bit error rate q with
 * correctness and secrecy parameters.
 *
 * # Safety
 * `out_ell` and `out_rate` must be writable or null.
 */
enum SelStatus sel_qkd_key_length(uint64_t n,
                                  double q,
                                  double eps_c,
                                  double eps_s,
                                  double *out_ell,
                                  double *out_rate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SELENTROPY_H */

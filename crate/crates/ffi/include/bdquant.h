#ifndef BDQUANT_H
#define BDQUANT_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BdqStatus {
  BDQ_STATUS_OK = 0,
  /**
   * a verification ran and failed
   */
  BDQ_STATUS_VERIFY_FAILED = 1,
  /**
   * malformed input or violated precondition
   */
  BDQ_STATUS_INVALID_INPUT = 2,
  BDQ_STATUS_NULL_POINTER = 3,
  /**
   * the algebra violates the Jacobi identity
   */
  BDQ_STATUS_JACOBI = 4,
  BDQ_STATUS_INTERNAL = 5,
} BdqStatus;

/**
 * Lie algebra with exact rational structure constants.
 */
typedef struct BdqAlgebra BdqAlgebra;

/**
 * Quantum moment map table of su(1,N).
 */
typedef struct BdqQmmTable BdqQmmTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *bdq_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void bdq_string_free(char *s);

/**
 * Parses an algebra JSON document; fails with `Jacobi` on invalid brackets.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` writable.
 */
enum BdqStatus bdq_algebra_from_json(const char *json, struct BdqAlgebra **out);

/**
 * Builds a Pyatetskii-Shapiro algebra from a spec JSON document.
 *
 * # Safety
 * `spec_json` must be a nul-terminated string and `out` writable.
 */
enum BdqStatus bdq_psd_build(const char *spec_json, struct BdqAlgebra **out);

/**
 * Realified su(1,N) in the adapted basis.
 *
 * # Safety
 * `out` must be writable.
 */
enum BdqStatus bdq_su1n_build(size_t n, struct BdqAlgebra **out);

/**
 * # Safety
 * `alg` must be a live handle and `out` writable.
 */
enum BdqStatus bdq_algebra_dim(const struct BdqAlgebra *alg, size_t *out);

/**
 * `dim H²` with trivial coefficients.
 *
 * # Safety
 * `alg` must be a live handle and `out` writable.
 */
enum BdqStatus bdq_algebra_h2(const struct BdqAlgebra *alg, size_t *out);

/**
 * # Safety
 * `alg` must be a live handle and `out` writable; free the result with
 * [`bdq_string_free`].
 */
enum BdqStatus bdq_algebra_to_json(const struct BdqAlgebra *alg, char **out);

/**
 * # Safety
 * `alg` must come from this library and not be freed twice.
 */
void bdq_algebra_free(struct BdqAlgebra *alg);

/**
 * Quantum moment map table for su(1,N) with constant `alpha` given as a
 * rational string such as `"1"` or `"3/2"`.
 *
 * # Safety
 * `alpha` must be a nul-terminated string and `out` writable.
 */
enum BdqStatus bdq_qmm_build(size_t n, const char *alpha, struct BdqQmmTable **out);

/**
 * Copy of the table without the `(N-1)ν²` term.
 *
 * # Safety
 * `table` must be a live handle and `out` writable.
 */
enum BdqStatus bdq_qmm_drop_nu2(const struct BdqQmmTable *table, struct BdqQmmTable **out);

/**
 * Checks the quantum moment map law on all basis pairs through `ν^order`
 * (`0` selects the natural termination order). Returns `VerifyFailed` when
 * some pair has a nonzero residual; `failing` receives their count.
 *
 * # Safety
 * `table` must be a live handle; `failing` may be null.
 */
enum BdqStatus bdq_qmm_verify(const struct BdqQmmTable *table, size_t order, size_t *failing);

/**
 * # Safety
 * `table` must be a live handle and `out` writable; free the result with
 * [`bdq_string_free`].
 */
enum BdqStatus bdq_qmm_to_json(const struct BdqQmmTable *table, char **out);

/**
 * # Safety
 * `table` must come from this library and not be freed twice.
 */
void bdq_qmm_free(struct BdqQmmTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BDQUANT_H */

#ifndef COARSE_COMPLEX_H
#define COARSE_COMPLEX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_NULL_POINTER = 1,
  CC_STATUS_INVALID_UTF8 = 2,
  CC_STATUS_PARSE = 3,
  CC_STATUS_VALIDATION = 4,
  CC_STATUS_INTERNAL = 5,
  CC_STATUS_PANIC = 6,
} CcStatus;

/**
 * Opaque cell complex.
 */
typedef struct CcComplex CcComplex;

/**
 * Opaque finite metric space.
 */
typedef struct CcMetric CcMetric;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cc_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL, or
 * 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t cc_last_error(char *buf, size_t len);

/**
 * Parses `.cx` text into a new complex handle.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum CcStatus cc_complex_parse(const char *src, struct CcComplex **out);

/**
 * # Safety
 * `k` must be null or a handle from [`cc_complex_parse`] not yet freed.
 */
void cc_complex_free(struct CcComplex *k);

/**
 * Number of cells.
 *
 * # Safety
 * `k` must be a live handle.
 */
enum CcStatus cc_complex_num_cells(const struct CcComplex *k, size_t *out);

/**
 * Dimension, or -1 for the empty complex.
 *
 * # Safety
 * `k` must be a live handle.
 */
enum CcStatus cc_complex_dim(const struct CcComplex *k, int64_t *out);

/**
 * Betti number in degree `q` by exact rank.
 *
 * # Safety
 * `k` must be a live handle.
 */
enum CcStatus cc_complex_betti(const struct CcComplex *k, size_t q, size_t *out);

/**
 * Smallest positive eigenvalue of the degree-`q` Laplacian.
 *
 * # Safety
 * `k` must be a live handle.
 */
enum CcStatus cc_complex_spectral_gap(const struct CcComplex *k, size_t q, double tol, double *out);

/**
 * Signature of a closed oriented complex of dimension divisible by 4, with
 * its first top cell positively oriented.
 *
 * # Safety
 * `k` must be a live handle.
 */
enum CcStatus cc_complex_signature(const struct CcComplex *k, int64_t *out);

/**
 * Signature of the complex obtained by gluing `core1` to `core0` along the
 * identification in `glue_json` (`{"pairs": [[id1, id0], ...], "orientation": [...]}`).
 *
 * # Safety
 * Handles must be live; `glue_json` must be a NUL-terminated string.
 */
enum CcStatus cc_pair_signature(const struct CcComplex *core1,
                                const struct CcComplex *core0,
                                const char *glue_json,
                                int64_t *out);

/**
 * Parses `.ms` text into a new metric handle.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum CcStatus cc_metric_parse(const char *src, struct CcMetric **out);

/**
 * # Safety
 * `m` must be null or a handle from [`cc_metric_parse`] not yet freed.
 */
void cc_metric_free(struct CcMetric *m);

/**
 * # Safety
 * `m` must be a live handle.
 */
enum CcStatus cc_metric_len(const struct CcMetric *m, size_t *out);

/**
 * Bracket `[lower, upper]` of the Gromov-Hausdorff distance, of width at
 * most `tol`.
 *
 * # Safety
 * Handles must be live; outputs writable.
 */
enum CcStatus cc_gh_distance(const struct CcMetric *x,
                             const struct CcMetric *y,
                             double tol,
                             double *lower,
                             double *upper);

/**
 * Lipschitz distance by exhaustive enumeration of map pairs.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum CcStatus cc_lipschitz_distance(const struct CcMetric *x,
                                    const struct CcMetric *y,
                                    size_t max_size,
                                    double *out);

/**
 * Lipschitz distance over bijections; infinity when the sizes differ.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum CcStatus cc_lipschitz_top_distance(const struct CcMetric *x,
                                        const struct CcMetric *y,
                                        double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COARSE_COMPLEX_H */

#ifndef NODAL_LAB_H
#define NODAL_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NlStatus {
  NL_STATUS_OK = 0,
  NL_STATUS_NULL_POINTER = 1,
  NL_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Quadrature depth cap or another numerical failure.
   */
  NL_STATUS_NUMERICAL = 3,
  NL_STATUS_PANIC = 4,
} NlStatus;

typedef enum NlLaw {
  NL_LAW_GAUSSIAN = 0,
  NL_LAW_RADEMACHER = 1,
  /**
   * `Exp(1) - 1`.
   */
  NL_LAW_EXPONENTIAL = 2,
  /**
   * Uniform on `[-sqrt 3, sqrt 3]`.
   */
  NL_LAW_UNIFORM = 3,
} NlLaw;

/**
 * Opaque nodal set of `F_n` on `[0, n pi]^2`.
 */
typedef struct NlNodalSet NlNodalSet;

/**
 * Opaque bivariate cosine polynomial.
 */
typedef struct NlPoly NlPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the calling thread's last error message into `buf` as a
 * NUL-terminated string, truncating to `len - 1` bytes. Returns the full
 * message length without the terminator, or 0 if there is none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t nl_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nl_version(void);

/**
 * Polynomial of degree `n` from `n * n` row-major coefficients; entry
 * `(k - 1) * n + (l - 1)` multiplies `cos(k x) cos(l y)`.
 *
 * # Safety
 * `coeffs` must point to `n * n` readable doubles; `out` must be writable.
 */
enum NlStatus nl_poly_new(size_t n, const double *coeffs, struct NlPoly **out);

/**
 * Polynomial with i.i.d. coefficients drawn from `law` (an `NlLaw` value),
 * deterministic in `(law, n, seed)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum NlStatus nl_poly_sample(int32_t law, size_t n, uint64_t seed, struct NlPoly **out);

/**
 * Release a polynomial. Null is a no-op.
 *
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void nl_poly_free(struct NlPoly *p);

/**
 * Degree of `p`, or 0 for null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t nl_poly_degree(const struct NlPoly *p);

/**
 * `f_n(x, y)`, or `F_n(x, y)` when `rescaled` is nonzero.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum NlStatus nl_poly_eval(const struct NlPoly *p,
                           double x,
                           double y,
                           int32_t rescaled,
                           double *out);

/**
 * Nodal set of `F_n` on `[0, n pi]^2` at the default grid density.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum NlStatus nl_nodal_extract(const struct NlPoly *p, struct NlNodalSet **out);

/**
 * Nodal set of `f_n` (when `rescaled` is 0) or `F_n` on a rectangle with
 * `samples_per_unit` grid points per unit length.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum NlStatus nl_nodal_extract_rect(const struct NlPoly *p,
                                    double x_min,
                                    double x_max,
                                    double y_min,
                                    double y_max,
                                    double samples_per_unit,
                                    int32_t rescaled,
                                    struct NlNodalSet **out);

/**
 * Release a nodal set. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void nl_nodal_free(struct NlNodalSet *s);

/**
 * Total nodal length.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum NlStatus nl_nodal_total_length(const struct NlNodalSet *s, double *out);

/**
 * Largest length attributed to one nodal cell.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum NlStatus nl_nodal_max_cell_length(const struct NlNodalSet *s, double *out);

/**
 * Number of segments in the nodal set.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t nl_nodal_segment_count(const struct NlNodalSet *s);

/**
 * Copy segment endpoints as `x0, y0, x1, y1` quadruples into `buf`, which
 * holds `cap` doubles. `written` receives the number of doubles needed;
 * fails with `InvalidArgument` if `cap` is smaller.
 *
 * # Safety
 * `s` must be a live handle; `buf` must hold `cap` writable doubles;
 * `written` must be writable.
 */
enum NlStatus nl_nodal_segments(const struct NlNodalSet *s,
                                double *buf,
                                size_t cap,
                                size_t *written);

/**
 * Gaussian expected nodal length of `f_n` over a rectangle inside
 * `[0, pi]^2`. `achieved` (may be null) receives the estimated relative
 * error. On `Numerical` the depth cap was hit and nothing is written.
 *
 * # Safety
 * `value` must be writable; `achieved` must be null or writable.
 */
enum NlStatus nl_kacrice_expected_length(size_t n,
                                         double x_min,
                                         double x_max,
                                         double y_min,
                                         double y_max,
                                         double rel_tol,
                                         double *value,
                                         double *achieved);

/**
 * Gaussian `P(|F_n(k pi, l pi)| <= eps)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum NlStatus nl_smallball_gaussian(uint64_t n, uint64_t k, uint64_t l, double eps, double *out);

/**
 * Halasz-type bound on `P(|F_n(k pi, l pi)| <= eps)` for coefficients
 * drawn from `law` (an `NlLaw` value).
 *
 * # Safety
 * `out` must be writable.
 */
enum NlStatus nl_halasz_integral(int32_t law,
                                 uint64_t n,
                                 uint64_t k,
                                 uint64_t l,
                                 double eps,
                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NODAL_LAB_H */

#ifndef NUMSHADOW_H
#define NUMSHADOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NsStatus {
  NS_STATUS_OK = 0,
  NS_STATUS_NULL_POINTER = 1,
  NS_STATUS_INVALID_ARGUMENT = 2,
  NS_STATUS_UNKNOWN_MATRIX = 3,
  NS_STATUS_PARSE = 4,
  NS_STATUS_DIMENSION_MISMATCH = 5,
  NS_STATUS_NUMERICAL = 6,
  NS_STATUS_IO = 7,
  NS_STATUS_BUFFER_TOO_SMALL = 8,
  NS_STATUS_PANIC = 9,
} NsStatus;

/**
 * Shadow histogram on a rectangular grid.
 */
typedef struct NsHistogram NsHistogram;

/**
 * Square complex matrix.
 */
typedef struct NsMatrix NsMatrix;

typedef struct NsGrid {
  double re_min;
  double re_max;
  double im_min;
  double im_max;
  size_t nx;
  size_t ny;
} NsGrid;

/**
 * Monte Carlo moments, with the closed-form values when `has_analytic`.
 */
typedef struct NsMoments {
  double mean_re;
  double mean_im;
  double second_abs;
  double variance;
  double std_error_mean;
  double std_error_second_abs;
  double std_error_variance;
  uint64_t n_samples;
  bool has_analytic;
  double analytic_mean_re;
  double analytic_mean_im;
  double analytic_second_abs;
  double analytic_variance;
} NsMoments;

typedef struct NsTrajectoryPoint {
  uint64_t t;
  double re;
  double im;
  bool separable;
  double purity;
  double min_pt_eigenvalue;
} NsTrajectoryPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ns_version(void);

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *ns_last_error_message(void);

/**
 * Looks up a fixture matrix by key (e.g. `"A2"`, `"X1"`, `"U8"`).
 *
 * # Safety
 * `key` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NsStatus ns_matrix_from_catalog(const char *key, struct NsMatrix **out);

/**
 * Builds a `dim x dim` matrix from row-major real and imaginary parts.
 * `im` may be null for a real matrix.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `dim * dim` doubles.
 */
enum NsStatus ns_matrix_from_data(size_t dim,
                                  const double *re,
                                  const double *im,
                                  struct NsMatrix **out);

/**
 * Dimension of `m`, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t ns_matrix_dim(const struct NsMatrix *m);

/**
 * # Safety
 * `m` must be null or a handle not yet freed.
 */
void ns_matrix_free(struct NsMatrix *m);

/**
 * Monte Carlo shadow of `m` over the states described by `restriction`
 * (same syntax as the command line, e.g. `"product:2x2:complex"`). A null
 * `grid` selects a padded bounding box of the numerical range with
 * `bins x bins` cells; otherwise `bins` is ignored.
 *
 * # Safety
 * Pointers must be valid; `grid` may be null.
 */
enum NsStatus ns_shadow_estimate(const struct NsMatrix *m,
                                 const char *restriction,
                                 uint64_t n_samples,
                                 const struct NsGrid *grid,
                                 size_t bins,
                                 uint64_t seed,
                                 struct NsHistogram **out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NsStatus ns_histogram_grid(const struct NsHistogram *h, struct NsGrid *out);

/**
 * Number of draws behind `h`, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
uint64_t ns_histogram_n_samples(const struct NsHistogram *h);

/**
 * Copies the `nx * ny` cell counts, row `iy` (from `im_min`) major.
 *
 * # Safety
 * `buf` must hold `capacity` elements.
 */
enum NsStatus ns_histogram_counts(const struct NsHistogram *h, uint64_t *buf, size_t capacity);

/**
 * Writes the histogram in the command-line CSV layout.
 *
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum NsStatus ns_histogram_write_csv(const struct NsHistogram *h, const char *path);

/**
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void ns_histogram_free(struct NsHistogram *h);

/**
 * Boundary polygon of the numerical range from an `n_angles` sweep. The
 * vertex count is written to `written`; when it exceeds `capacity` the call
 * fails with `BufferTooSmall` and `written` holds the required size.
 *
 * # Safety
 * `re` and `im` must each hold `capacity` doubles.
 */
enum NsStatus ns_numerical_range(const struct NsMatrix *m,
                                 size_t n_angles,
                                 double *re,
                                 double *im,
                                 size_t capacity,
                                 size_t *written);

/**
 * Monte Carlo moments of the restricted shadow alongside the analytic
 * values when a closed form is known for the restriction.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NsStatus ns_moments(const struct NsMatrix *m,
                         const char *restriction,
                         uint64_t n_samples,
                         uint64_t seed,
                         struct NsMoments *out);

/**
 * Two-qubit trajectory from the Bell state; writes `steps + 1` points.
 *
 * # Safety
 * `buf` must hold `capacity` points; `observable` must be a 4x4 handle.
 */
enum NsStatus ns_dynamics_trajectory(double alpha,
                                     double beta,
                                     size_t steps,
                                     const struct NsMatrix *observable,
                                     struct NsTrajectoryPoint *buf,
                                     size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NUMSHADOW_H */

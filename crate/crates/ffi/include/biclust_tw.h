#ifndef BICLUST_TW_H
#define BICLUST_TW_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  BICLUST_STATUS_OK = 0,
  /**
   * Null pointer, zero size or other malformed argument.
   */
  BICLUST_STATUS_INVALID_ARGUMENT = 1,
  BICLUST_STATUS_INVALID_MATRIX = 2,
  BICLUST_STATUS_INVALID_ASSIGNMENT = 3,
  /**
   * A group is empty, constant or has non-positive spread.
   */
  BICLUST_STATUS_DEGENERATE_GROUP = 4,
  BICLUST_STATUS_ALPHA_OUT_OF_RANGE = 5,
  /**
   * No hypothesis up to the maximum was accepted.
   */
  BICLUST_STATUS_NOT_ACCEPTED = 6,
  BICLUST_STATUS_NO_CONVERGENCE = 7,
  /**
   * The requested bicluster or cluster counts do not fit the matrix.
   */
  BICLUST_STATUS_INFEASIBLE = 8,
  BICLUST_STATUS_INVALID_CONFIG = 9,
  BICLUST_STATUS_IO = 10,
  BICLUST_STATUS_TABLE_FORMAT = 11,
  /**
   * The library panicked; the handle arguments are left untouched.
   */
  BICLUST_STATUS_PANIC = 12,
} BiclustStatus;

/**
 * Data family, selecting the entropy of the profile likelihood and the
 * generator preset.
 */
typedef enum {
  BICLUST_FAMILY_GAUSSIAN = 0,
  BICLUST_FAMILY_BERNOULLI = 1,
  BICLUST_FAMILY_POISSON = 2,
} BiclustFamily;

/**
 * Bicluster assignment; label 0 is the background.
 */
typedef struct BiclustAssignment BiclustAssignment;

/**
 * Dense real matrix.
 */
typedef struct BiclustMatrix BiclustMatrix;

/**
 * Outcome of one test.
 */
typedef struct {
  /**
   * Number of biclusters in the tested assignment.
   */
  size_t k0;
  /**
   * Centered and scaled largest eigenvalue.
   */
  double statistic;
  /**
   * Largest eigenvalue of the residual Gram matrix.
   */
  double lambda1;
  double threshold;
  bool reject;
  double a_tw;
  double b_tw;
} BiclustTestResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next library call on the same thread.
 */
const char *biclust_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *biclust_version(void);

/**
 * Copies an `n x p` row-major array into a new matrix.
 *
 * # Safety
 * `data` must point to `n * p` readable doubles and `out` must be writable.
 */
BiclustStatus biclust_matrix_new(const double *data, size_t n, size_t p, BiclustMatrix **out);

/**
 * Reads a matrix CSV file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` must be writable.
 */
BiclustStatus biclust_matrix_read_csv(const char *path, BiclustMatrix **out);

/**
 * # Safety
 * `m` must be a live matrix handle; `n` and `p` must be writable.
 */
BiclustStatus biclust_matrix_dims(const BiclustMatrix *m, size_t *n, size_t *p);

/**
 * Copies the entries in row-major order into `buffer` of length `len`,
 * which must be at least `n * p`.
 *
 * # Safety
 * `m` must be a live matrix handle and `buffer` must hold `len` doubles.
 */
BiclustStatus biclust_matrix_copy(const BiclustMatrix *m, double *buffer, size_t len);

/**
 * # Safety
 * `m` must be null or a handle not yet freed.
 */
void biclust_matrix_free(BiclustMatrix *m);

/**
 * Builds an assignment from `n x p` row-major labels `0..=K`.
 *
 * # Safety
 * `labels` must point to `n * p` readable values and `out` must be writable.
 */
BiclustStatus biclust_assignment_new(const uint32_t *labels,
                                     size_t n,
                                     size_t p,
                                     BiclustAssignment **out);

/**
 * # Safety
 * `g` must be a live assignment handle; `k` must be writable.
 */
BiclustStatus biclust_assignment_k(const BiclustAssignment *g, size_t *k);

/**
 * Copies the labels in row-major order into `buffer` of length `len`.
 *
 * # Safety
 * `g` must be a live assignment handle and `buffer` must hold `len` values.
 */
BiclustStatus biclust_assignment_copy(const BiclustAssignment *g, uint32_t *buffer, size_t len);

/**
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void biclust_assignment_free(BiclustAssignment *g);

/**
 * Upper-tail TW1 quantile `t(alpha)` for `alpha` in `[0.001, 0.5]`.
 *
 * # Safety
 * `out` must be writable.
 */
BiclustStatus biclust_tw1_quantile(double alpha, double *out);

/**
 * Tests whether `g` explains all structure in `m` at level `alpha`.
 *
 * # Safety
 * `m` and `g` must be live handles and `out` must be writable.
 */
BiclustStatus biclust_test(const BiclustMatrix *m,
                           const BiclustAssignment *g,
                           double alpha,
                           BiclustTestResult *out);

/**
 * Smallest accepted `K0 <= k_max` with default localizer settings.
 * Returns `NotAccepted` when every hypothesis is rejected.
 *
 * # Safety
 * `m` must be a live handle and `k_hat` must be writable.
 */
BiclustStatus biclust_select_k(const BiclustMatrix *m,
                               BiclustFamily family,
                               double alpha,
                               size_t k_max,
                               uint64_t seed,
                               size_t *k_hat);

/**
 * Estimates an assignment with `k0` biclusters by simulated annealing.
 *
 * # Safety
 * `m` must be a live handle and `out` must be writable.
 */
BiclustStatus biclust_localize(const BiclustMatrix *m,
                               BiclustFamily family,
                               size_t k0,
                               uint64_t seed,
                               BiclustAssignment **out);

/**
 * Draws an `n x p` matrix with `k` staircase biclusters from the family's
 * default parameters, returning it with the generating assignment.
 *
 * # Safety
 * `matrix` and `assignment` must be writable.
 */
BiclustStatus biclust_generate(BiclustFamily family,
                               size_t k,
                               size_t n,
                               size_t p,
                               uint64_t seed,
                               BiclustMatrix **matrix,
                               BiclustAssignment **assignment);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BICLUST_TW_H */

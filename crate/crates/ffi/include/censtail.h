#ifndef CENSTAIL_H
#define CENSTAIL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CensTailEstimator {
  CENS_TAIL_ESTIMATOR_HILL = 0,
  CENS_TAIL_ESTIMATOR_EFG = 1,
  CENS_TAIL_ESTIMATOR_WW1 = 2,
  CENS_TAIL_ESTIMATOR_WW2 = 3,
  CENS_TAIL_ESTIMATOR_NEW = 4,
} CensTailEstimator;

/**
 * Result codes. `CENS_TAIL_STATUS_OK` is zero.
 */
typedef enum CensTailStatus {
  CENS_TAIL_STATUS_OK = 0,
  CENS_TAIL_STATUS_NULL_POINTER = 1,
  CENS_TAIL_STATUS_INVALID_ARGUMENT = 2,
  CENS_TAIL_STATUS_K_OUT_OF_RANGE = 3,
  CENS_TAIL_STATUS_UNDEFINED = 4,
  CENS_TAIL_STATUS_EMPTY_SAMPLE = 5,
  CENS_TAIL_STATUS_DEGENERATE_NULL = 6,
  CENS_TAIL_STATUS_INTERNAL = 7,
  CENS_TAIL_STATUS_PANIC = 8,
} CensTailStatus;

/**
 * Sorted censored sample.
 */
typedef struct CensTailSample CensTailSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a sample from `n` observed values `z` and indicators `delta`
 * (nonzero = uncensored). On success `*out` owns a handle that must be
 * released with `censtail_sample_free`.
 *
 * # Safety
 * `z` and `delta` must point to `n` readable elements; `out` must be writable.
 */
enum CensTailStatus censtail_sample_new(const double *z,
                                        const uint8_t *delta,
                                        size_t n,
                                        struct CensTailSample **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `sample` must come from `censtail_sample_new` and not be used afterwards.
 */
void censtail_sample_free(struct CensTailSample *sample);

/**
 * Number of observations, or 0 for a null handle.
 *
 * # Safety
 * `sample` must be null or a live handle.
 */
size_t censtail_sample_len(const struct CensTailSample *sample);

/**
 * Evaluates `estimator` at threshold `k`.
 *
 * # Safety
 * `sample` must be a live handle and `out_value` writable.
 */
enum CensTailStatus censtail_estimate(const struct CensTailSample *sample,
                                      enum CensTailEstimator estimator,
                                      size_t k,
                                      double *out_value);

/**
 * Proportion of uncensored observations among the top `k`.
 *
 * # Safety
 * `sample` must be a live handle and `out_value` writable.
 */
enum CensTailStatus censtail_p_hat(const struct CensTailSample *sample,
                                   size_t k,
                                   double *out_value);

/**
 * Estimate with its asymptotic standard error and a normal interval at
 * `level`. Returns `CENS_TAIL_STATUS_UNDEFINED` for estimators without a
 * closed-form standard error.
 *
 * # Safety
 * `sample` must be a live handle; every out-pointer must be writable.
 */
enum CensTailStatus censtail_confidence_interval(const struct CensTailSample *sample,
                                                 enum CensTailEstimator estimator,
                                                 size_t k,
                                                 double level,
                                                 double *out_value,
                                                 double *out_std_err,
                                                 double *out_lower,
                                                 double *out_upper);

/**
 * Kolmogorov–Smirnov and Cramér–von Mises distances at threshold `k`.
 *
 * # Safety
 * `sample` must be a live handle; both out-pointers must be writable.
 */
enum CensTailStatus censtail_gof_statistics(const struct CensTailSample *sample,
                                            size_t k,
                                            double *out_ks,
                                            double *out_cvm);

/**
 * Bootstrap p-values of the two distances (`reps` >= 100).
 *
 * # Safety
 * `sample` must be a live handle; both out-pointers must be writable.
 */
enum CensTailStatus censtail_gof_pvalues(const struct CensTailSample *sample,
                                         size_t k,
                                         size_t reps,
                                         uint64_t seed,
                                         double *out_p_ks,
                                         double *out_p_cvm);

/**
 * Reiss–Thomas choice of `k` in `[k_min, k_max]`.
 *
 * # Safety
 * `sample` must be a live handle and `out_k` writable.
 */
enum CensTailStatus censtail_select_k(const struct CensTailSample *sample,
                                      enum CensTailEstimator estimator,
                                      double theta,
                                      size_t k_min,
                                      size_t k_max,
                                      size_t *out_k);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *censtail_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CENSTAIL_H */

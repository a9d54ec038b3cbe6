#ifndef CONDTAU_H
#define CONDTAU_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum CondtauStatus {
  CondtauStatus_Ok = 0,
  CondtauStatus_InvalidArgument = 1,
  /**
   * The estimator is undefined at the query point (no weight in the
   * window, or a single observation carries all of it).
   */
  CondtauStatus_Undefined = 2,
  CondtauStatus_NullPointer = 3,
  CondtauStatus_InternalError = 4,
} CondtauStatus;

/**
 * Opaque sample handle.
 */
typedef struct CondtauSample CondtauSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buffer` (truncated to
 * `length` bytes including the terminating NUL). Returns the full message
 * length.
 *
 * # Safety
 * `buffer` must point to `length` writable bytes, or be null.
 */
uintptr_t condtau_last_error(char *buffer, uintptr_t length);

/**
 * Builds a sample of n observations with a p-dimensional covariate.
 * `z` is row-major with n*p entries. Returns null on invalid input.
 *
 * # Safety
 * `x1` and `x2` must point to n doubles, `z` to n*p doubles.
 */
struct CondtauSample *condtau_sample_new(const double *x1,
                                         const double *x2,
                                         const double *z,
                                         uintptr_t n,
                                         uintptr_t p);

/**
 * Frees a sample handle. Null is ignored.
 *
 * # Safety
 * `sample` must come from `condtau_sample_new` and not be used afterwards.
 */
void condtau_sample_free(struct CondtauSample *sample);

/**
 * Conditional Kendall's tau estimate at one query point.
 * `kind`: 1, 2, 3 for the raw estimators, 4 for the rescaled one.
 * `kernel`: 0 Epanechnikov, 1 Gaussian, 2 uniform box.
 *
 * # Safety
 * `z` must point to p doubles (the sample's covariate dimension); `out`
 * must be a valid pointer.
 */
enum CondtauStatus condtau_estimate(const struct CondtauSample *sample,
                                    const double *z,
                                    int kind,
                                    int kernel,
                                    double h,
                                    double *out);

/**
 * Rule-of-thumb bandwidth alpha * sigma_hat(Z) * n^{-1/(4+p)}.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CondtauStatus condtau_rule_of_thumb(const struct CondtauSample *sample,
                                         double alpha,
                                         double *out);

/**
 * Leave-pair-out cross-validated bandwidth for the concordance function
 * g_k (k = 1, 2 or 3), searched on the default geometric grid.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CondtauStatus condtau_cv_bandwidth(const struct CondtauSample *sample,
                                        int k,
                                        uintptr_t n_pairs,
                                        double *out);

/**
 * Pointwise confidence interval around the estimate at `z`.
 * Writes lower bound, upper bound and standard error.
 *
 * # Safety
 * `z` must point to p doubles; the three output pointers must be valid.
 */
enum CondtauStatus condtau_confidence_interval(const struct CondtauSample *sample,
                                               const double *z,
                                               int kind,
                                               int kernel,
                                               double h,
                                               double level,
                                               int truncate,
                                               double *out_lower,
                                               double *out_upper,
                                               double *out_se);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONDTAU_H */

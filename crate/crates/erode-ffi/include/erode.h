#ifndef ERODE_H
#define ERODE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of a fallible call. Zero is success; everything else is a
 * failure described by [`erode_last_error_message`].
 */
typedef enum ErodeStatus {
  /**
   * The call succeeded.
   */
  ErodeStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  ErodeStatus_NullArgument = 1,
  /**
   * A text argument was not valid UTF-8.
   */
  ErodeStatus_InvalidUtf8 = 2,
  /**
   * An argument value was outside its documented domain.
   */
  ErodeStatus_InvalidArgument = 3,
  /**
   * Input text (CSV, store, or model format) could not be parsed.
   */
  ErodeStatus_Parse = 4,
  /**
   * A record failed validation.
   */
  ErodeStatus_Validation = 5,
  /**
   * Fitting failed (empty data, unsupported degree, singular system).
   */
  ErodeStatus_Fit = 6,
  /**
   * Optimization failed (bad range, unsupported method, bad parameters).
   */
  ErodeStatus_Optimize = 7,
  /**
   * A file could not be read or written.
   */
  ErodeStatus_Io = 8,
  /**
   * The caller-provided buffer is too small; the required size was
   * written to the count output.
   */
  ErodeStatus_BufferTooSmall = 9,
  /**
   * An internal panic was caught at the boundary.
   */
  ErodeStatus_Panic = 10,
} ErodeStatus;

/**
 * Opaque polynomial model handle.
 */
typedef struct ErodeModel ErodeModel;

/**
 * Opaque experiment store handle.
 */
typedef struct ErodeStore ErodeStore;

/**
 * Result of a minimization, mirrored into a plain C struct.
 */
typedef struct ErodeOptimum {
  /**
   * Power argument of the minimum, in watts.
   */
  double argmin_w;
  /**
   * Model value at the minimum, in seconds.
   */
  double min_s;
  /**
   * Number of model evaluations performed.
   */
  uint64_t evaluations;
  /**
   * Whether the method's own convergence criterion was met.
   */
  bool converged;
  /**
   * Whether the minimum is physically meaningful (positive time).
   */
  bool physically_valid;
} ErodeOptimum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or an empty
 * string if nothing failed yet. The pointer stays valid until the next
 * failing call on the same thread; copy the text if it must outlive that.
 */
const char *erode_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by a function documented to
 * transfer string ownership, or null. Freeing anything else, or freeing
 * twice, is undefined behavior.
 */
void erode_string_free(char *s);

/**
 * Creates an empty experiment store. Free with [`erode_store_free`].
 */
struct ErodeStore *erode_store_new(void);

/**
 * Destroys a store handle. Null is ignored.
 *
 * # Safety
 * `store` must be a handle from this library that has not been freed yet,
 * or null.
 */
void erode_store_free(struct ErodeStore *store);

/**
 * Loads a store from its line format on disk into a new handle.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must point to
 * writable storage for one pointer.
 */
enum ErodeStatus erode_store_open(const char *path, struct ErodeStore **out);

/**
 * Writes the store to disk in its line format.
 *
 * # Safety
 * `store` must be a live handle; `path` a valid NUL-terminated string.
 */
enum ErodeStatus erode_store_save(const struct ErodeStore *store, const char *path);

/**
 * Number of records in the store; 0 for a null handle.
 *
 * # Safety
 * `store` must be a live handle or null.
 */
uintptr_t erode_store_count(const struct ErodeStore *store);

/**
 * Parses a record CSV document and adds every valid row to the store.
 *
 * Unlike most functions here, the outputs are always written: `added`
 * and `rejected` (each optional) receive the number of rows stored and
 * refused. Returns `Ok` only if every row was accepted; otherwise the
 * status and [`erode_last_error_message`] describe the first failure,
 * while accepted rows remain in the store.
 *
 * # Safety
 * `store` must be a live handle; `csv` a valid NUL-terminated string;
 * `added` and `rejected` must each be null or writable.
 */
enum ErodeStatus erode_store_ingest_csv(struct ErodeStore *store,
                                        const char *csv,
                                        uintptr_t *added,
                                        uintptr_t *rejected);

/**
 * Fits a polynomial of the given degree to the records matching the
 * filter. Each filter string is an exact field match; pass null for any
 * field to leave it unconstrained. The fitted model is returned through
 * `out`; free it with [`erode_model_free`].
 *
 * # Safety
 * `store` must be a live handle; filter strings must each be null or
 * valid NUL-terminated strings; `out` must be writable.
 */
enum ErodeStatus erode_store_fit(const struct ErodeStore *store,
                                 const char *po_material,
                                 const char *to_material,
                                 const char *machine,
                                 const char *operation,
                                 const char *regime,
                                 uintptr_t degree,
                                 struct ErodeModel **out);

/**
 * Destroys a model handle. Null is ignored.
 *
 * # Safety
 * `model` must be a handle from this library that has not been freed yet,
 * or null.
 */
void erode_model_free(struct ErodeModel *model);

/**
 * Parses a model from its line format (see the library documentation).
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be writable.
 */
enum ErodeStatus erode_model_from_text(const char *text, struct ErodeModel **out);

/**
 * Serializes the model to its line format. The returned string is owned
 * by the caller (free with [`erode_string_free`]); null is returned on
 * failure with the error recorded for [`erode_last_error_message`].
 *
 * # Safety
 * `model` must be a live handle or null.
 */
char *erode_model_to_text(const struct ErodeModel *model);

/**
 * One of the bundled reference models: "linear", "quadratic", or "cubic".
 *
 * # Safety
 * `label` must be a valid NUL-terminated string; `out` must be writable.
 */
enum ErodeStatus erode_reference_model(const char *label, struct ErodeModel **out);

/**
 * Degree of the model; 0 for a null handle.
 *
 * # Safety
 * `model` must be a live handle or null.
 */
uintptr_t erode_model_degree(const struct ErodeModel *model);

/**
 * Copies the ascending coefficients (constant term first) into `buf`.
 * `count` always receives the number of coefficients; if `capacity` is
 * smaller than that, nothing else is written and the status is
 * `BufferTooSmall`. A null `buf` with `capacity` 0 queries the size.
 *
 * # Safety
 * `model` must be a live handle; `buf` must be writable for `capacity`
 * doubles (or null when `capacity` is 0); `count` must be writable.
 */
enum ErodeStatus erode_model_coefficients(const struct ErodeModel *model,
                                          double *buf,
                                          uintptr_t capacity,
                                          uintptr_t *count);

/**
 * Fitted power domain of the model, in watts.
 *
 * # Safety
 * `model` must be a live handle; `lo` and `hi` must be writable.
 */
enum ErodeStatus erode_model_domain(const struct ErodeModel *model, double *lo, double *hi);

/**
 * Evaluates the model at power `p` (watts), writing seconds to `out`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum ErodeStatus erode_model_evaluate(const struct ErodeModel *model, double p, double *out);

/**
 * Derivative of the model with respect to power, as a new handle.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum ErodeStatus erode_model_derivative(const struct ErodeModel *model, struct ErodeModel **out);

/**
 * Exact minimization over `[lo, hi]` for models up to degree 3.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum ErodeStatus erode_minimize_analytic(const struct ErodeModel *model,
                                         double lo,
                                         double hi,
                                         struct ErodeOptimum *out);

/**
 * Uniform grid search over `[lo, hi]` with `points` samples (at least 2,
 * endpoints included).
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum ErodeStatus erode_minimize_grid(const struct ErodeModel *model,
                                     double lo,
                                     double hi,
                                     uintptr_t points,
                                     struct ErodeOptimum *out);

/**
 * Pure random search: `samples` uniform draws over `[lo, hi]` from a
 * deterministic generator seeded with `seed`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum ErodeStatus erode_minimize_pure_random(const struct ErodeModel *model,
                                            double lo,
                                            double hi,
                                            uintptr_t samples,
                                            uint64_t seed,
                                            struct ErodeOptimum *out);

/**
 * Controlled random search: `samples_per_iteration` draws per window (at
 * least 2), window recentered on the best point and shrunk by
 * `shrink_factor` (strictly between zero and one) each iteration, stopping
 * once the window is narrower than `width_tolerance` watts or after
 * `max_iterations`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum ErodeStatus erode_minimize_controlled_random(const struct ErodeModel *model,
                                                  double lo,
                                                  double hi,
                                                  uintptr_t samples_per_iteration,
                                                  double shrink_factor,
                                                  double width_tolerance,
                                                  uintptr_t max_iterations,
                                                  uint64_t seed,
                                                  struct ErodeOptimum *out);

/**
 * Finds every power in `[lo, hi]` at which the model attains `target`
 * seconds, in ascending order. `count` always receives the number of
 * solutions; if `capacity` is smaller, nothing is copied and the status
 * is `BufferTooSmall`. A null `buf` with `capacity` 0 queries the size.
 * Zero solutions is a successful, empty result.
 *
 * # Safety
 * `model` must be a live handle; `buf` must be writable for `capacity`
 * doubles (or null when `capacity` is 0); `count` must be writable.
 */
enum ErodeStatus erode_inverse_solve(const struct ErodeModel *model,
                                     double target,
                                     double lo,
                                     double hi,
                                     double *buf,
                                     uintptr_t capacity,
                                     uintptr_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERODE_H */

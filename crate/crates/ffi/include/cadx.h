#ifndef CADX_H
#define CADX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CadxStatus {
  CADX_STATUS_OK = 0,
  CADX_STATUS_NULL_POINTER = 1,
  CADX_STATUS_INVALID_ARGUMENT = 2,
  CADX_STATUS_DATA_ERROR = 3,
  CADX_STATUS_NUMERIC_ERROR = 4,
  CADX_STATUS_PANIC = 5,
} CadxStatus;

typedef enum CadxLabel {
  CADX_LABEL_BENIGN = 0,
  CADX_LABEL_MALIGNANT = 1,
  CADX_LABEL_INCONCLUSIVE = 2,
} CadxLabel;

/**
 * Opaque handle; immutable after load, so it may be shared across threads.
 */
typedef struct CadxModel CadxModel;

/**
 * Rates are NaN where undefined (zero denominator).
 */
typedef struct CadxMetrics {
  double sensitivity;
  double specificity;
  double ppv;
  double npv;
  double accuracy;
  double inconclusive_rate;
  double mcc;
} CadxMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread; empty if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cadx_last_error(void);

/**
 * Loads a model file. On success `*out` owns a handle to release with
 * [`cadx_model_free`].
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CadxStatus cadx_model_load(const char *path, struct CadxModel **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `model` must come from [`cadx_model_load`] and not be used afterwards.
 */
void cadx_model_free(struct CadxModel *model);

/**
 * Input length expected by [`cadx_model_predict`]; 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t cadx_model_num_features(const struct CadxModel *model);

/**
 * Name of feature `index`, owned by the handle; null when out of range.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
const char *cadx_model_feature_name(const struct CadxModel *model, size_t index);

/**
 * Classifies one raw feature row of `len` values.
 *
 * # Safety
 * `x` must point to `len` doubles; `score` and `label` must be valid.
 */
enum CadxStatus cadx_model_predict(const struct CadxModel *model,
                                   const double *x,
                                   size_t len,
                                   double *score,
                                   enum CadxLabel *label);

/**
 * Diagnostic rates for a confusion table.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CadxStatus cadx_metrics(size_t tp,
                             size_t fp,
                             size_t tn,
                             size_t fn_,
                             size_t inconclusive,
                             struct CadxMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CADX_H */

#ifndef EXEMPLARS_H
#define EXEMPLARS_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ExStatus {
  EX_STATUS_OK = 0,
  EX_STATUS_NULL_POINTER = 1,
  EX_STATUS_INVALID_ARGUMENT = 2,
  EX_STATUS_INVALID_DATA = 3,
  EX_STATUS_NO_CONVERGENCE = 4,
  EX_STATUS_BUFFER_TOO_SMALL = 5,
  EX_STATUS_INTERNAL = 6,
} ExStatus;

typedef enum ExMethod {
  /**
   * Farthest-first search with lazy re-evaluation.
   */
  EX_METHOD_FFS = 0,
  EX_METHOD_FFS_NAIVE = 1,
  EX_METHOD_RANDOM = 2,
} ExMethod;

/**
 * Unit-norm points, optionally labeled.
 */
typedef struct ExDataset ExDataset;

/**
 * Selected exemplar indices.
 */
typedef struct ExExemplarSet ExExemplarSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into the library from this thread.
 */
const char *ex_last_error(void);

/**
 * Builds a dataset from `n` column-major points of dimension `dim`; columns
 * are normalized. `labels` may be null, otherwise it holds `n` entries.
 *
 * # Safety
 * `values` must point to `dim * n` doubles and `labels` (if non-null) to `n`
 * entries. `out` must be writable.
 */
enum ExStatus ex_dataset_new(const double *values,
                             size_t dim,
                             size_t n,
                             const size_t *labels,
                             struct ExDataset **out);

/**
 * Samples a labeled union of `n_subspaces` random subspaces of `ambient_dim`.
 *
 * # Safety
 * `dims` and `counts` must each hold `n_subspaces` entries; `out` must be
 * writable.
 */
enum ExStatus ex_dataset_synth(size_t ambient_dim,
                               const size_t *dims,
                               const size_t *counts,
                               size_t n_subspaces,
                               double noise_sigma,
                               uint64_t seed,
                               struct ExDataset **out);

/**
 * Number of points, or 0 for null.
 *
 * # Safety
 * `ds` must be null or a live dataset.
 */
size_t ex_dataset_len(const struct ExDataset *ds);

/**
 * Ambient dimension, or 0 for null.
 *
 * # Safety
 * `ds` must be null or a live dataset.
 */
size_t ex_dataset_dim(const struct ExDataset *ds);

/**
 * Copies the labels into `out` (capacity `cap`).
 *
 * # Safety
 * `ds` must be a live dataset and `out` writable for `cap` entries.
 */
enum ExStatus ex_dataset_labels(const struct ExDataset *ds, size_t *out, size_t cap);

/**
 * # Safety
 * `ds` must be null or a dataset not freed before.
 */
void ex_dataset_free(struct ExDataset *ds);

/**
 * Selects `k` exemplars. `lambda` is ignored by `Random`.
 *
 * # Safety
 * `ds` must be a live dataset; `out` must be writable.
 */
enum ExStatus ex_select(const struct ExDataset *ds,
                        enum ExMethod method,
                        double lambda,
                        size_t k,
                        uint64_t seed,
                        struct ExExemplarSet **out);

/**
 * Number of exemplars, or 0 for null.
 *
 * # Safety
 * `set` must be null or a live exemplar set.
 */
size_t ex_exemplars_len(const struct ExExemplarSet *set);

/**
 * Copies the indices in selection order.
 *
 * # Safety
 * `set` must be a live exemplar set and `out` writable for `cap` entries.
 */
enum ExStatus ex_exemplars_indices(const struct ExExemplarSet *set, size_t *out, size_t cap);

/**
 * # Safety
 * `set` must be null or an exemplar set not freed before.
 */
void ex_exemplars_free(struct ExExemplarSet *set);

/**
 * Clusters every point of `ds` over the exemplars; writes one label per point.
 *
 * # Safety
 * `ds` and `set` must be live; `labels_out` writable for `cap` entries.
 */
enum ExStatus ex_cluster(const struct ExDataset *ds,
                         const struct ExExemplarSet *set,
                         double lambda,
                         size_t t,
                         size_t n_clusters,
                         uint64_t seed,
                         size_t *labels_out,
                         size_t cap);

/**
 * Classifies every point using the dataset labels of the exemplars.
 *
 * # Safety
 * `ds` and `set` must be live; `labels_out` writable for `cap` entries.
 */
enum ExStatus ex_classify(const struct ExDataset *ds,
                          const struct ExExemplarSet *set,
                          double lambda,
                          size_t *labels_out,
                          size_t cap);

/**
 * Best-matching accuracy in percent.
 *
 * # Safety
 * `truth` and `pred` must hold `n` entries; `out` must be writable.
 */
enum ExStatus ex_accuracy(const size_t *truth, const size_t *pred, size_t n, double *out);

/**
 * Best-matching F-score in percent.
 *
 * # Safety
 * `truth` and `pred` must hold `n` entries; `out` must be writable.
 */
enum ExStatus ex_fscore(const size_t *truth, const size_t *pred, size_t n, double *out);

/**
 * Imbalance of per-class counts in [0, 1].
 *
 * # Safety
 * `counts` must hold `n` entries; `out` must be writable.
 */
enum ExStatus ex_imbalance(const size_t *counts, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXEMPLARS_H */

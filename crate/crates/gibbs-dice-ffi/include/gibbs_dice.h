/* C ABI for the gibbs-dice library. Generated by cbindgen; do not edit. */

#ifndef GIBBS_DICE_H
#define GIBBS_DICE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Kind of die a dataset describes.
 */
typedef enum GdDatasetKind {
  GD_DATASET_KIND_CUBOID = 0,
  GD_DATASET_KIND_GENERAL_DIE = 1,
  GD_DATASET_KIND_XXY_FAMILY = 2,
} GdDatasetKind;

/**
 * Energy normalization for cuboid geometries.
 */
typedef enum GdNormalization {
  GD_NORMALIZATION_HALF_DIAGONAL = 0,
  GD_NORMALIZATION_GEOMETRIC_MEAN = 1,
} GdNormalization;

/**
 * Status codes returned by every fallible function.
 */
typedef enum GdStatus {
  GD_STATUS_OK = 0,
  GD_STATUS_INVALID_GEOMETRY = 1,
  GD_STATUS_INVALID_PARAMETER = 2,
  GD_STATUS_DIMENSION_MISMATCH = 3,
  GD_STATUS_EMPTY_DATA = 4,
  GD_STATUS_DEGENERATE_CELL = 5,
  GD_STATUS_UNKNOWN_DATASET = 6,
  GD_STATUS_PARSE_ERROR = 7,
  GD_STATUS_NULL_POINTER = 8,
  GD_STATUS_INVALID_UTF8 = 9,
} GdStatus;

/**
 * Opaque bootstrap result handle.
 */
typedef struct GdBootstrapResult GdBootstrapResult;

/**
 * Opaque dataset handle.
 */
typedef struct GdDataset GdDataset;

/**
 * Maximum-likelihood fit outcome.
 */
typedef struct GdFitResult {
  double beta_hat;
  double neg_log_likelihood;
  uint32_t iterations;
  bool converged;
  bool at_upper_bound;
} GdFitResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread. The pointer stays valid
 * until the next failing call on the same thread. Never null.
 */
const char *gd_last_error_message(void);

/**
 * Per-face energies of a homogeneous cuboid, face order 1..=6.
 *
 * # Safety
 * `out_energies` must point to at least 6 writable doubles.
 */
enum GdStatus gd_cuboid_energies(double s1,
                                 double s2,
                                 double s3,
                                 enum GdNormalization norm,
                                 double *out_energies);

/**
 * Energies of a general die: `E_i = h_i / scale`.
 *
 * # Safety
 * `heights` must point to `k` readable doubles and `out_energies` to `k`
 * writable doubles.
 */
enum GdStatus gd_general_energies(const double *heights,
                                  uintptr_t k,
                                  double scale,
                                  double *out_energies);

/**
 * Gibbs probabilities `p_i = exp(-beta E_i)/Z(beta)`.
 *
 * # Safety
 * `energies` must point to `k` readable doubles and `out_probs` to `k`
 * writable doubles.
 */
enum GdStatus gd_gibbs_probabilities(const double *energies,
                                     uintptr_t k,
                                     double beta,
                                     double *out_probs);

/**
 * Solid-angle (Simpson) face probabilities of a cuboid, face order 1..=6.
 *
 * # Safety
 * `out_probs` must point to at least 6 writable doubles.
 */
enum GdStatus gd_simpson_probabilities(double s1, double s2, double s3, double *out_probs);

/**
 * Probability of the xx-state of an xxy-cuboid (geometric-mean energies).
 *
 * # Safety
 * `out_pxx` must point to a writable double.
 */
enum GdStatus gd_xxy_pxx(double sx, double sy, double beta, double *out_pxx);

/**
 * Maximum-likelihood fit of beta for one die from per-state energies and
 * counts.
 *
 * # Safety
 * `energies` and `counts` must point to `k` readable elements each;
 * `out_fit` must be writable.
 */
enum GdStatus gd_fit_beta(const double *energies,
                          const uint64_t *counts,
                          uintptr_t k,
                          struct GdFitResult *out_fit);

/**
 * Load a bundled dataset by name (control-I, control-II, budden,
 * heilbronner, ushape-I, ushape-II).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out_dataset` must be writable.
 * A returned handle must be released with [`gd_dataset_free`].
 */
enum GdStatus gd_dataset_load_builtin(const char *name, struct GdDataset **out_dataset);

/**
 * Parse an experiment file from text (same format as the bundled files).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out_dataset` must be writable.
 * A returned handle must be released with [`gd_dataset_free`].
 */
enum GdStatus gd_dataset_parse(const char *text, struct GdDataset **out_dataset);

/**
 * Release a dataset handle. A null pointer is ignored.
 *
 * # Safety
 * `dataset` must have been returned by a `gd_dataset_*` constructor and not
 * freed before.
 */
void gd_dataset_free(struct GdDataset *dataset);

/**
 * Kind of die the dataset describes.
 *
 * # Safety
 * `dataset` must be a live handle.
 */
enum GdDatasetKind gd_dataset_kind(const struct GdDataset *dataset);

/**
 * Number of xxy rows, or of resting states for single-die datasets.
 *
 * # Safety
 * `dataset` must be a live handle.
 */
uintptr_t gd_dataset_len(const struct GdDataset *dataset);

/**
 * Maximum-likelihood fit of beta under the dataset's own normalization
 * convention (half-diagonal for cuboids, bundled scale for general dice,
 * geometric mean for xxy families).
 *
 * # Safety
 * `dataset` must be a live handle; `out_fit` must be writable.
 */
enum GdStatus gd_dataset_fit(const struct GdDataset *dataset, struct GdFitResult *out_fit);

/**
 * Pearson chi-square of the dataset against the Gibbs model at `beta`,
 * together with the cell count `m` of the chi2/m rule.
 *
 * # Safety
 * `dataset` must be a live handle; `out_chi2` and `out_m` must be writable.
 */
enum GdStatus gd_dataset_chi_square(const struct GdDataset *dataset,
                                    double beta,
                                    double *out_chi2,
                                    uintptr_t *out_m);

/**
 * Run the parametric bootstrap on an xxy dataset. Pass a negative `beta0`
 * to use the maximum-likelihood fit. The returned handle must be released
 * with [`gd_bootstrap_free`].
 *
 * # Safety
 * `dataset` must be a live xxy handle; `out_result` must be writable.
 */
enum GdStatus gd_bootstrap_run(const struct GdDataset *dataset,
                               double epsilon,
                               uint32_t iterations,
                               uint64_t master_seed,
                               double beta0,
                               struct GdBootstrapResult **out_result);

/**
 * # Safety
 * `result` must be a live handle.
 */
double gd_bootstrap_p_value(const struct GdBootstrapResult *result);

/**
 * # Safety
 * `result` must be a live handle.
 */
double gd_bootstrap_chi2_observed(const struct GdBootstrapResult *result);

/**
 * Number of simulated chi-square values.
 *
 * # Safety
 * `result` must be a live handle.
 */
uintptr_t gd_bootstrap_len(const struct GdBootstrapResult *result);

/**
 * Copy the simulated chi-square sample (iteration order) into `buffer`.
 *
 * # Safety
 * `result` must be a live handle and `buffer` must point to `len` writable
 * doubles, with `len` at least [`gd_bootstrap_len`].
 */
enum GdStatus gd_bootstrap_chi2_sample(const struct GdBootstrapResult *result,
                                       double *buffer,
                                       uintptr_t len);

/**
 * Release a bootstrap result handle. A null pointer is ignored.
 *
 * # Safety
 * `result` must have been returned by [`gd_bootstrap_run`] and not freed
 * before.
 */
void gd_bootstrap_free(struct GdBootstrapResult *result);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GIBBS_DICE_H */

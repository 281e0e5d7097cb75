#ifndef SQRTNOT_NOISE_H
#define SQRTNOT_NOISE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SQRTNOT_LEAD_A 0

#define SQRTNOT_LEAD_B 1

#define SQRTNOT_LEAD_C 2

#define SQRTNOT_LEAD_D 3

typedef enum SqrtnotStatus {
  SQRTNOT_STATUS_OK = 0,
  SQRTNOT_STATUS_NULL_POINTER = 1,
  SQRTNOT_STATUS_INVALID_PARAMETER = 2,
  SQRTNOT_STATUS_NON_FINITE_ENTRY = 3,
  SQRTNOT_STATUS_INVALID_LEAD = 4,
  SQRTNOT_STATUS_INVALID_MEASUREMENT = 5,
  SQRTNOT_STATUS_INVALID_TARGET = 6,
  SQRTNOT_STATUS_INVALID_BIAS = 7,
  SQRTNOT_STATUS_UNDEFINED_LIMIT = 8,
  SQRTNOT_STATUS_INVALID_RANGE = 9,
  SQRTNOT_STATUS_INVALID_TRIAL = 10,
  SQRTNOT_STATUS_INDEX_OUT_OF_RANGE = 11,
  SQRTNOT_STATUS_PANIC = 12,
} SqrtnotStatus;

/**
 * Opaque 4x4 scattering matrix.
 */
typedef struct SqrtnotMatrix SqrtnotMatrix;

/**
 * Opaque list of sweep records.
 */
typedef struct SqrtnotSweep SqrtnotSweep;

/**
 * One row of a sweep; noise values are in prefactor units.
 */
typedef struct SqrtnotRecord {
  double kappa;
  double probabilities[4];
  double fidelity;
  double s_dd;
  double s_cd;
  double unitarity_dev;
  double norm_error;
} SqrtnotRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static, NUL-terminated description of a status code.
 */
const char *sqrtnot_status_message(enum SqrtnotStatus status);

/**
 * Version string of the library, NUL-terminated and static.
 */
const char *sqrtnot_version(void);

/**
 * Builds the sqrt(NOT) matrix for `kappa`.
 *
 * # Safety
 * `out` must be valid for writing one pointer. The handle written there must
 * be released with [`sqrtnot_matrix_free`].
 */
enum SqrtnotStatus sqrtnot_matrix_build(double kappa, struct SqrtnotMatrix **out);

/**
 * Builds a matrix from 16 real and 16 imaginary parts in row-major order
 * (row = outgoing lead, column = incoming lead). `imag` may be NULL for a real matrix.
 *
 * # Safety
 * `real` (and `imag` when non-NULL) must point to 16 readable doubles; `out`
 * must be valid for writing one pointer.
 */
enum SqrtnotStatus sqrtnot_matrix_from_parts(const double *real,
                                             const double *imag,
                                             struct SqrtnotMatrix **out);

/**
 * Releases a matrix handle. NULL is ignored.
 *
 * # Safety
 * `m` must be NULL or a handle from this library that has not been freed.
 */
void sqrtnot_matrix_free(struct SqrtnotMatrix *m);

/**
 * Reads entry (outgoing `row`, incoming `col`).
 *
 * # Safety
 * `m` must be a live handle; `re` and `im` must be writable.
 */
enum SqrtnotStatus sqrtnot_matrix_entry(const struct SqrtnotMatrix *m,
                                        uint32_t row,
                                        uint32_t col,
                                        double *re,
                                        double *im);

/**
 * Largest entry of `|S^dagger S - I|`.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum SqrtnotStatus sqrtnot_unitarity_deviation(const struct SqrtnotMatrix *m, double *out);

/**
 * Row and column probability-conservation errors.
 *
 * # Safety
 * `m` must be a live handle; both out-pointers must be writable.
 */
enum SqrtnotStatus sqrtnot_norm_diagnostics(const struct SqrtnotMatrix *m,
                                            double *row_error,
                                            double *col_error);

/**
 * Exit probabilities of the four leads for a unit input in `input`.
 *
 * # Safety
 * `m` must be a live handle; `out` must point to 4 writable doubles.
 */
enum SqrtnotStatus sqrtnot_output_probabilities(const struct SqrtnotMatrix *m,
                                                uint32_t input,
                                                double *out);

/**
 * Fidelity of the output column for `input` against `(0, 0, 1/sqrt2, 1/sqrt2)`.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum SqrtnotStatus sqrtnot_fidelity(const struct SqrtnotMatrix *m, uint32_t input, double *out);

/**
 * Auto noise in `lead_index` for a bias on `input`, in prefactor units.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum SqrtnotStatus sqrtnot_shot_noise_auto(const struct SqrtnotMatrix *m,
                                           uint32_t lead_index,
                                           uint32_t input,
                                           double *out);

/**
 * Cross noise between two leads for a bias on `input`, in prefactor units.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum SqrtnotStatus sqrtnot_shot_noise_cross(const struct SqrtnotMatrix *m,
                                            uint32_t first,
                                            uint32_t second,
                                            uint32_t input,
                                            double *out);

/**
 * `(e^3 V / h) coth(e V / 2 k_B T)` in A^2/Hz.
 *
 * # Safety
 * `out` must be writable.
 */
enum SqrtnotStatus sqrtnot_noise_prefactor(double bias_voltage, double temperature, double *out);

/**
 * Sweeps kappa over `points` uniformly spaced values in `[kappa_min, kappa_max]`.
 *
 * # Safety
 * `out` must be valid for writing one pointer; release the handle with
 * [`sqrtnot_sweep_free`].
 */
enum SqrtnotStatus sqrtnot_sweep_new(double kappa_min,
                                     double kappa_max,
                                     size_t points,
                                     uint32_t input,
                                     struct SqrtnotSweep **out);

/**
 * Number of records in a sweep; 0 for NULL.
 *
 * # Safety
 * `sweep` must be NULL or a live handle.
 */
size_t sqrtnot_sweep_len(const struct SqrtnotSweep *sweep);

/**
 * Copies record `index` into `out`.
 *
 * # Safety
 * `sweep` must be a live handle; `out` must be writable.
 */
enum SqrtnotStatus sqrtnot_sweep_record(const struct SqrtnotSweep *sweep,
                                        size_t index,
                                        struct SqrtnotRecord *out);

/**
 * Releases a sweep handle. NULL is ignored.
 *
 * # Safety
 * `sweep` must be NULL or a handle from this library that has not been freed.
 */
void sqrtnot_sweep_free(struct SqrtnotSweep *sweep);

/**
 * Monte-Carlo partition noise of `electrons` electrons transmitted with
 * probability `transmission`.
 *
 * # Safety
 * `variance` and `standard_error` must be writable.
 */
enum SqrtnotStatus sqrtnot_mc_partition_noise(double transmission,
                                              uint64_t electrons,
                                              uint64_t seed,
                                              double *variance,
                                              double *standard_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SQRTNOT_NOISE_H */

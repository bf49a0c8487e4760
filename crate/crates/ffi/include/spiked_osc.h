#ifndef SPIKED_OSC_H
#define SPIKED_OSC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum SpikedOscStatus {
  SPIKED_OSC_STATUS_OK = 0,
  SPIKED_OSC_STATUS_NULL_POINTER = 1,
  SPIKED_OSC_STATUS_OUT_OF_RANGE = 2,
  SPIKED_OSC_STATUS_DOMAIN = 3,
  SPIKED_OSC_STATUS_ASYMMETRY = 4,
  SPIKED_OSC_STATUS_CONVERGENCE = 5,
  SPIKED_OSC_STATUS_BRACKET = 6,
  SPIKED_OSC_STATUS_STIFFNESS = 7,
  SPIKED_OSC_STATUS_DIVERGENCE = 8,
  SPIKED_OSC_STATUS_PANIC = 9,
} SpikedOscStatus;

/*
 Assembled Hamiltonian matrix.
 */
typedef struct SpikedOscMatrix SpikedOscMatrix;

/*
 Model parameters.
 */
typedef struct SpikedOscModel SpikedOscModel;

/*
 Eigenvalues and the `A` they were obtained at.
 */
typedef struct SpikedOscSpectrum SpikedOscSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message into `buf` (NUL-terminated, truncated to
 `len` bytes) and returns the full message length, or 0 when no error has
 been recorded. `buf` may be null to query the length.

 # Safety
 `buf` must be null or valid for `len` bytes.
 */
size_t spiked_osc_last_error(char *buf, size_t len);

/*
 Creates a model `-d² + B x² + λ/x^α` in `dim` dimensions with angular
 momentum `l`.

 # Safety
 `out` must be valid for writes.
 */
enum SpikedOscStatus spiked_osc_model_new(double alpha,
                                          double lambda,
                                          double b,
                                          uint32_t dim,
                                          uint32_t l,
                                          struct SpikedOscModel **out);

/*
 # Safety
 `model` must be null or a handle from [`spiked_osc_model_new`] not yet freed.
 */
void spiked_osc_model_free(struct SpikedOscModel *model);

/*
 Diagonalises the `d`×`d` matrix. With `optimize_a` nonzero the ground
 state is minimised over `A` and `fixed_a` is ignored.

 # Safety
 `model` must be a live handle; `out` must be valid for writes.
 */
enum SpikedOscStatus spiked_osc_solve(const struct SpikedOscModel *model,
                                      size_t d,
                                      bool optimize_a,
                                      double fixed_a,
                                      struct SpikedOscSpectrum **out);

/*
 Minimises each of the lowest `levels` eigenvalues over its own `A`.

 # Safety
 `model` must be a live handle; `out` must be valid for writes.
 */
enum SpikedOscStatus spiked_osc_solve_levels(const struct SpikedOscModel *model,
                                             size_t d,
                                             size_t levels,
                                             struct SpikedOscSpectrum **out);

/*
 Number of eigenvalues held by `spectrum`.

 # Safety
 `spectrum` must be a live handle; `out` must be valid for writes.
 */
enum SpikedOscStatus spiked_osc_spectrum_len(const struct SpikedOscSpectrum *spectrum, size_t *out);

/*
 Eigenvalue `k` in ascending order.

 # Safety
 `spectrum` must be a live handle; `out` must be valid for writes.
 */
enum SpikedOscStatus spiked_osc_spectrum_eigenvalue(const struct SpikedOscSpectrum *spectrum,
                                                    size_t k,
                                                    double *out);

/*
 `A` used for level `k`: the per-level minimiser when levels were
 optimised separately, else the common minimiser. Fails with
 `OUT_OF_RANGE` for spectra computed at a fixed `A`.

 # Safety
 `spectrum` must be a live handle; `out` must be valid for writes.
 */
enum SpikedOscStatus spiked_osc_spectrum_optimal_a(const struct SpikedOscSpectrum *spectrum,
                                                   size_t k,
                                                   double *out);

/*
 # Safety
 `spectrum` must be null or a live handle.
 */
void spiked_osc_spectrum_free(struct SpikedOscSpectrum *spectrum);

/*
 Assembles the `d`×`d` Hamiltonian at basis parameter `a`.

 # Safety
 `model` must be a live handle; `out` must be valid for writes.
 */
enum SpikedOscStatus spiked_osc_matrix_build(const struct SpikedOscModel *model,
                                             double a,
                                             size_t d,
                                             struct SpikedOscMatrix **out);

/*
 Order of the matrix.

 # Safety
 `matrix` must be a live handle; `out` must be valid for writes.
 */
enum SpikedOscStatus spiked_osc_matrix_dim(const struct SpikedOscMatrix *matrix, size_t *out);

/*
 Entry `(row, col)`, zero-based.

 # Safety
 `matrix` must be a live handle; `out` must be valid for writes.
 */
enum SpikedOscStatus spiked_osc_matrix_get(const struct SpikedOscMatrix *matrix,
                                           size_t row,
                                           size_t col,
                                           double *out);

/*
 # Safety
 `matrix` must be null or a live handle.
 */
void spiked_osc_matrix_free(struct SpikedOscMatrix *matrix);

/*
 Eigenvalue of level `level` by direct integration of the radial equation.

 # Safety
 `model` must be a live handle; `out` must be valid for writes.
 */
enum SpikedOscStatus spiked_osc_oracle(const struct SpikedOscModel *model,
                                       size_t level,
                                       double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPIKED_OSC_H */

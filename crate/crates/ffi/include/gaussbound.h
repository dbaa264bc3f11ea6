#ifndef GAUSSBOUND_H
#define GAUSSBOUND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GbStatus {
  GB_STATUS_OK = 0,
  /**
   * Null pointer or out-of-range argument.
   */
  GB_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Input rejected by the library (shape, symmetry, validity, parameters).
   */
  GB_STATUS_INVALID_INPUT = 2,
  /**
   * Solver or decomposition failed numerically.
   */
  GB_STATUS_NUMERICAL = 3,
  /**
   * Separability could not be decided within tolerance.
   */
  GB_STATUS_INCONCLUSIVE = 4,
  /**
   * Output buffer too short; the required length was written back.
   */
  GB_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * Internal panic caught at the boundary.
   */
  GB_STATUS_PANIC = 6,
} GbStatus;

typedef enum GbClass {
  GB_CLASS_SEPARABLE = 0,
  GB_CLASS_BOUND_ENTANGLED = 1,
  GB_CLASS_FREE_ENTANGLED = 2,
} GbClass;

/**
 * Opaque covariance matrix.
 */
typedef struct GbCovariance GbCovariance;

typedef struct GbVerdict {
  enum GbClass kind;
  double ppt_margin;
  /**
   * NaN when the PPT test alone decided.
   */
  double slack;
  size_t iterations;
} GbVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty if none. Valid
 * until the next failing call on the same thread.
 */
const char *gb_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gb_version(void);

/**
 * Covariance matrix from `(2 n_modes)^2` row-major interleaved entries.
 *
 * # Safety
 * `data` must point to `4 * n_modes * n_modes` readable doubles and `out`
 * to writable storage for one handle.
 */
enum GbStatus gb_covariance_new(size_t n_modes, const double *data, struct GbCovariance **out);

/**
 * # Safety
 * `h` must be null or a handle from this library not yet freed.
 */
void gb_covariance_free(struct GbCovariance *h);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum GbStatus gb_covariance_copy(const struct GbCovariance *h, struct GbCovariance **out);

/**
 * Number of modes, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t gb_covariance_n_modes(const struct GbCovariance *h);

/**
 * Row-major entries into `buf`; `*len` holds the capacity on entry and the
 * required length on return.
 *
 * # Safety
 * `h` must be a live handle, `len` writable and `buf` writable for `*len` doubles.
 */
enum GbStatus gb_covariance_data(const struct GbCovariance *h, double *buf, size_t *len);

/**
 * One of the four published family members, `k` in 1..=4.
 *
 * # Safety
 * `out` must be writable.
 */
enum GbStatus gb_preset_example(uint32_t k, struct GbCovariance **out);

/**
 * Family member for `beta[2]` and `alpha[8]`.
 *
 * # Safety
 * `beta` and `alpha` must point to 2 and 8 doubles; `out` must be writable.
 */
enum GbStatus gb_family_construct(const double *beta,
                                  const double *alpha,
                                  struct GbCovariance **out);

/**
 * Output of the preparation circuit for thermal parameter `kappa` and
 * squeezing `tau`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GbStatus gb_fig1_output(double kappa, double tau, struct GbCovariance **out);

/**
 * Uncertainty-relation test; `tol <= 0` selects the default tolerance.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum GbStatus gb_is_valid(const struct GbCovariance *h, double tol, bool *out);

/**
 * PPT test with party A given by `n_a` 0-based modes; B is the rest.
 *
 * # Safety
 * `h` must be a live handle, `modes_a` readable for `n_a` entries and `out` writable.
 */
enum GbStatus gb_is_ppt(const struct GbCovariance *h,
                        const size_t *modes_a,
                        size_t n_a,
                        double tol,
                        bool *out);

/**
 * Full classification. Non-positive tolerances select the defaults.
 *
 * # Safety
 * As for `gb_is_ppt`.
 */
enum GbStatus gb_classify(const struct GbCovariance *h,
                          const size_t *modes_a,
                          size_t n_a,
                          double tol_sep,
                          double tol_ppt,
                          struct GbVerdict *out);

/**
 * Symplectic eigenvalues in ascending order; `*len` as for
 * `gb_covariance_data`.
 *
 * # Safety
 * As for `gb_covariance_data`.
 */
enum GbStatus gb_symplectic_eigenvalues(const struct GbCovariance *h, double *buf, size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAUSSBOUND_H */

#ifndef HEUN_H
#define HEUN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum HeunStatus {
  HEUN_STATUS_OK = 0,
  HEUN_STATUS_NULL_POINTER = 1,
  HEUN_STATUS_INVALID_ARGUMENT = 2,
  HEUN_STATUS_INAPPLICABLE = 3,
  HEUN_STATUS_NON_CONVERGENCE = 4,
  HEUN_STATUS_TAIL_TOO_LARGE = 5,
  HEUN_STATUS_NOT_FOUND = 6,
  HEUN_STATUS_NUMERICAL = 7,
  HEUN_STATUS_PANIC = 8,
} HeunStatus;

typedef enum HeunFamily {
  HEUN_FAMILY_A1 = 0,
  HEUN_FAMILY_A2 = 1,
  HEUN_FAMILY_B4 = 2,
  HEUN_FAMILY_B3 = 3,
  HEUN_FAMILY_C = 4,
} HeunFamily;

typedef enum HeunTerminationKind {
  HEUN_TERMINATION_KIND_ALPHA_OVER_EPS = 0,
  HEUN_TERMINATION_KIND_DELTA_INT = 1,
  HEUN_TERMINATION_KIND_GAMMA_DELTA_ALPHA = 2,
} HeunTerminationKind;

/**
 * Opaque built series.
 */
typedef struct HeunSeries HeunSeries;

/**
 * Opaque accessory-parameter spectrum.
 */
typedef struct HeunSpectrum HeunSpectrum;

typedef struct HeunComplex {
  double re;
  double im;
} HeunComplex;

/**
 * `(γ, δ, ε, α, q)` of the confluent Heun equation.
 */
typedef struct HeunCheParams {
  struct HeunComplex gamma;
  struct HeunComplex delta;
  struct HeunComplex epsilon;
  struct HeunComplex alpha;
  struct HeunComplex q;
} HeunCheParams;

typedef struct HeunTermination {
  enum HeunFamily family;
  enum HeunTerminationKind kind;
  uintptr_t n;
} HeunTermination;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *heun_version(void);

/**
 * Message for the last failure on this thread, or NULL if none.
 */
const char *heun_last_error_message(void);

/**
 * `₁F₁(a; c; x)` with default tolerance.
 *
 * # Safety
 * `out` must be NULL or point to writable memory for one `HeunComplex`.
 */
enum HeunStatus heun_1f1(struct HeunComplex a,
                         struct HeunComplex c,
                         struct HeunComplex x,
                         struct HeunComplex *out);

/**
 * Parameters of the equation after `z → 1 − z`.
 *
 * # Safety
 * `params` must point to a valid `HeunCheParams`; `out` to writable memory
 * for one.
 */
enum HeunStatus heun_transform(const struct HeunCheParams *params, struct HeunCheParams *out);

/**
 * Builds `n_terms + 1` coefficients of an expansion with the default α₀.
 * `s0` is read only when `has_s0` is true (required for B4). On success
 * `*out` receives a handle to free with [`heun_series_free`].
 *
 * # Safety
 * `params` must point to a valid `HeunCheParams`; `out` to a writable
 * handle slot.
 */
enum HeunStatus heun_series_build(const struct HeunCheParams *params,
                                  enum HeunFamily family,
                                  uintptr_t n_terms,
                                  bool has_s0,
                                  struct HeunComplex s0,
                                  struct HeunSeries **out);

/**
 * Evaluates the series and its derivative at `z`. Fails with
 * `HEUN_STATUS_TAIL_TOO_LARGE` when the tail estimate exceeds `tol`.
 * `derivative` and `tail` may be NULL.
 *
 * # Safety
 * `series` must be a live handle; non-NULL out-pointers must be writable.
 */
enum HeunStatus heun_series_eval(const struct HeunSeries *series,
                                 struct HeunComplex z,
                                 double tol,
                                 struct HeunComplex *value,
                                 struct HeunComplex *derivative,
                                 double *tail);

/**
 * Number of stored coefficients (0 for NULL).
 *
 * # Safety
 * `series` must be NULL or a live handle.
 */
uintptr_t heun_series_len(const struct HeunSeries *series);

/**
 * # Safety
 * `series` must be a live handle and `out` writable.
 */
enum HeunStatus heun_series_coefficient(const struct HeunSeries *series,
                                        uintptr_t n,
                                        struct HeunComplex *out);

/**
 * True when the series ends; `*last` (if non-NULL) receives the last
 * nonzero index.
 *
 * # Safety
 * `series` must be NULL or a live handle; `last` NULL or writable.
 */
bool heun_series_terminated(const struct HeunSeries *series, uintptr_t *last);

/**
 * # Safety
 * `series` must be NULL or a handle from [`heun_series_build`] not yet freed.
 */
void heun_series_free(struct HeunSeries *series);

/**
 * Smallest admissible termination condition for the default α₀ branch;
 * `HEUN_STATUS_NOT_FOUND` if none.
 *
 * # Safety
 * `params` must point to a valid `HeunCheParams`; `out` must be writable.
 */
enum HeunStatus heun_detect_termination(const struct HeunCheParams *params,
                                        enum HeunFamily family,
                                        struct HeunTermination *out);

/**
 * Roots of `a_{N+1}(q) = 0` for a detected condition (`q` in `params` is
 * ignored). `s0` is read only when `has_s0` is true.
 *
 * # Safety
 * `params` and `condition` must point to valid values; `out` to a
 * writable handle slot.
 */
enum HeunStatus heun_q_spectrum(const struct HeunCheParams *params,
                                const struct HeunTermination *condition,
                                bool has_s0,
                                struct HeunComplex s0,
                                struct HeunSpectrum **out);

/**
 * Number of roots (0 for NULL).
 *
 * # Safety
 * `spectrum` must be NULL or a live handle.
 */
uintptr_t heun_spectrum_len(const struct HeunSpectrum *spectrum);

/**
 * # Safety
 * `spectrum` must be a live handle and `out` writable.
 */
enum HeunStatus heun_spectrum_root(const struct HeunSpectrum *spectrum,
                                   uintptr_t k,
                                   struct HeunComplex *out);

/**
 * # Safety
 * `spectrum` must be NULL or a handle from [`heun_q_spectrum`] not yet freed.
 */
void heun_spectrum_free(struct HeunSpectrum *spectrum);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEUN_H */

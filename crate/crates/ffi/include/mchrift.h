#ifndef MCHRIFT_H
#define MCHRIFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Region codes written by [`mchrift_asymptotic_eval`].
 */
#define MCHRIFT_REGION_ONE 1

#define MCHRIFT_REGION_TWO 2

typedef enum MchriftStatus {
  MCHRIFT_STATUS_OK = 0,
  MCHRIFT_STATUS_NULL_POINTER = 1,
  MCHRIFT_STATUS_INVALID_INPUT = 2,
  MCHRIFT_STATUS_NON_DECAYING_DATUM = 3,
  MCHRIFT_STATUS_NON_FINITE = 4,
  MCHRIFT_STATUS_INTEGRATION = 5,
  MCHRIFT_STATUS_SPECTRAL_POINT = 6,
  MCHRIFT_STATUS_SINGULAR = 7,
  MCHRIFT_STATUS_NO_CONVERGENCE = 8,
  MCHRIFT_STATUS_OUT_OF_RANGE = 9,
  MCHRIFT_STATUS_IO = 10,
  MCHRIFT_STATUS_OTHER = 11,
  MCHRIFT_STATUS_PANIC = 12,
} MchriftStatus;

typedef struct MchriftPainleve MchriftPainleve;

typedef struct MchriftProblem MchriftProblem;

typedef struct MchriftScattering MchriftScattering;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t mchrift_last_error(char *buf, size_t len);

/**
 * Reflection data of a datum such as `"gaussian(0.3,2)"` sampled on
 * [−half_width, half_width) with `points` nodes.
 *
 * # Safety
 * `datum` must be a valid C string and `out` a valid pointer.
 */
enum MchriftStatus mchrift_scattering_new(const char *datum,
                                          double half_width,
                                          size_t points,
                                          double z_max,
                                          size_t per_side,
                                          struct MchriftScattering **out);

/**
 * r(z) on the real axis by interpolation of the sampled data.
 *
 * # Safety
 * `handle` must come from [`mchrift_scattering_new`]; `re` and `im` must be valid.
 */
enum MchriftStatus mchrift_scattering_reflection(const struct MchriftScattering *handle,
                                                 double z,
                                                 double *re,
                                                 double *im);

/**
 * # Safety
 * `handle` must be null or come from [`mchrift_scattering_new`], freed once.
 */
void mchrift_scattering_free(struct MchriftScattering *handle);

/**
 * Solution of v'' = sv + 2v³ with v ~ κ Ai(s) as s → +∞ on [s_min, s_max].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MchriftStatus mchrift_painleve_new(double kappa,
                                        double s_min,
                                        double s_max,
                                        struct MchriftPainleve **out);

/**
 * v(s), v'(s) and ∫ₛ^∞ v² at one point of the tabulated range.
 *
 * # Safety
 * `handle` must come from [`mchrift_painleve_new`]; output pointers must be valid.
 */
enum MchriftStatus mchrift_painleve_eval(const struct MchriftPainleve *handle,
                                         double s,
                                         double *v,
                                         double *v_prime,
                                         double *tail);

/**
 * # Safety
 * `handle` must be null or come from [`mchrift_painleve_new`], freed once.
 */
void mchrift_painleve_free(struct MchriftPainleve *handle);

/**
 * Asymptotic problem from scattering data and `count` eigen records laid
 * out as Re ζ, Im ζ, Re C, Im C. `vii_sign` is 0 for the theorem sign and 1
 * for the opposite one. The scattering handle is not consumed.
 *
 * # Safety
 * `scattering` must be valid, `records` must hold 4·count doubles (or be
 * null when count is 0) and `out` must be valid.
 */
enum MchriftStatus mchrift_problem_new(const struct MchriftScattering *scattering,
                                       const double *records,
                                       size_t count,
                                       double c_cap,
                                       int32_t vii_sign,
                                       struct MchriftProblem **out);

/**
 * u(x, t) from the transition-region expansion. `region` receives
 * [`MCHRIFT_REGION_ONE`] or [`MCHRIFT_REGION_TWO`].
 *
 * # Safety
 * `handle` must come from [`mchrift_problem_new`]; output pointers must be valid.
 */
enum MchriftStatus mchrift_asymptotic_eval(const struct MchriftProblem *handle,
                                           double x,
                                           double t,
                                           double *u,
                                           int32_t *region);

/**
 * # Safety
 * `handle` must be null or come from [`mchrift_problem_new`], freed once.
 */
void mchrift_problem_free(struct MchriftProblem *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MCHRIFT_H */

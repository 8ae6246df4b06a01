#ifndef HARDY_SEP_H
#define HARDY_SEP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  HS_BRANCH_PLUS = 0,
  HS_BRANCH_MINUS = 1,
} HsBranch;

/**
 * Status code returned by every entry point.
 */
typedef enum {
  HS_STATUS_OK = 0,
  /**
   * A required pointer was null or a string was not UTF-8.
   */
  HS_STATUS_NULL_OR_INVALID_ARGUMENT = 1,
  /**
   * Parameters outside the admissible range.
   */
  HS_STATUS_INVALID_PARAMS = 2,
  /**
   * A solver failed or no solution exists for the request.
   */
  HS_STATUS_SOLVER_ERROR = 3,
  /**
   * Internal panic caught at the boundary.
   */
  HS_STATUS_PANIC = 4,
} HsStatus;

/**
 * Opaque separable harmonic.
 */
typedef struct HsHarmonic HsHarmonic;

/**
 * Opaque nonlinear profile.
 */
typedef struct HsProfile HsProfile;

/**
 * Boundary exponents and critical values; thresholds that do not exist are `+inf`.
 */
typedef struct {
  double alpha_plus;
  double alpha_minus;
  double lambda_alpha_plus;
  double p_c;
  double p_ko;
  double p_c_minus;
  double mu_star;
} HsExponents;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next failing call.
 */
const char *hs_last_error(void);

/**
 * Library version as a static string.
 */
const char *hs_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void hs_string_free(char *s);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
HsStatus hs_exponents(uint32_t n, double mu, HsExponents *out);

/**
 * Regime classification for `(n, mu, p)` as a JSON string; free with [`hs_string_free`].
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
HsStatus hs_regime_json(uint32_t n, double mu, double p, char **out);

/**
 * Eigenvalue `Lambda_{s,m}` (`s >= 1`).
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
HsStatus hs_eigenvalue(uint32_t n, double mu, size_t s, uint32_t m, double tol, double *out);

/**
 * Builds a harmonic. `kind` is one of `h_plus`, `h_minus`, `H_plus`, `H_minus`, `H_gamma`;
 * pass NaN for `gamma` and 0 for `s` when not needed.
 *
 * # Safety
 * `kind` must be null or a NUL-terminated string; `out` null or valid for writes.
 */
HsStatus hs_harmonic_new(const char *kind,
                         uint32_t n,
                         double mu,
                         double gamma,
                         size_t s,
                         uint32_t m,
                         double tol,
                         HsHarmonic **out);

/**
 * Value at a point `x` of length `len` (must equal `n`, `x[0] > 0`).
 *
 * # Safety
 * `h` must be a live handle, `x` valid for `len` reads, `out` valid for writes.
 */
HsStatus hs_harmonic_eval(const HsHarmonic *h, const double *x, size_t len, double *out);

/**
 * # Safety
 * `h` must be a live handle, `out` valid for writes.
 */
HsStatus hs_harmonic_to_json(const HsHarmonic *h, char **out);

/**
 * # Safety
 * `h` must be null or a handle from [`hs_harmonic_new`] not yet freed.
 */
void hs_harmonic_free(HsHarmonic *h);

/**
 * Solves for the separable profile on the given branch.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
HsStatus hs_profile_solve(uint32_t n,
                          double mu,
                          double p,
                          HsBranch branch,
                          double tol,
                          HsProfile **out);

/**
 * Angular profile `v(t)`, `t` in `[0, 1]`.
 *
 * # Safety
 * `h` must be a live handle, `out` valid for writes.
 */
HsStatus hs_profile_v(const HsProfile *h, double t, double *out);

/**
 * `lim v(t) / t^alpha` as `t -> 0`.
 *
 * # Safety
 * `h` must be a live handle, `out` valid for writes.
 */
HsStatus hs_profile_v_limit(const HsProfile *h, double *out);

/**
 * Solution `u(x) = |x|^{-2/(p-1)} v(x_1/|x|)` at a point of length `len == n`.
 *
 * # Safety
 * `h` must be a live handle, `x` valid for `len` reads, `out` valid for writes.
 */
HsStatus hs_profile_eval(const HsProfile *h, const double *x, size_t len, double *out);

/**
 * Profile artifact as JSON, same format as the `profile` subcommand.
 *
 * # Safety
 * `h` must be a live handle, `out` valid for writes.
 */
HsStatus hs_profile_to_json(const HsProfile *h, char **out);

/**
 * # Safety
 * `h` must be null or a handle from [`hs_profile_solve`] not yet freed.
 */
void hs_profile_free(HsProfile *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARDY_SEP_H */

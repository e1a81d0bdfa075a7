#ifndef GAPPROB_H
#define GAPPROB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum GapprobStatus {
  GapprobOk = 0,
  GapprobNullPointer = 1,
  GapprobInvalidArgument = 2,
  GapprobDomainError = 3,
  GapprobNoConvergence = 4,
  GapprobNumericalError = 5,
} GapprobStatus;

/**
 * Opaque Painlevé-II (Hastings–McLeod) solution handle.
 */
typedef struct GapprobHastingsMcleod GapprobHastingsMcleod;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *gapprob_status_message(enum GapprobStatus status);

/**
 * Solves the Hastings–McLeod problem on `[s_min, s_max]`
 * (`-8 <= s_min < s_max`, `s_max >= 8`) and returns a handle.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot. The handle must be
 * released with [`gapprob_hastings_mcleod_free`].
 */
enum GapprobStatus gapprob_hastings_mcleod_new(double s_min,
                                               double s_max,
                                               struct GapprobHastingsMcleod **out);

/**
 * Releases a handle returned by [`gapprob_hastings_mcleod_new`].
 *
 * # Safety
 * `handle` must have been produced by `gapprob_hastings_mcleod_new` and
 * not freed before; `NULL` is ignored.
 */
void gapprob_hastings_mcleod_free(struct GapprobHastingsMcleod *handle);

/**
 * `q(s)` and `q'(s)` of the Hastings–McLeod solution.
 *
 * # Safety
 * `handle` must be live; `q`/`q_prime` may be `NULL` to skip an output.
 */
enum GapprobStatus gapprob_hastings_mcleod_q(const struct GapprobHastingsMcleod *handle,
                                             double s,
                                             double *q,
                                             double *q_prime);

/**
 * Tracy–Widom log gap `log det(Id - K_Ai|[s,∞))` through the Painlevé
 * route, and its derivative `p(s)`.
 *
 * # Safety
 * `handle` must be live; `log_gap`/`p` may be `NULL` to skip an output.
 */
enum GapprobStatus gapprob_tw_log_gap(const struct GapprobHastingsMcleod *handle,
                                      double s,
                                      double *log_gap,
                                      double *p);

/**
 * Airy function `Ai(x)` and derivative (|x| <= 30).
 *
 * # Safety
 * `ai`/`ai_prime` may be `NULL` to skip an output.
 */
enum GapprobStatus gapprob_airy_ai(double x, double *ai, double *ai_prime);

/**
 * Airy kernel `K_Ai(x, y)` (closed form).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GapprobStatus gapprob_airy_kernel(double x, double y, double *out);

/**
 * Pearcey kernel `K_P(x, y; tau)`; `route` 0 = double contour,
 * 1 = Laplace factorisation.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GapprobStatus gapprob_pearcey_kernel(double x,
                                          double y,
                                          double tau,
                                          int32_t route,
                                          double *out);

/**
 * `det(Id - K_Ai χ_I)` over the interval union described by `endpoints`
 * (`n` values; `unbounded_tail` turns the last endpoint into `[a_N, ∞)`).
 *
 * # Safety
 * `endpoints` must point to `n` doubles; `out` must be valid.
 */
enum GapprobStatus gapprob_airy_gap_probability(const double *endpoints,
                                                uintptr_t n,
                                                bool unbounded_tail,
                                                double *out);

/**
 * `det(Id - K_P χ_I)` over a bounded interval union (`n` even).
 *
 * # Safety
 * `endpoints` must point to `n` doubles; `out` must be valid.
 */
enum GapprobStatus gapprob_pearcey_gap_probability(const double *endpoints,
                                                   uintptr_t n,
                                                   double tau,
                                                   int32_t route,
                                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAPPROB_H */

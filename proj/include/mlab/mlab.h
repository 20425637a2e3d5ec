#ifndef MLAB_H
#define MLAB_H

/* C API for the markovlab core: Markov factors, Remez ratios and witness
 * diagnostics for polynomials on cuspidal planar domains
 *
 *     K = { (x,y) : 0 <= x <= 1,  a*x^k <= y <= f(x) },
 *
 * where f is one of four cusp profiles (or a caller-supplied function).
 * All state lives behind the opaque mlab_domain handle; every entry point
 * returns an mlab_status, and a human-readable message for the most recent
 * failure on the calling thread is available from mlab_last_error().
 *
 * Unless stated otherwise, output pointers may not be NULL and arrays must
 * provide the advertised capacity.
 */

#include <stdint.h>

#if defined(_WIN32)
#  define MLAB_API __declspec(dllexport)
#else
#  define MLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  MLAB_OK = 0,
  MLAB_ERR_PARAM = 1,        /* parameter outside its documented domain      */
  MLAB_ERR_HYPOTHESIS = 2,   /* domain fails a cusp-geometry hypothesis      */
  MLAB_ERR_CONDITIONING = 3, /* degree cap / ill-conditioned basis           */
  MLAB_ERR_QUADRATURE = 4,   /* quadrature failed to converge within budget  */
  MLAB_ERR_INSUFFICIENT_DATA = 5, /* fewer than two usable points in a fit   */
  MLAB_ERR_INTERNAL = 6
} mlab_status;

/* Cusp profile families for the upper boundary f on (0,1]:
 *   POWER     f(x) = b * x^r
 *   LOGLOG    f(x) = x^r * ln(-ln(b*x))        requires 0 < b < 1/e
 *   NEGLOG    f(x) = -x^r * ln(b*x)            requires 0 < b <= 1/e
 *   LOGPOWER  f(x) = x^r * (-ln(b*x))^c        requires 0 < b < 1
 */
typedef enum {
  MLAB_FAMILY_POWER = 0,
  MLAB_FAMILY_LOGLOG = 1,
  MLAB_FAMILY_NEGLOG = 2,
  MLAB_FAMILY_LOGPOWER = 3
} mlab_family;

typedef enum { MLAB_AXIS_X = 0, MLAB_AXIS_Y = 1 } mlab_axis;

/* Which ratio a factor series tabulates. */
typedef enum {
  MLAB_KIND_MARKOV_X = 0, /* ||dP/dx||_p / ||P||_p over K                  */
  MLAB_KIND_MARKOV_Y = 1, /* ||dP/dy||_p / ||P||_p over K                  */
  MLAB_KIND_REMEZ = 2     /* ||P||_p over K / ||P||_p over K_{x>=x_lo}     */
} mlab_series_kind;

typedef enum {
  MLAB_METHOD_EXACT_EIGEN = 0, /* p = 2 symmetric eigenproblem (exact)      */
  MLAB_METHOD_SEARCH = 1       /* seeded random + coordinate ascent, any p  */
} mlab_method;

/* Extrapolation models for the predicted exponent sequence tau_n:
 *   PLAIN            tau_n ~ c0
 *   INVLOG           tau_n ~ c0 + c1/ln n
 *   INVLOG_LOGLOG    tau_n ~ c0 + c1/ln n + c2*ln(ln n)/ln n
 */
typedef enum {
  MLAB_MODEL_PLAIN = 0,
  MLAB_MODEL_INVLOG = 1,
  MLAB_MODEL_INVLOG_LOGLOG = 2
} mlab_exponent_model;

typedef struct mlab_domain mlab_domain; /* opaque */

/* Quadrature controls. Zero-initialise and/or call mlab_quad_opts_default()
 * to get the standard scheme (geometric grading toward the cusp, ratio 0.5,
 * 40 panels, relative tolerance 1e-10, adaptive rule for non-even p). */
typedef struct {
  double grading_ratio;   /* in (0,1); successive panel-width ratio        */
  int32_t graded_panels;  /* >= 1; panels between x=1 and the cusp         */
  int32_t base_gauss_order; /* floor for the y-rule order; 0 = automatic   */
  double rel_tol;         /* target relative accuracy for adaptive paths   */
  int32_t p_adaptive;     /* nonzero: allow adaptive rule for non-even p   */
} mlab_quad_opts;

MLAB_API void mlab_quad_opts_default(mlab_quad_opts* opts);

/* Version string of the library ("major.minor.patch"). */
MLAB_API const char* mlab_version(void);

/* Message describing the most recent error on this thread ("" if none). */
MLAB_API const char* mlab_last_error(void);

/* ------------------------------------------------------------------ */
/* domains                                                             */

/* Create a domain with lower boundary a*x^k and upper boundary from the
 * given family. Parameter c is read only for MLAB_FAMILY_LOGPOWER.
 * Requires a > 0, k >= 2 and family parameters in range. */
MLAB_API mlab_status mlab_domain_create(double a, int32_t k, mlab_family family,
                                        double r, double b, double c,
                                        mlab_domain** out);

/* Create a domain whose upper boundary is a caller-supplied function.
 * `deriv` may be NULL, in which case operations needing f' are rejected. */
MLAB_API mlab_status mlab_domain_create_custom(
    double a, int32_t k, double (*value)(double x, void* ctx),
    double (*deriv)(double x, void* ctx), void* ctx, mlab_domain** out);

MLAB_API void mlab_domain_free(mlab_domain* d);

/* Boundary ordinates at x in [0,1]: lo = a*x^k, hi = f(x). */
MLAB_API mlab_status mlab_domain_boundaries(const mlab_domain* d, double x,
                                            double* lo, double* hi);

/* Closed-form f'(x) for x in (0,1]; at x == 0 returns the limit value 0
 * and sets *is_limit = 1 (when the limit exists for the family). */
MLAB_API mlab_status mlab_domain_f_prime(const mlab_domain* d, double x,
                                         double* value, int32_t* is_limit);

/* Point membership (boundary inclusive). */
MLAB_API mlab_status mlab_domain_contains(const mlab_domain* d, double x,
                                          double y, int32_t* inside);

/* ------------------------------------------------------------------ */
/* hypothesis checks and predicted exponent                            */

typedef struct {
  char name[32];    /* e.g. "f(0)=0", "convexity of f"                   */
  int32_t pass;
  double worst_x;   /* grid point with the largest violation             */
  double violation; /* signed magnitude of the worst violation           */
} mlab_check;

#define MLAB_MAX_CHECKS 8

typedef struct {
  int32_t valid;      /* all checks passed                               */
  int32_t num_checks; /* <= MLAB_MAX_CHECKS                              */
  mlab_check checks[MLAB_MAX_CHECKS];
} mlab_validity_report;

/* Certify the cusp-geometry hypotheses on a graded grid (grid_points >= 16;
 * pass 0 for the default 1024). Always fills *report on MLAB_OK; the report
 * itself says whether the domain is valid. */
MLAB_API mlab_status mlab_domain_validate(const mlab_domain* d,
                                          int32_t grid_points,
                                          mlab_validity_report* report);

/* Exponent sequence tau_n = 2 - ln f'(1/n^2) / ln n on n = 2,4,8,...,n_max
 * plus a fitted extrapolation. Arrays receive up to `cap` leading entries;
 * *count reports how many exist (the call fails with MLAB_ERR_PARAM only if
 * cap < count). Requires n_max >= 16.  */
MLAB_API mlab_status mlab_domain_predicted_exponent(
    const mlab_domain* d, int64_t n_max, mlab_exponent_model model,
    int64_t* ns, double* taus, int32_t cap, int32_t* count,
    double* extrapolated, double* residual_rms);

/* ------------------------------------------------------------------ */
/* factor series, fits                                                 */

/* Tabulate a factor series for degrees n_min..n_max (0 <= n_min <= n_max).
 *
 *   kind MARKOV_X/MARKOV_Y: sup of the derivative/norm ratio over degree-n
 *     polynomials; method EXACT_EIGEN requires p = 2, method SEARCH works
 *     for any p >= 1 and uses `budget` ratio evaluations seeded by `seed`.
 *   kind REMEZ: p must be 2; the truncation abscissa is 1/n^2 per degree
 *     when x_lo_override < 0, or fixed at x_lo_override in [0,1) (0 means
 *     no truncation, so every ratio is 1).
 *
 * `threads` 0 means: $MLAB_THREADS if set, else 1. Results are independent
 * of the thread count, bit for bit. On a mid-series failure the status of
 * the failing degree is returned and *count holds the number of leading
 * degrees that did complete (their values are valid in ns/values).
 */
MLAB_API mlab_status mlab_factor_series(const mlab_domain* d,
                                        mlab_series_kind kind, double p,
                                        int32_t n_min, int32_t n_max,
                                        mlab_method method, int64_t budget,
                                        uint64_t seed,
                                        const mlab_quad_opts* quad,
                                        double x_lo_override, int32_t threads,
                                        int32_t* ns, double* values,
                                        int32_t cap, int32_t* count);

/* Least-squares fit of ln(value) against ln(n) over window entries with
 * n_lo <= n <= n_hi (pass 0,0 for the full series). Entries with value <= 0
 * are skipped; fewer than two usable points is an error. */
MLAB_API mlab_status mlab_fit_exponent(const int32_t* ns, const double* values,
                                       int32_t count, int32_t n_lo,
                                       int32_t n_hi, double* slope,
                                       double* intercept,
                                       double* residual_rms);

/* ------------------------------------------------------------------ */
/* witness diagnostics                                                 */

/* Admissibility of the Jacobi weight pair for the witness construction:
 * omega*p + p/2 - 2 > 2*k*(p+1), with omega > -1, sigma > -1, p >= 1. */
MLAB_API mlab_status mlab_admissible(double omega, double p, int32_t k,
                                     int32_t* ok);

/* Smallest integer omega that is admissible with one unit of slack. */
MLAB_API mlab_status mlab_auto_omega(double p, int32_t k, double* omega);

/* Derivative/norm ratio of the witness polynomial y * J_n(1-x) where J_n is
 * the Jacobi polynomial with weights (omega, sigma):
 *   rho        = ||dU/dy||_p(K) / ||U||_p(K)
 *   eta_prime  = f'(1/n^2)
 *   normalized = rho * eta_prime / n^2
 * One entry per degree n in n_min..n_max (n >= 1, n_max <= 64). */
MLAB_API mlab_status mlab_witness_series(const mlab_domain* d, double omega,
                                         double sigma, double p, int32_t n_min,
                                         int32_t n_max,
                                         const mlab_quad_opts* quad,
                                         int32_t* ns, double* rho,
                                         double* eta_prime, double* normalized,
                                         int32_t cap, int32_t* count);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MLAB_H */

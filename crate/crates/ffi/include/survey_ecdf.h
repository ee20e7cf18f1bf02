#ifndef SURVEY_ECDF_H
#define SURVEY_ECDF_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

#define SVY_OK 0

#define SVY_ERR_NULL_POINTER 1

#define SVY_ERR_INVALID_ARGUMENT 2

#define SVY_ERR_DEGENERATE_DESIGN 3

#define SVY_ERR_ZERO_INCLUSION_PROBABILITY 4

#define SVY_ERR_EMPTY_SAMPLE 5

#define SVY_ERR_QUANTILE_UNDEFINED 6

#define SVY_ERR_DERIVATIVE_UNDEFINED 7

#define SVY_ERR_DEGENERATE_BANDWIDTH 8

#define SVY_ERR_CALIBRATION 9

#define SVY_ERR_CAPACITY 10

#define SVY_ERR_INDEX 11

#define SVY_ERR_ZERO_VARIANCE 12

#define SVY_ERR_SCENARIO 13

#define SVY_ERR_BUFFER_LENGTH 14

#define SVY_ERR_PANIC 99

#define SVY_ESTIMATOR_HT 0

#define SVY_ESTIMATOR_HAJEK 1

// Lower-inverse quantile `inf{t : F(t) >= alpha}`.
#define SVY_QUANTILE_INVERSE 0

// Linear interpolation between order statistics on the cumulative-weight scale.
#define SVY_QUANTILE_INTERPOLATED 1

// Opaque sampling design.
typedef struct SvyDesign SvyDesign;

// Opaque weighted empirical distribution function.
typedef struct SvyStepFunction SvyStepFunction;

// Design constants, mirroring the library struct.
typedef struct SvyDesignConstants {
  double lambda;
  double mu_pi1;
  double mu_pi2;
  double gamma_pi1;
  double gamma_pi2;
  double d_n;
} SvyDesignConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *svy_version(void);

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *svy_last_error_message(void);

// Simple random sampling without replacement of `n` out of `population`.
//
// # Safety
// `out` must be valid for a write.
int32_t svy_design_srswor(size_t population, size_t n, struct SvyDesign **out);

// Bernoulli sampling with common probability `p`.
//
// # Safety
// `out` must be valid for a write.
int32_t svy_design_bernoulli(size_t population, double p, struct SvyDesign **out);

// Poisson sampling with inclusion probabilities `pi[0..len]`.
//
// # Safety
// `pi` must point to `len` values; `out` must be valid for a write.
int32_t svy_design_poisson(const double *pi, size_t len, struct SvyDesign **out);

// Rejective (conditional Poisson) sampling of size `n` with working
// probabilities `p[0..len]`.
//
// # Safety
// `p` must point to `len` values; `out` must be valid for a write.
int32_t svy_design_rejective(const double *p, size_t len, size_t n, struct SvyDesign **out);

// Releases a design; null is ignored.
//
// # Safety
// `design` must be null or a handle not yet freed.
void svy_design_free(struct SvyDesign *design);

// # Safety
// `design` must be a live handle; `out` valid for a write.
int32_t svy_design_population_size(const struct SvyDesign *design, size_t *out);

// # Safety
// `design` must be a live handle; `out` valid for a write.
int32_t svy_design_expected_size(const struct SvyDesign *design, double *out);

// First-order inclusion probabilities; `len` must equal the population size.
//
// # Safety
// `design` must be a live handle; `out` must point to `len` writable values.
int32_t svy_design_first_order_pi(const struct SvyDesign *design, double *out, size_t len);

// Second-order inclusion probabilities, row-major, `len = N * N`, with
// `pi_ii = pi_i` on the diagonal.
//
// # Safety
// `design` must be a live handle; `out` must point to `len` writable values.
int32_t svy_design_second_order_pi(const struct SvyDesign *design, double *out, size_t len);

// # Safety
// `design` must be a live handle; `out` valid for a write.
int32_t svy_design_constants(const struct SvyDesign *design, struct SvyDesignConstants *out);

// Draws one sample with a generator seeded by `seed`. `indicators[i]` is
// set to 1 for sampled units and 0 otherwise; `len` must equal the
// population size.
//
// # Safety
// `design` must be a live handle; `indicators` must point to `len`
// writable bytes; `size_out` null or valid for a write.
int32_t svy_design_draw(const struct SvyDesign *design,
                        uint64_t seed,
                        uint8_t *indicators,
                        size_t len,
                        size_t *size_out);

// Solves for rejective working probabilities whose inclusion
// probabilities equal `target_pi`, which must sum to `n`. Non-positive
// `tol` or zero `max_iter` select the defaults.
//
// # Safety
// `target_pi` and `p_out` must point to `len` values; `residual_out` and
// `iterations_out` null or valid for a write.
int32_t svy_calibrate_rejective(const double *target_pi,
                                size_t len,
                                size_t n,
                                double tol,
                                size_t max_iter,
                                double *p_out,
                                double *residual_out,
                                size_t *iterations_out);

// Weighted ECDF of a sample (`SVY_ESTIMATOR_HT` divides by the population
// size, `SVY_ESTIMATOR_HAJEK` by the estimated population size).
//
// # Safety
// `y` and `pi` must point to `len` values; `out` valid for a write.
int32_t svy_ecdf_new(const double *y,
                     const double *pi,
                     size_t len,
                     size_t population_size,
                     uint32_t estimator_kind,
                     struct SvyStepFunction **out);

// Releases a step function; null is ignored.
//
// # Safety
// `f` must be null or a handle not yet freed.
void svy_step_function_free(struct SvyStepFunction *f);

// # Safety
// `f` must be a live handle; `out` valid for a write.
int32_t svy_ecdf_eval(const struct SvyStepFunction *f, double t, double *out);

// # Safety
// `f` must be a live handle; `out` valid for a write.
int32_t svy_ecdf_total_mass(const struct SvyStepFunction *f, double *out);

// # Safety
// `f` must be a live handle; `out` valid for a write.
int32_t svy_ecdf_quantile(const struct SvyStepFunction *f,
                          double alpha,
                          uint32_t rule,
                          double *out);

// Poverty rate `F(beta * Q(alpha))` of a step function.
//
// # Safety
// `f` must be a live handle; `out` valid for a write.
int32_t svy_poverty_rate(const struct SvyStepFunction *f,
                         double alpha,
                         double beta,
                         uint32_t rule,
                         double *out);

// Poverty-rate estimate and plug-in asymptotic variance from one sample.
//
// # Safety
// `y` and `pi` must point to `len` values; `constants` must be readable;
// `phi_out` and `variance_out` valid for a write.
int32_t svy_poverty_estimate(const double *y,
                             const double *pi,
                             size_t len,
                             size_t population_size,
                             const struct SvyDesignConstants *constants,
                             double alpha,
                             double beta,
                             uint32_t estimator_kind,
                             uint32_t rule,
                             double *phi_out,
                             double *variance_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SURVEY_ECDF_H */

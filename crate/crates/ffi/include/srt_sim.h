#ifndef SRT_SIM_H
#define SRT_SIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SrtStatus {
  SRT_STATUS_OK = 0,
  SRT_STATUS_NULL_POINTER = 1,
  SRT_STATUS_INVALID_PARAM = 2,
  SRT_STATUS_DOMAIN = 3,
  SRT_STATUS_DEGENERATE = 4,
  SRT_STATUS_TOO_MANY_RELAYS = 5,
  SRT_STATUS_UNSUPPORTED = 6,
  SRT_STATUS_OUT_OF_RANGE = 7,
  SRT_STATUS_BUFFER_TOO_SMALL = 8,
  SRT_STATUS_PANIC = 9,
  SRT_STATUS_INTERNAL = 10,
} SrtStatus;

typedef enum SrtScheme {
  SRT_SCHEME_DT = 0,
  SRT_SCHEME_SRS = 1,
  SRT_SCHEME_MRS = 2,
} SrtScheme;

/**
 * Opaque tradeoff curve.
 */
typedef struct SrtCurve SrtCurve;

/**
 * Opaque validated scenario.
 */
typedef struct SrtParams SrtParams;

/**
 * Scenario description. Relay variances apply to every relay.
 */
typedef struct SrtScenario {
  double snr_db;
  double secrecy_rate;
  double overall_rate;
  double var_sd;
  double var_se;
  size_t n_relays;
  double var_si;
  double var_id;
  double var_ie;
  /**
   * 1.0 or 0.5.
   */
  double alpha;
} SrtScenario;

/**
 * Estimate with its 95% Wilson interval. Closed-form values have
 * `trials == 0` and a zero-width interval.
 */
typedef struct SrtEstimate {
  uint64_t successes;
  uint64_t trials;
  double hat;
  double lo;
  double hi;
} SrtEstimate;

typedef struct SrtPoint {
  double overall_rate;
  struct SrtEstimate op;
  struct SrtEstimate ip;
  uint64_t seed;
} SrtPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *srt_version(void);

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next library call on the same thread.
 */
const char *srt_last_error(void);

/**
 * Human-readable name of a status code.
 */
const char *srt_status_name(enum SrtStatus status);

/**
 * Default scenario: 15 dB, R_s = 0.2, R_o = 1, var_sd = 1, var_se = 0.2,
 * no relays, relay variances (2, 2, 0.2), alpha = 1.
 */
struct SrtScenario srt_scenario_default(void);

/**
 * Validate `scenario` and return a new handle in `*out`.
 *
 * # Safety
 * `scenario` must point to a valid `SrtScenario`; `out` to writable storage.
 */
enum SrtStatus srt_params_new(const struct SrtScenario *scenario, struct SrtParams **out);

/**
 * # Safety
 * `params` must be null or a handle from [`srt_params_new`] not yet freed.
 */
void srt_params_free(struct SrtParams *params);

/**
 * Change the codeword rate R_o of an existing scenario.
 *
 * # Safety
 * `params` must be a live handle.
 */
enum SrtStatus srt_params_set_overall_rate(struct SrtParams *params, double overall_rate);

/**
 * Closed-form direct-transmission outage at the scenario's R_o.
 *
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
enum SrtStatus srt_dt_outage(const struct SrtParams *params, double *out);

/**
 * Closed-form direct-transmission intercept at the scenario's R_o - R_s.
 *
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
enum SrtStatus srt_dt_intercept(const struct SrtParams *params, double *out);

/**
 * Direct-transmission intercept probability as a function of outage
 * probability `p_out` in [0, 1).
 *
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
enum SrtStatus srt_dt_ip_of_op(const struct SrtParams *params, double p_out, double *out);

/**
 * Closed-form single-relay-selection outage.
 *
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
enum SrtStatus srt_srs_outage(const struct SrtParams *params, double *out);

/**
 * Closed-form relay-scheme intercept (same for SRS and MRS); needs equal
 * relay-eavesdropper variances.
 *
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
enum SrtStatus srt_relay_intercept(const struct SrtParams *params, double *out);

/**
 * Decoding-set distribution indexed by relay bitmask (bit `i` set when
 * relay `i` decodes). `len` must be at least `2^n_relays`; the required
 * length is always written to `*required` when it is non-null.
 *
 * # Safety
 * `params` must be a live handle; `probs` must hold `len` doubles.
 */
enum SrtStatus srt_decoding_set_pmf(const struct SrtParams *params,
                                    double *probs,
                                    size_t len,
                                    size_t *required);

/**
 * `P(X + Y > t)` for independent exponentials with means `mean_a`, `mean_b`.
 * NaN for negative `t` or non-positive means.
 */
double srt_exp_sum_tail(double t, double mean_a, double mean_b);

/**
 * Monte Carlo outage and intercept counts for one scheme. `workers == 0`
 * uses every core; results do not depend on it.
 *
 * # Safety
 * `params` must be a live handle; `outage` and `intercept` writable.
 */
enum SrtStatus srt_run_trials(const struct SrtParams *params,
                              enum SrtScheme scheme,
                              uint64_t n_trials,
                              uint64_t seed,
                              uint32_t stream,
                              size_t workers,
                              struct SrtEstimate *outage,
                              struct SrtEstimate *intercept);

/**
 * Codeword-rate grid with redundancy geometric in `[re_min, re_max]`.
 *
 * # Safety
 * `rates` must hold `points` doubles.
 */
enum SrtStatus srt_ro_grid(double secrecy_rate,
                           double re_min,
                           double re_max,
                           size_t points,
                           double *rates);

/**
 * Simulate one scheme over `rates` (codeword rates). Grid point `k` uses
 * trial stream `k`.
 *
 * # Safety
 * `params` must be a live handle; `rates` must hold `n_rates` doubles;
 * `out` writable.
 */
enum SrtStatus srt_curve_build(const struct SrtParams *params,
                               enum SrtScheme scheme,
                               const double *rates,
                               size_t n_rates,
                               uint64_t n_trials,
                               uint64_t seed,
                               size_t workers,
                               struct SrtCurve **out);

/**
 * Closed-form direct-transmission curve over `rates`.
 *
 * # Safety
 * As for [`srt_curve_build`].
 */
enum SrtStatus srt_curve_dt_analytic(const struct SrtParams *params,
                                     const double *rates,
                                     size_t n_rates,
                                     struct SrtCurve **out);

/**
 * # Safety
 * `curve` must be null or a live curve handle.
 */
void srt_curve_free(struct SrtCurve *curve);

/**
 * Number of points; 0 for a null handle.
 *
 * # Safety
 * `curve` must be null or a live curve handle.
 */
size_t srt_curve_len(const struct SrtCurve *curve);

/**
 * # Safety
 * `curve` must be a live curve handle; `scheme` writable.
 */
enum SrtStatus srt_curve_scheme(const struct SrtCurve *curve, enum SrtScheme *scheme);

/**
 * # Safety
 * `curve` must be a live curve handle; `point` writable.
 */
enum SrtStatus srt_curve_point(const struct SrtCurve *curve, size_t index, struct SrtPoint *point);

/**
 * Whether curve `a` has intercept probability no higher than `b` (plus
 * `k_se` combined standard errors) at every outage value in `ops`, with
 * piecewise-linear interpolation. `ops` must lie in both curves' range.
 *
 * # Safety
 * `a`, `b` must be live curve handles; `ops` must hold `n_ops` doubles;
 * `dominant` writable.
 */
enum SrtStatus srt_curve_dominates(const struct SrtCurve *a,
                                   const struct SrtCurve *b,
                                   const double *ops,
                                   size_t n_ops,
                                   double k_se,
                                   bool *dominant);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SRT_SIM_H */

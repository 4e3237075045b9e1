#ifndef RINGSFWM_H
#define RINGSFWM_H

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  RINGSFWM_STATUS_OK = 0,
  RINGSFWM_STATUS_NULL_POINTER = 1,
  RINGSFWM_STATUS_INVALID_ARGUMENT = 2,
  RINGSFWM_STATUS_CONFIG = 3,
  RINGSFWM_STATUS_COVERAGE = 4,
  RINGSFWM_STATUS_ACCURACY = 5,
  RINGSFWM_STATUS_DIVERGENCE = 6,
  RINGSFWM_STATUS_UNDEFINED = 7,
  RINGSFWM_STATUS_NON_FINITE = 8,
  RINGSFWM_STATUS_IO = 9,
  RINGSFWM_STATUS_BUFFER_TOO_SMALL = 10,
  RINGSFWM_STATUS_PANIC = 11,
} RingsfwmStatus;

typedef enum {
  RINGSFWM_MODE_PUMP = 0,
  RINGSFWM_MODE_SIGNAL = 1,
  RINGSFWM_MODE_IDLER = 2,
} RingsfwmMode;

/**
 * Opaque result of a scenario run.
 */
typedef struct RingsfwmOutcome RingsfwmOutcome;

/**
 * Opaque ring system.
 */
typedef struct RingsfwmSystem RingsfwmSystem;

/**
 * One ring resonance, SI units; rates are angular (s⁻¹).
 */
typedef struct {
  double omega_rad_per_s;
  double v_m_per_s;
  /**
   * Phantom-channel speed; 0 means equal to `v_m_per_s`.
   */
  double u_m_per_s;
  double channel_rate_per_s;
  double loss_rate_per_s;
} RingsfwmModeRates;

/**
 * Scalar observables; NaN marks a quantity that is undefined or was not
 * computed.
 */
typedef struct {
  double p_coincidences;
  double p_singles;
  double r;
  double r_formula;
  double r_rel_dev;
  double schmidt_k;
  double purity;
  bool all_checks_passed;
} RingsfwmObservables;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ringsfwm_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until
 * the next call into the library on this thread.
 */
const char *ringsfwm_last_error(void);

/**
 * Builds a system with real positive couplings.
 *
 * # Safety
 * `pump`, `signal` and `idler` must point to valid structs; `out` must be
 * valid for writes.
 */
RingsfwmStatus ringsfwm_system_new(const RingsfwmModeRates *pump,
                                   const RingsfwmModeRates *signal,
                                   const RingsfwmModeRates *idler,
                                   double lambda_re,
                                   double lambda_im,
                                   double eta,
                                   double zeta,
                                   RingsfwmSystem **out);

/**
 * # Safety
 * `sys` must be NULL or a handle from [`ringsfwm_system_new`] not yet freed.
 */
void ringsfwm_system_free(RingsfwmSystem *sys);

/**
 * Total damping rate Γ̄ = Γ + M of one mode, s⁻¹.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be valid for writes.
 */
RingsfwmStatus ringsfwm_system_total_rate(const RingsfwmSystem *sys,
                                          RingsfwmMode mode,
                                          double *out);

/**
 * Weak-pump singles-to-coincidences ratio (Γ_S M_I + Γ_I M_S)/(Γ_S Γ_I).
 *
 * # Safety
 * `sys` must be a live handle; `out` must be valid for writes.
 */
RingsfwmStatus ringsfwm_system_singles_ratio(const RingsfwmSystem *sys, double *out);

/**
 * Runs a scenario given as JSON text. No files are written.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
RingsfwmStatus ringsfwm_scenario_run_json(const char *json, RingsfwmOutcome **out);

/**
 * # Safety
 * `outcome` must be NULL or a handle from [`ringsfwm_scenario_run_json`]
 * not yet freed.
 */
void ringsfwm_outcome_free(RingsfwmOutcome *outcome);

/**
 * Scalar observables of the perturbative pipeline, or of the time-domain
 * pipeline when only that ran (singles and r are then NaN).
 *
 * # Safety
 * `outcome` must be a live handle; `out` must be valid for writes.
 */
RingsfwmStatus ringsfwm_outcome_observables(const RingsfwmOutcome *outcome,
                                            RingsfwmObservables *out);

/**
 * Signal and idler axis lengths of the outcome's grids.
 *
 * # Safety
 * `outcome` must be a live handle; `n_signal` and `n_idler` must be valid
 * for writes.
 */
RingsfwmStatus ringsfwm_outcome_grid_shape(const RingsfwmOutcome *outcome,
                                           size_t *n_signal,
                                           size_t *n_idler);

/**
 * Copies the peak-normalised JSI row-major (signal index slowest) into
 * `buf`, which must hold `n_signal * n_idler` doubles.
 *
 * # Safety
 * `outcome` must be a live handle; `buf` must be valid for `len` writes.
 */
RingsfwmStatus ringsfwm_outcome_jsi(const RingsfwmOutcome *outcome, double *buf, size_t len);

/**
 * The observables.json document for the outcome. Release with
 * [`ringsfwm_string_free`].
 *
 * # Safety
 * `outcome` must be a live handle; `out` must be valid for writes.
 */
RingsfwmStatus ringsfwm_outcome_observables_json(const RingsfwmOutcome *outcome, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void ringsfwm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RINGSFWM_H */

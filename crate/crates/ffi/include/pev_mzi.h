#ifndef PEV_MZI_H
#define PEV_MZI_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum PevStatus {
  PEV_STATUS_OK = 0,
  PEV_STATUS_NULL_POINTER = 1,
  PEV_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Configuration, preset or scenario-invariant error.
   */
  PEV_STATUS_CONFIG = 3,
  /**
   * Truncation, domain overflow or annihilation.
   */
  PEV_STATUS_PHYSICS = 4,
  PEV_STATUS_IO = 5,
  /**
   * The output buffer is too small; the required size was reported.
   */
  PEV_STATUS_BUFFER_TOO_SMALL = 6,
  PEV_STATUS_PANIC = 7,
} PevStatus;

/**
 * Opaque scenario handle.
 */
typedef struct PevScenario PevScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a handle for a named preset.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PevStatus pev_scenario_preset(const char *name, struct PevScenario **out);

/**
 * Creates a handle from config text. `spectrum:` paths resolve against the
 * working directory.
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PevStatus pev_scenario_from_config(const char *config, struct PevScenario **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `scenario` must come from this library and not be used afterwards.
 */
void pev_scenario_free(struct PevScenario *scenario);

/**
 * Canonical config text of the scenario.
 *
 * # Safety
 * `buf` must hold `cap` bytes (or be null to query the size via `needed`).
 */
enum PevStatus pev_scenario_render(const struct PevScenario *scenario,
                                   char *buf,
                                   size_t cap,
                                   size_t *needed);

/**
 * Whole-grid detection probabilities of D1 and D2.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PevStatus pev_total_probabilities(const struct PevScenario *scenario,
                                       double *p_d1,
                                       double *p_d2);

/**
 * Probability that detector `detector` (1 or 2) fires in the window of
 * width `eps_t` around `t_bar`, and width `eps_x` around the detector
 * position (`eps_x <= 0` means the whole spatial axis).
 *
 * # Safety
 * Pointers must be valid.
 */
enum PevStatus pev_detection_probability(const struct PevScenario *scenario,
                                         int32_t detector,
                                         double t_bar,
                                         double eps_t,
                                         double eps_x,
                                         double *out);

/**
 * Detector density at a detection-frame point.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PevStatus pev_final_density(const struct PevScenario *scenario,
                                 int32_t detector,
                                 double t,
                                 double x,
                                 double *out);

/**
 * Detection curve over the scenario's `t̄` range. Writes up to `cap`
 * points into `t_bar` and `prob`; `len` receives the curve length.
 *
 * # Safety
 * `t_bar` and `prob` must each hold `cap` doubles (or be null when querying).
 */
enum PevStatus pev_detection_curve(const struct PevScenario *scenario,
                                   int32_t detector,
                                   double *t_bar,
                                   double *prob,
                                   size_t cap,
                                   size_t *len);

/**
 * Runs the grid pipeline and reports its largest pointwise density
 * difference from the closed form.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PevStatus pev_engine_discrepancy(const struct PevScenario *scenario, double *out);

/**
 * Copies the calling thread's last error message.
 *
 * # Safety
 * `buf` must hold `cap` bytes (or be null to query the size via `needed`).
 */
enum PevStatus pev_last_error_message(char *buf, size_t cap, size_t *needed);

/**
 * Library version, a static NUL-terminated string.
 */
const char *pev_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PEV_MZI_H */

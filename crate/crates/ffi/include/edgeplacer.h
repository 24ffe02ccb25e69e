#ifndef EDGEPLACER_H
#define EDGEPLACER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum EpStatus {
  EP_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  EP_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  EP_STATUS_INVALID_UTF8 = 2,
  /**
   * The configuration could not be parsed or failed validation.
   */
  EP_STATUS_CONFIG = 3,
  /**
   * The mobility trace could not be read or is malformed.
   */
  EP_STATUS_TRACE = 4,
  /**
   * A numeric argument or index is out of its domain.
   */
  EP_STATUS_INVALID_INPUT = 5,
  /**
   * The simulation failed for another reason (I/O, infeasibility, ...).
   */
  EP_STATUS_RUN = 6,
  /**
   * The library panicked; the handle involved should be considered unusable.
   */
  EP_STATUS_PANIC = 7,
} EpStatus;

/**
 * Opaque experiment configuration.
 */
typedef struct EpConfig EpConfig;

/**
 * Opaque result of one simulation run.
 */
typedef struct EpRun EpRun;

/**
 * Aggregate metrics of a run.
 */
typedef struct EpRunSummary {
  size_t horizon;
  double avg_latency_s;
  double avg_cost;
  double avg_queue;
  double final_queue;
  double total_cost;
  size_t negative_w_frames;
  double max_frame_deviation;
  /**
   * Whether total cost <= horizon * budget + final queue holds exactly.
   */
  bool budget_holds;
  /**
   * Whether every in-frame queue deviation is within its bound.
   */
  bool frame_bound_holds;
} EpRunSummary;

/**
 * One slot of a run: decision, outcome, and the queue and weight seen by the decision.
 */
typedef struct EpSlot {
  size_t t;
  size_t placement;
  double latency_s;
  double cost;
  double q;
  double w;
} EpSlot;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL if the last call
 * succeeded. Valid until the next call into this library on the same thread.
 */
const char *ep_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ep_version(void);

/**
 * Creates a configuration with every field at its default.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum EpStatus ep_config_new(struct EpConfig **out);

/**
 * Parses a JSON configuration. Relative paths inside it resolve against the
 * current working directory.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum EpStatus ep_config_from_json(const char *json, struct EpConfig **out);

/**
 * Loads a JSON configuration file. Relative paths inside it resolve against
 * the file's directory.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum EpStatus ep_config_load(const char *path, struct EpConfig **out);

/**
 * Applies a dotted `key=value` override such as `policy.v` = `900`. The
 * configuration is unchanged when the override is rejected.
 *
 * # Safety
 * `config` must be a live handle; `key` and `value` NUL-terminated strings.
 */
enum EpStatus ep_config_set(struct EpConfig *config, const char *key, const char *value);

/**
 * Serializes the configuration as pretty JSON. Free the result with
 * [`ep_string_free`].
 *
 * # Safety
 * `config` must be a live handle; `out` must be valid for writes.
 */
enum EpStatus ep_config_to_json(const struct EpConfig *config, char **out);

/**
 * Releases a configuration. NULL is ignored.
 *
 * # Safety
 * `config` must be NULL or a handle not yet freed.
 */
void ep_config_free(struct EpConfig *config);

/**
 * Runs the configured policy once.
 *
 * # Safety
 * `config` must be a live handle; `out` must be valid for writes.
 */
enum EpStatus ep_run(const struct EpConfig *config, struct EpRun **out);

/**
 * Copies the run's aggregate metrics into `out`.
 *
 * # Safety
 * `run` must be a live handle; `out` must be valid for writes.
 */
enum EpStatus ep_run_summary(const struct EpRun *run, struct EpRunSummary *out);

/**
 * Number of slots in the run, or 0 for NULL.
 *
 * # Safety
 * `run` must be NULL or a live handle.
 */
size_t ep_run_slot_count(const struct EpRun *run);

/**
 * Copies slot `index` into `out`.
 *
 * # Safety
 * `run` must be a live handle; `out` must be valid for writes.
 */
enum EpStatus ep_run_slot(const struct EpRun *run, size_t index, struct EpSlot *out);

/**
 * Releases a run. NULL is ignored.
 *
 * # Safety
 * `run` must be NULL or a handle not yet freed.
 */
void ep_run_free(struct EpRun *run);

/**
 * Runs the configuration's sweep and returns the summary CSV. Free the result
 * with [`ep_string_free`].
 *
 * # Safety
 * `config` must be a live handle; `out` must be valid for writes.
 */
enum EpStatus ep_sweep_csv(const struct EpConfig *config, char **out);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string from this library not yet freed.
 */
void ep_string_free(char *s);

/**
 * One virtual-queue step, `max(q + e - e_avg, 0)`, rounded so the result
 * never falls below the exact value.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum EpStatus ep_update_queue(double q, double e, double e_avg, double *out);

/**
 * Quadratic Lyapunov function `q^2 / 2`.
 */
double ep_lyapunov(double q);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDGEPLACER_H */

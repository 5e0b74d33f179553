#ifndef QMETRO_H
#define QMETRO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define QM_KIND_SINGLE_PROBE 0

#define QM_KIND_ANCILLA 1

#define QM_SOURCE_CLOSED_FORM 0

#define QM_SOURCE_CIRCUIT 1

#define QM_ESTIMATOR_INVERSION 0

#define QM_ESTIMATOR_MLE 1

/**
 * Status codes returned by every function.
 */
enum QmStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  QM_OK = 0,
  QM_ERR_NULL_POINTER = -1,
  QM_ERR_INVALID_ARGUMENT = -2,
  QM_ERR_COMPUTATION = -3,
  QM_ERR_BUFFER_TOO_SMALL = -4,
  QM_ERR_PANIC = -5,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum QmStatus QmStatus;
#else
typedef int32_t QmStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * The outcome of a repeated-acquisition experiment.
 */
typedef struct QmExperiment QmExperiment;

/**
 * A configured estimation strategy.
 */
typedef struct QmStrategy QmStrategy;

/**
 * Summary statistics of a [`QmExperiment`].
 */
typedef struct QmExperimentSummary {
  size_t repetitions;
  double mean_estimate;
  double sample_variance;
  double sd;
  double mean_events;
  double normalized_variance;
  double qcrb_reference;
} QmExperimentSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qm_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length in bytes.
 * Pass a null `buf` to query the length.
 *
 * # Safety
 *
 * `buf` must be null or valid for `len` bytes.
 */
size_t qm_last_error_message(char *buf, size_t len);

/**
 * Creates a strategy handle. `kind` is `QM_KIND_SINGLE_PROBE` or
 * `QM_KIND_ANCILLA`; `v` is ignored for the single probe.
 *
 * # Safety
 *
 * `out` must be null or valid for one write.
 */
QmStatus qm_strategy_new(uint32_t kind, double eta, double v, double phi, struct QmStrategy **out);

/**
 * Releases a strategy handle. Null is a no-op.
 *
 * # Safety
 *
 * `strategy` must be null or a live handle from [`qm_strategy_new`].
 */
void qm_strategy_free(struct QmStrategy *strategy);

/**
 * Number of measurement outcomes: 2 for the single probe, 4 with the ancilla.
 *
 * # Safety
 *
 * `strategy` must be a live handle; `out` must be valid for one write.
 */
QmStatus qm_strategy_num_outcomes(const struct QmStrategy *strategy, size_t *out);

/**
 * Copies the NUL-terminated label of outcome `index` into `buf`.
 *
 * # Safety
 *
 * `strategy` must be a live handle; `buf` must be valid for `len` bytes.
 */
QmStatus qm_strategy_outcome_label(const struct QmStrategy *strategy,
                                   size_t index,
                                   char *buf,
                                   size_t len);

/**
 * Writes the outcome probabilities (in label order) into `out`, which must
 * hold at least [`qm_strategy_num_outcomes`] values. `source` selects
 * `QM_SOURCE_CLOSED_FORM` or `QM_SOURCE_CIRCUIT`.
 *
 * # Safety
 *
 * `strategy` must be a live handle; `out` must be valid for `len` writes.
 */
QmStatus qm_strategy_probabilities(const struct QmStrategy *strategy,
                                   uint32_t source,
                                   double *out,
                                   size_t len);

/**
 * Closed-form QFI of the strategy.
 *
 * # Safety
 *
 * `strategy` must be a live handle; `out` must be valid for one write.
 */
QmStatus qm_strategy_qfi_closed(const struct QmStrategy *strategy, double *out);

/**
 * Numerical QFI of the strategy's output state at its phase, using a central
 * difference with `step` radians.
 *
 * # Safety
 *
 * `strategy` must be a live handle; `out` must be valid for one write.
 */
QmStatus qm_strategy_qfi_numeric(const struct QmStrategy *strategy, double step, double *out);

/**
 * Classical Fisher information of the strategy's measurement at its phase.
 *
 * # Safety
 *
 * `strategy` must be a live handle; `out` must be valid for one write.
 */
QmStatus qm_strategy_cfi(const struct QmStrategy *strategy, double step, double *out);

/**
 * `1 - eta`
 *
 * # Safety
 *
 * `out` must be valid for one write.
 */
QmStatus qm_single_probe_qfi(double eta, double *out);

/**
 * `2 v² (1 - eta) / (2 - eta)`
 *
 * # Safety
 *
 * `out` must be valid for one write.
 */
QmStatus qm_ancilla_qfi(double eta, double v, double *out);

/**
 * Damping rate above which the ancilla strategy has the larger QFI.
 *
 * # Safety
 *
 * `out` must be valid for one write.
 */
QmStatus qm_crossover_noise(double v, double *out);

/**
 * `1/(n F)`; fails with `QM_ERR_COMPUTATION` when `fisher` is zero.
 *
 * # Safety
 *
 * `out` must be valid for one write.
 */
QmStatus qm_qcrb_variance(double fisher, uint64_t events, double *out);

/**
 * Runs `repetitions` acquisitions of `events` events each at the strategy's
 * phase and returns a result handle.
 *
 * # Safety
 *
 * `strategy` must be a live handle; `out` must be valid for one write.
 */
QmStatus qm_experiment_run(const struct QmStrategy *strategy,
                           uint64_t events,
                           size_t repetitions,
                           uint64_t seed,
                           uint32_t estimator,
                           struct QmExperiment **out);

/**
 * Releases an experiment handle. Null is a no-op.
 *
 * # Safety
 *
 * `experiment` must be null or a live handle from [`qm_experiment_run`].
 */
void qm_experiment_free(struct QmExperiment *experiment);

/**
 * # Safety
 *
 * `experiment` must be a live handle; `out` must be valid for one write.
 */
QmStatus qm_experiment_summary(const struct QmExperiment *experiment,
                               struct QmExperimentSummary *out);

/**
 * Copies up to `len` per-repetition estimates into `out` and stores the
 * number copied in `written`. Fails with `QM_ERR_BUFFER_TOO_SMALL` (after
 * copying `len` values) when the buffer is shorter than the repetition count.
 *
 * # Safety
 *
 * `experiment` must be a live handle; `out` must be valid for `len` writes
 * and `written` for one.
 */
QmStatus qm_experiment_estimates(const struct QmExperiment *experiment,
                                 double *out,
                                 size_t len,
                                 size_t *written);

/**
 * Human-readable name of a status code, as a static string.
 */
const char *qm_status_name(int32_t status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMETRO_H */

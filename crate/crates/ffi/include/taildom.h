#ifndef TAILDOM_H
#define TAILDOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TdStatus {
  TD_STATUS_OK = 0,
  TD_STATUS_NULL_POINTER = 1,
  TD_STATUS_INVALID_UTF8 = 2,
  TD_STATUS_INVALID_PARAMETER = 3,
  TD_STATUS_INVALID_MODEL = 4,
  TD_STATUS_SHAPE_MISMATCH = 5,
  TD_STATUS_INVALID_CONFIG = 6,
  TD_STATUS_DEGENERATE = 7,
  TD_STATUS_CONTRACT_VIOLATED = 8,
  TD_STATUS_IO = 9,
  TD_STATUS_INTERNAL = 10,
} TdStatus;

/**
 * Opaque random vector model.
 */
typedef struct TdModel TdModel;

/**
 * Opaque empirical tail of a real sample.
 */
typedef struct TdTail TdTail;

typedef struct TdTailEstimate {
  double estimate;
  double lower;
  double upper;
} TdTailEstimate;

typedef struct TdHullResult {
  double distance;
  double lower_bound;
  uintptr_t iterations;
  bool converged;
} TdHullResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *td_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *td_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void td_string_free(char *s);

/**
 * Parses and validates a model from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TdStatus td_model_from_json(const char *json, struct TdModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from [`td_model_from_json`], freed once.
 */
void td_model_free(struct TdModel *model);

/**
 * # Safety
 * `model` must be a live handle.
 */
uintptr_t td_model_dim(const struct TdModel *model);

/**
 * Content hash of the model; free with [`td_string_free`].
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum TdStatus td_model_id(const struct TdModel *model, char **out);

/**
 * Writes `count` samples of `‖V‖` into `out`.
 *
 * # Safety
 * `model` must be a live handle and `out` must hold `count` doubles.
 */
enum TdStatus td_sample_norms(const struct TdModel *model,
                              uintptr_t count,
                              uint64_t seed,
                              uint64_t stream,
                              double *out);

/**
 * Empirical tail of `len` values with DKW level `delta`.
 *
 * # Safety
 * `values` must hold `len` doubles and `out` must be a valid pointer.
 */
enum TdStatus td_tail_new(const double *values, uintptr_t len, double delta, struct TdTail **out);

/**
 * `P̂(V >= t)` with its DKW band.
 *
 * # Safety
 * `tail` must be a live handle and `out` a valid pointer.
 */
enum TdStatus td_tail_survival(const struct TdTail *tail, double t, struct TdTailEstimate *out);

/**
 * # Safety
 * `tail` must be NULL or a handle from [`td_tail_new`], freed once.
 */
void td_tail_free(struct TdTail *tail);

/**
 * `(mean |v|^p)^(1/p)` with `p = ln(n + 2)`.
 *
 * # Safety
 * `samples` must hold `len` doubles and `out` must be a valid pointer.
 */
enum TdStatus td_log_indexed_norm(const double *samples, uintptr_t len, uintptr_t n, double *out);

/**
 * `e^2 + Σ_n ∫_{e^2}^∞ t^(-ln(n+2)) dt`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TdStatus td_constant_audit(double *out);

/**
 * Distance from `point` to the symmetric convex hull of `count` generators
 * (row-major `count x dim`) in the metric of the `dim x dim` second-moment
 * matrix `covariance` (row-major).
 *
 * # Safety
 * Array arguments must hold the stated number of doubles; `out` must be valid.
 */
enum TdStatus td_hull_distance(const double *point,
                               uintptr_t dim,
                               const double *generators,
                               uintptr_t count,
                               const double *covariance,
                               double tol,
                               uintptr_t max_iter,
                               struct TdHullResult *out);

/**
 * Runs an experiment described by a JSON config (the CLI config-file
 * format) and returns the JSON report body through `report`. `outcome`
 * receives the CLI exit status: 0 pass, 1 fail, 2 inconclusive.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `report` and `outcome`
 * must be valid pointers.
 */
enum TdStatus td_run_experiment(const char *config_json, char **report, int32_t *outcome);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAILDOM_H */

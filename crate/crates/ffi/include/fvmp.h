#ifndef FVMP_H
#define FVMP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define FVMP_SCHEME_FV2 0

#define FVMP_SCHEME_FV4 1

#define FVMP_LIMITER_UNLIMITED 0

#define FVMP_LIMITER_BJ 1

#define FVMP_LIMITER_KUZMIN 2

#define FVMP_LIMITER_NK 3

#define FVMP_LIMITER_N2N 4

#define FVMP_LIMITER_GLOBAL 5

#define FVMP_CASE_DIAG 0

#define FVMP_CASE_QUAD 1

#define FVMP_CASE_SIN 2

#define FVMP_CASE_SBR 3

#define FVMP_IC_COS 0

#define FVMP_IC_COS2 1

#define FVMP_IC_LEVEQUE 2

/**
 * Use the default that goes with the scheme or initial condition.
 */
#define FVMP_DEFAULT 0

#define FVMP_INIT_POINT 1

#define FVMP_INIT_GAUSS 2

#define FVMP_TIME_FE 1

#define FVMP_TIME_SSP22 2

#define FVMP_TIME_SSP33 3

typedef enum FvmpStatus {
  FVMP_STATUS_OK = 0,
  FVMP_STATUS_NULL_POINTER = 1,
  FVMP_STATUS_INVALID_ARGUMENT = 2,
  FVMP_STATUS_BUFFER_TOO_SMALL = 3,
  FVMP_STATUS_SOLVER_ERROR = 4,
  FVMP_STATUS_PANIC = 5,
} FvmpStatus;

/**
 * Opaque simulation handle.
 */
typedef struct FvmpSimulation FvmpSimulation;

/**
 * Run description. Obtain defaults from [`fvmp_config_default`].
 */
typedef struct FvmpConfig {
  uint32_t scheme;
  uint32_t limiter;
  uint32_t flow_case;
  uint32_t initial_condition;
  /**
   * `FVMP_DEFAULT`, `FVMP_INIT_POINT` or `FVMP_INIT_GAUSS`.
   */
  uint32_t init_mode;
  /**
   * `FVMP_DEFAULT` or one of the `FVMP_TIME_*` codes.
   */
  uint32_t time_scheme;
  uint32_t nx;
  uint32_t ny;
  double courant;
  double end_time;
  /**
   * Forced step count; 0 derives it from `courant`.
   */
  uint64_t steps;
} FvmpConfig;

/**
 * Relative errors and extrema of the current state.
 */
typedef struct FvmpReport {
  double rel_l1;
  double rel_l2;
  double rel_linf;
  double min;
  double max;
  /**
   * NaN when the limiter has no maximum principle.
   */
  double max_mp_violation;
  double max_courant;
} FvmpReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fill `out` with an FV2, unlimited, diagonal-flow run of the C¹ bump on
 * 64×64 cells, Courant target 0.5, end time 1.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum FvmpStatus fvmp_config_default(struct FvmpConfig *out);

/**
 * Create a simulation at its initial state. On success `*out` owns a
 * handle that must be passed to [`fvmp_simulation_free`].
 *
 * # Safety
 * `config` must be null or point to a valid config; `out` must be null or
 * valid for writes.
 */
enum FvmpStatus fvmp_simulation_new(const struct FvmpConfig *config, struct FvmpSimulation **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `sim` must be null or a handle from [`fvmp_simulation_new`] that has not
 * been freed.
 */
void fvmp_simulation_free(struct FvmpSimulation *sim);

/**
 * Advance one step. Fails with `InvalidArgument` once the run is finished.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
enum FvmpStatus fvmp_simulation_step(struct FvmpSimulation *sim);

/**
 * Advance to the end time.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
enum FvmpStatus fvmp_simulation_run(struct FvmpSimulation *sim);

/**
 * Current simulation time.
 *
 * # Safety
 * `sim` must be null or a live handle; `out` null or valid for writes.
 */
enum FvmpStatus fvmp_simulation_time(const struct FvmpSimulation *sim, double *out);

/**
 * Steps taken so far and planned in total.
 *
 * # Safety
 * `sim` must be null or a live handle; `taken` and `total` null or valid
 * for writes.
 */
enum FvmpStatus fvmp_simulation_steps(const struct FvmpSimulation *sim,
                                      uint64_t *taken,
                                      uint64_t *total);

/**
 * Copy the cell means, row-major with `k = j·nx + i`, into `buf`.
 * `nx`/`ny` are written whenever they are non-null, including when the
 * buffer is too small.
 *
 * # Safety
 * `sim` must be null or a live handle; `buf` null or valid for `len`
 * writes; `nx`, `ny` null or valid for writes.
 */
enum FvmpStatus fvmp_simulation_field(const struct FvmpSimulation *sim,
                                      double *buf,
                                      size_t len,
                                      uint32_t *nx,
                                      uint32_t *ny);

/**
 * Errors against the exact solution at the current time. Reversing flows
 * have one only at whole periods.
 *
 * # Safety
 * `sim` must be null or a live handle; `out` null or valid for writes.
 */
enum FvmpStatus fvmp_simulation_report(const struct FvmpSimulation *sim, struct FvmpReport *out);

/**
 * Copy the last error message of this thread into `buf` as a
 * NUL-terminated string, truncating to fit. Returns the buffer size needed
 * for the whole message, including the terminator.
 *
 * # Safety
 * `buf` must be null or valid for `len` writes.
 */
size_t fvmp_last_error(char *buf, size_t len);

/**
 * Upwind flux `max(vn, 0)·a + min(vn, 0)·b`.
 */
double fvmp_upwind_flux(double a, double b, double vn);

/**
 * Largest `α ∈ [0, 1]` keeping `mean + α(p − mean)` inside `[lo, hi]`.
 * NaN if `lo > hi` or any argument is NaN.
 */
double fvmp_bj_factor(double p, double mean, double lo, double hi);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fvmp_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FVMP_H */

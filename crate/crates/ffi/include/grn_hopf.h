#ifndef GRN_HOPF_H
#define GRN_HOPF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GrnStatus {
  GRN_STATUS_OK = 0,
  GRN_STATUS_NULL_POINTER = 1,
  GRN_STATUS_INVALID_ARGUMENT = 2,
  GRN_STATUS_DIVERGENCE = 3,
  GRN_STATUS_NO_BRACKET = 4,
  GRN_STATUS_NON_CONVERGENCE = 5,
  GRN_STATUS_SINGULAR = 6,
  GRN_STATUS_DEGENERATE = 7,
  GRN_STATUS_INSUFFICIENT_DATA = 8,
  GRN_STATUS_OUT_OF_RANGE = 9,
  GRN_STATUS_IO = 10,
  GRN_STATUS_PANIC = 99,
} GrnStatus;

/**
 * Opaque list of eigenvalues.
 */
typedef struct GrnRootSet GrnRootSet;

/**
 * Opaque simulation result.
 */
typedef struct GrnTrajectory GrnTrajectory;

typedef struct GrnParams {
  double alpha_m;
  double alpha_p;
  double mu;
  uint32_t h;
  double l;
  double x_m;
  double epsilon;
} GrnParams;

typedef struct GrnComplex {
  double re;
  double im;
} GrnComplex;

/**
 * Summary of one Hopf point.
 */
typedef struct GrnHopfReport {
  double d_c;
  double omega_c;
  struct GrnComplex r_prime;
  struct GrnComplex dlambda_dd;
  struct GrnComplex b;
  double nu;
  /**
   * 1 for supercritical, 0 for subcritical.
   */
  int32_t supercritical;
} GrnHopfReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or null. The pointer stays valid until
 * the next failing call on the same thread.
 */
const char *grn_last_error_message(void);

struct GrnParams grn_params_default(void);

/**
 * # Safety
 * `params` must be null or point to a valid `GrnParams`.
 */
enum GrnStatus grn_params_validate(const struct GrnParams *params);

/**
 * Protein level at the gene site in the point-source steady state.
 *
 * # Safety
 * `params` must point to a valid `GrnParams`; `out_p` must be writable.
 */
enum GrnStatus grn_solve_p_at_gene(const struct GrnParams *params, double d, double *out_p);

/**
 * Characteristic function `R(λ)` at diffusion `d`.
 *
 * # Safety
 * `params` must point to a valid `GrnParams`; `out_r` must be writable.
 */
enum GrnStatus grn_char_fn(const struct GrnParams *params,
                           double d,
                           struct GrnComplex lambda,
                           struct GrnComplex *out_r);

/**
 * Eigenvalues with nonnegative imaginary part, sorted by descending real part.
 *
 * # Safety
 * `params` must point to a valid `GrnParams`; `out_set` must be writable. The handle must
 * be released with [`grn_root_set_free`].
 */
enum GrnStatus grn_find_roots(const struct GrnParams *params,
                              double d,
                              struct GrnRootSet **out_set);

/**
 * # Safety
 * `set` must be null or a live handle from [`grn_find_roots`].
 */
size_t grn_root_set_len(const struct GrnRootSet *set);

/**
 * # Safety
 * `set` must be a live handle; `out_lambda` must be writable; `out_residual` may be null.
 */
enum GrnStatus grn_root_set_get(const struct GrnRootSet *set,
                                size_t index,
                                struct GrnComplex *out_lambda,
                                double *out_residual);

/**
 * # Safety
 * `set` must be null or a handle from [`grn_find_roots`] not yet freed.
 */
void grn_root_set_free(struct GrnRootSet *set);

/**
 * Locates the stability change in `[lo, hi]` and computes its amplitude-equation coefficients.
 *
 * # Safety
 * `params` must point to a valid `GrnParams`; `out_report` must be writable.
 */
enum GrnStatus grn_hopf_analyze(const struct GrnParams *params,
                                double lo,
                                double hi,
                                struct GrnHopfReport *out_report);

/**
 * Integrates the PDE from zero data on `nodes` uniform nodes, sampling once per time unit.
 *
 * # Safety
 * `params` must point to a valid `GrnParams`; `out_traj` must be writable. The handle must
 * be released with [`grn_trajectory_free`].
 */
enum GrnStatus grn_simulate(const struct GrnParams *params,
                            double d,
                            double t_end,
                            size_t nodes,
                            struct GrnTrajectory **out_traj);

/**
 * # Safety
 * `traj` must be null or a live handle from [`grn_simulate`].
 */
size_t grn_trajectory_len(const struct GrnTrajectory *traj);

/**
 * Sample `index` of the integrated concentrations `(t, M, P)`.
 *
 * # Safety
 * `traj` must be a live handle; the three output pointers must be writable.
 */
enum GrnStatus grn_trajectory_sample(const struct GrnTrajectory *traj,
                                     size_t index,
                                     double *out_t,
                                     double *out_m,
                                     double *out_p);

/**
 * Classifies the trailing `window_fraction` of the run. `out_period` receives NaN when the
 * run is steady.
 *
 * # Safety
 * `traj` must be a live handle; the output pointers must be writable.
 */
enum GrnStatus grn_trajectory_classify(const struct GrnTrajectory *traj,
                                       double window_fraction,
                                       int32_t *out_oscillatory,
                                       double *out_period);

/**
 * # Safety
 * `traj` must be null or a handle from [`grn_simulate`] not yet freed.
 */
void grn_trajectory_free(struct GrnTrajectory *traj);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GRN_HOPF_H */

#ifndef HEMODYN_H
#define HEMODYN_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Success.
 */
#define HEMODYN_OK 0

/*
 A required pointer argument was null.
 */
#define HEMODYN_ERR_NULL 1

/*
 Invalid parameters, options, history or index.
 */
#define HEMODYN_ERR_INVALID 2

/*
 Degenerate or unsupported analysis case.
 */
#define HEMODYN_ERR_DEGENERATE 3

/*
 Runtime failure: non-finite state, negative excursion, root not found.
 */
#define HEMODYN_ERR_RUNTIME 4

/*
 A Rust panic was caught at the boundary.
 */
#define HEMODYN_ERR_PANIC 5

#define HEMODYN_SCHEME_AUGMENTED 0

#define HEMODYN_SCHEME_QUADRATURE 1

typedef enum HemodynRegime {
  HEMODYN_REGIME_TRIVIAL_GLOBALLY_STABLE = 0,
  HEMODYN_REGIME_DELAY_INDEPENDENT_STABLE = 1,
  HEMODYN_REGIME_DELAY_DEPENDENT = 2,
  HEMODYN_REGIME_DEGENERATE = 3,
  HEMODYN_REGIME_NO_POSITIVE_EQUILIBRIUM = 4,
} HemodynRegime;

/*
 Crossing table from a Hopf analysis.
 */
typedef struct HemodynHopf HemodynHopf;

/*
 Model constants.
 */
typedef struct HemodynParams HemodynParams;

/*
 Simulated trajectory on a uniform grid.
 */
typedef struct HemodynTrajectory HemodynTrajectory;

/*
 Coefficients of the linearization around the positive equilibrium.
 */
typedef struct HemodynLinearization {
  double beta_star;
  double delta_plus_beta_star;
  double ratio;
  /*
   NaN unless `has_kappa`.
   */
  double kappa;
  bool has_kappa;
  double x_star;
} HemodynLinearization;

/*
 One purely imaginary root pair.
 */
typedef struct HemodynCrossing {
  double tau_c;
  double omega_c;
  double y;
  uint32_t branch_l;
  uint32_t branch_side;
  /*
   +1, −1, or 0 for a tangential crossing.
   */
  int32_t transversality;
} HemodynCrossing;

/*
 Integration settings; fill with `hemodyn_sim_options_default`.
 */
typedef struct HemodynSimOptions {
  double dt;
  double t_end;
  /*
   `HEMODYN_SCHEME_AUGMENTED` or `HEMODYN_SCHEME_QUADRATURE`.
   */
  int32_t scheme;
  uint32_t quad_panels;
  /*
   Linear instead of cubic Hermite dense output.
   */
  bool linear_interp;
} HemodynSimOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *hemodyn_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *hemodyn_version(void);

/*
 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
int32_t hemodyn_params_new(double delta,
                           double beta0,
                           double theta,
                           double n,
                           double tau_min,
                           double tau,
                           struct HemodynParams **out);

/*
 Normal-production constants with `τ_min = 0`, `τ = 18.2`.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
int32_t hemodyn_params_default(struct HemodynParams **out);

/*
 # Safety
 `params` must be null or a handle from this library not yet freed.
 */
void hemodyn_params_free(struct HemodynParams *params);

/*
 Replace τ, keeping the other constants. The handle is unchanged on error.

 # Safety
 `params` must be a live handle.
 */
int32_t hemodyn_params_set_tau(struct HemodynParams *params, double tau);

/*
 Copy the six constants out, in constructor order.

 # Safety
 `params` must be a live handle and `out` must point to 6 doubles.
 */
int32_t hemodyn_params_get(const struct HemodynParams *params, double *out);

/*
 Positive equilibrium; `*present` is false (and `*x_star` 0) when absent.

 # Safety
 `params` must be a live handle; `x_star` and `present` must be writable.
 */
int32_t hemodyn_equilibrium(const struct HemodynParams *params, double *x_star, bool *present);

/*
 # Safety
 `params` must be a live handle and `out` writable.
 */
int32_t hemodyn_linearize(const struct HemodynParams *params, struct HemodynLinearization *out);

/*
 # Safety
 `params` must be a live handle and `out` writable.
 */
int32_t hemodyn_regime(const struct HemodynParams *params, enum HemodynRegime *out);

/*
 Characteristic function at `λ = re + i·im` for delay `tau`.

 # Safety
 `params` must be a live handle; `out_re` and `out_im` writable.
 */
int32_t hemodyn_char_delta(const struct HemodynParams *params,
                           double tau,
                           double re,
                           double im,
                           double *out_re,
                           double *out_im);

/*
 Enumerate crossings (`τ_min` must be 0). `k_max = 0` selects the default table size.

 # Safety
 `params` must be a live handle; `out` writable. Free the result with
 `hemodyn_hopf_free`.
 */
int32_t hemodyn_hopf(const struct HemodynParams *params, uint32_t k_max, struct HemodynHopf **out);

/*
 Number of crossings; 0 for a null handle.

 # Safety
 `hopf` must be null or a live handle.
 */
size_t hemodyn_hopf_count(const struct HemodynHopf *hopf);

/*
 Crossing `index`, ordered by increasing `tau_c`.

 # Safety
 `hopf` must be a live handle and `out` writable.
 */
int32_t hemodyn_hopf_crossing(const struct HemodynHopf *hopf,
                              size_t index,
                              struct HemodynCrossing *out);

/*
 First crossing delay `τ₀`; `*present` is false when there is none.

 # Safety
 `hopf` must be a live handle; `tau_0` and `present` writable.
 */
int32_t hemodyn_hopf_tau0(const struct HemodynHopf *hopf, double *tau_0, bool *present);

/*
 Whether the signed crossing count at `tau` predicts an unstable equilibrium.

 # Safety
 `hopf` must be a live handle; `out` writable.
 */
int32_t hemodyn_hopf_predicts_unstable(const struct HemodynHopf *hopf, double tau, bool *out);

/*
 # Safety
 `hopf` must be null or a live handle.
 */
void hemodyn_hopf_free(struct HemodynHopf *hopf);

/*
 Default integration settings for `params`.

 # Safety
 `params` must be a live handle and `out` writable.
 */
int32_t hemodyn_sim_options_default(const struct HemodynParams *params,
                                    struct HemodynSimOptions *out);

/*
 Simulate from the constant history `φ ≡ value`. `options` may be null for defaults.

 # Safety
 `params` must be a live handle, `options` null or valid, `out` writable.
 */
int32_t hemodyn_simulate_constant(const struct HemodynParams *params,
                                  double value,
                                  const struct HemodynSimOptions *options,
                                  struct HemodynTrajectory **out);

/*
 Simulate from a tabulated history with `len` strictly increasing `times`
 covering `[−τ, 0]`, interpolated by monotone cubic Hermite.

 # Safety
 `times` and `values` must each point to `len` doubles.
 */
int32_t hemodyn_simulate_table(const struct HemodynParams *params,
                               const double *times,
                               const double *values,
                               size_t len,
                               const struct HemodynSimOptions *options,
                               struct HemodynTrajectory **out);

/*
 Number of grid points; 0 for a null handle.

 # Safety
 `traj` must be null or a live handle.
 */
size_t hemodyn_trajectory_len(const struct HemodynTrajectory *traj);

/*
 Copy up to `capacity` samples into the non-null buffers among `t`, `x`, `z`;
 `*written` receives the count.

 # Safety
 Each non-null buffer must hold `capacity` doubles.
 */
int32_t hemodyn_trajectory_copy(const struct HemodynTrajectory *traj,
                                double *t,
                                double *x,
                                double *z,
                                size_t capacity,
                                size_t *written);

/*
 Dense-output value `x(t)` for `t ∈ [−τ, t_end]`.

 # Safety
 `traj` must be a live handle and `out` writable.
 */
int32_t hemodyn_trajectory_eval(const struct HemodynTrajectory *traj, double t, double *out);

/*
 # Safety
 `traj` must be null or a live handle.
 */
void hemodyn_trajectory_free(struct HemodynTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEMODYN_H */

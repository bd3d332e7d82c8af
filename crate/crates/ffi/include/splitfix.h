#ifndef SPLITFIX_H
#define SPLITFIX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. `SPLITFIX_STATUS_OK` is zero.
typedef enum SplitfixStatus {
  SPLITFIX_STATUS_OK = 0,
  SPLITFIX_STATUS_NULL_POINTER = 1,
  SPLITFIX_STATUS_INVALID_ARGUMENT = 2,
  SPLITFIX_STATUS_DIMENSION_MISMATCH = 3,
  SPLITFIX_STATUS_NON_FINITE = 4,
  SPLITFIX_STATUS_DIVERGED = 5,
  SPLITFIX_STATUS_NO_CONVERGENCE = 6,
  SPLITFIX_STATUS_UNSUPPORTED = 7,
  SPLITFIX_STATUS_OUT_OF_RANGE = 8,
  SPLITFIX_STATUS_PANIC = 9,
} SplitfixStatus;

// A resolvent operator.
typedef struct SplitfixOperator SplitfixOperator;

// A preset scenario together with its closed-form reference values.
typedef struct SplitfixScenario SplitfixScenario;

// A relaxed splitting operator `T_λ`.
typedef struct SplitfixSplitting SplitfixSplitting;

// A stored iteration trace.
typedef struct SplitfixTrace SplitfixTrace;

// Closed-form reference values of a planar scenario. `has_*` flags mark
// which vectors are defined.
typedef struct SplitfixReference {
  bool has_v;
  double v[2];
  bool has_xbar;
  double xbar[2];
  bool has_reflected_shadow_limit;
  double reflected_shadow_limit[2];
  bool consistent;
  bool normal_solutions_exist;
} SplitfixReference;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or an empty
// string. The pointer stays valid until the next call into the library on
// this thread.
const char *splitfix_last_error(void);

// Library version as a static NUL-terminated string.
const char *splitfix_version(void);

// Resolvent of `R_θ + N_ball(0,1)`, θ ∈ [0, π/2).
//
// # Safety
// `out` must be a valid pointer to writable handle storage.
enum SplitfixStatus splitfix_operator_rotation_ball(double theta, struct SplitfixOperator **out);

// Resolvent of `b + N_ball(c,r)` in the plane.
//
// # Safety
// `b` and `c` must point to 2 doubles; `out` must be writable.
enum SplitfixStatus splitfix_operator_shifted_ball_normal(const double *b,
                                                          const double *c,
                                                          double r,
                                                          struct SplitfixOperator **out);

// Projection onto the box `[lo, hi]` of dimension `dim`.
//
// # Safety
// `lo` and `hi` must point to `dim` doubles; `out` must be writable.
enum SplitfixStatus splitfix_operator_box(const double *lo,
                                          const double *hi,
                                          size_t dim,
                                          struct SplitfixOperator **out);

// Prox of `(γ/2)‖x − w‖² + ι_U` with `U` the line spanned by `direction`.
//
// # Safety
// `w` and `direction` must point to `dim` doubles; `out` must be writable.
enum SplitfixStatus splitfix_operator_quadratic_on_line(double gamma,
                                                        const double *w,
                                                        const double *direction,
                                                        size_t dim,
                                                        struct SplitfixOperator **out);

// Resolvent of `L + N_K` with `K = {x : ⟨x,u⟩ ≤ 0}`; `l` is row-major 2×2.
//
// # Safety
// `l` must point to 4 doubles and `u` to 2; `out` must be writable.
enum SplitfixStatus splitfix_operator_linear_halfspace(const double *l,
                                                       const double *u,
                                                       struct SplitfixOperator **out);

// The identity resolvent (`A = 0`) in dimension `dim`.
//
// # Safety
// `out` must be writable.
enum SplitfixStatus splitfix_operator_zero(size_t dim, struct SplitfixOperator **out);

// # Safety
// `op` must be null or a handle from this library, not yet freed.
void splitfix_operator_free(struct SplitfixOperator *op);

// Dimension of an operator, or 0 for a null handle.
//
// # Safety
// `op` must be null or a live handle.
size_t splitfix_operator_dim(const struct SplitfixOperator *op);

// Writes `J x` to `out`.
//
// # Safety
// `op` must be a live handle; `x` and `out` must point to `dim` doubles.
enum SplitfixStatus splitfix_operator_resolvent(const struct SplitfixOperator *op,
                                                const double *x,
                                                size_t dim,
                                                double *out);

// Builds `T_λ` from copies of two operators.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum SplitfixStatus splitfix_splitting_new(const struct SplitfixOperator *a,
                                           const struct SplitfixOperator *b,
                                           double lambda,
                                           struct SplitfixSplitting **out);

// # Safety
// `s` must be null or a live handle.
void splitfix_splitting_free(struct SplitfixSplitting *s);

// Writes `T_λ x` to `out`.
//
// # Safety
// `s` must be a live handle; `x` and `out` must point to `dim` doubles.
enum SplitfixStatus splitfix_splitting_evaluate(const struct SplitfixSplitting *s,
                                                const double *x,
                                                size_t dim,
                                                double *out);

// Iterates from `x0` until the shadow settles or `max_iters` is reached.
//
// # Safety
// `s` must be a live handle; `x0` must point to `dim` doubles; `out` must
// be writable.
enum SplitfixStatus splitfix_splitting_iterate(const struct SplitfixSplitting *s,
                                               const double *x0,
                                               size_t dim,
                                               size_t max_iters,
                                               double shadow_tol,
                                               struct SplitfixTrace **out);

// # Safety
// `t` must be null or a live handle.
void splitfix_trace_free(struct SplitfixTrace *t);

// Number of rows, or 0 for a null handle.
//
// # Safety
// `t` must be null or a live handle.
size_t splitfix_trace_len(const struct SplitfixTrace *t);

// Dimension of the iterates, or 0 for a null handle.
//
// # Safety
// `t` must be null or a live handle.
size_t splitfix_trace_dim(const struct SplitfixTrace *t);

// Copies row `n` into the non-null output buffers; `step` receives
// `x_n − x_{n+1}`.
//
// # Safety
// `t` must be a live handle; non-null outputs must hold `dim` doubles.
enum SplitfixStatus splitfix_trace_row(const struct SplitfixTrace *t,
                                       size_t n,
                                       double *x,
                                       double *shadow,
                                       double *reflected_shadow,
                                       double *step);

// Estimates the minimal displacement vector from the trace tail.
//
// # Safety
// `t` must be a live handle; `v_out` must hold `dim` doubles;
// `tail_residual` may be null.
enum SplitfixStatus splitfix_estimate_displacement(const struct SplitfixTrace *t,
                                                   double *v_out,
                                                   double *tail_residual);

// Finds `y ∈ Fix(v + T)` and `x̄ = J_A y`. Returns
// `SPLITFIX_STATUS_NO_CONVERGENCE` when no normal solution is found.
//
// # Safety
// `s` must be a live handle; `v`, `x0`, `xbar_out` and `y_out` must hold
// `dim` doubles; `residual` may be null.
enum SplitfixStatus splitfix_solve_shifted_fixed_point(const struct SplitfixSplitting *s,
                                                       const double *v,
                                                       const double *x0,
                                                       size_t dim,
                                                       size_t max_iters,
                                                       double *xbar_out,
                                                       double *y_out,
                                                       double *residual);

// Builds a registered scenario (`"two_balls"` or `"line_box"`) with
// `n_params` named overrides.
//
// # Safety
// `name` must be a NUL-terminated string; when `n_params > 0`,
// `param_names` must hold that many NUL-terminated strings and
// `param_values` that many doubles; `out` must be writable.
enum SplitfixStatus splitfix_scenario_new(const char *name,
                                          const char *const *param_names,
                                          const double *param_values,
                                          size_t n_params,
                                          double lambda,
                                          struct SplitfixScenario **out);

// # Safety
// `s` must be null or a live handle.
void splitfix_scenario_free(struct SplitfixScenario *s);

// Copies the scenario's reference values.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum SplitfixStatus splitfix_scenario_reference(const struct SplitfixScenario *s,
                                                struct SplitfixReference *out);

// Builds the scenario's splitting operator.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum SplitfixStatus splitfix_scenario_splitting(const struct SplitfixScenario *s,
                                                struct SplitfixSplitting **out);

// Writes the scenario's default start point (2 doubles).
//
// # Safety
// `s` must be a live handle; `out` must hold 2 doubles.
enum SplitfixStatus splitfix_scenario_x0(const struct SplitfixScenario *s, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPLITFIX_H */

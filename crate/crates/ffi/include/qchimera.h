#ifndef QCHIMERA_H
#define QCHIMERA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum QcStatus {
  QC_STATUS_OK = 0,
  QC_STATUS_NULL_POINTER = 1,
  QC_STATUS_INVALID_ARGUMENT = 2,
  QC_STATUS_SHAPE_MISMATCH = 3,
  // Divergence, loss of positivity or an ill-conditioned matrix.
  QC_STATUS_NUMERICAL = 4,
  // The call needs a covariance but none is attached.
  QC_STATUS_NO_COVARIANCE = 5,
  // A Rust panic was caught at the boundary.
  QC_STATUS_INTERNAL = 6,
} QcStatus;

// Opaque simulation handle.
typedef struct QcSimulation QcSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a network of `n_nodes` oscillators coupled to every node within
// ring distance `range` with total strength `strength`. All nodes start at
// the origin. Returns null on invalid parameters.
struct QcSimulation *qc_sim_new(size_t n_nodes,
                                size_t range,
                                double strength,
                                double kappa1,
                                double kappa2,
                                double hbar);

// Releases a handle. Null is ignored.
//
// # Safety
// `sim` must come from [`qc_sim_new`] and not have been freed.
void qc_sim_free(struct QcSimulation *sim);

// Number of nodes, or 0 for a null handle.
//
// # Safety
// `sim` must be null or a live handle.
size_t qc_sim_n_nodes(const struct QcSimulation *sim);

// Current simulation time, or NaN for a null handle.
//
// # Safety
// `sim` must be null or a live handle.
double qc_sim_time(const struct QcSimulation *sim);

// Resets to `t = 0` on the limit cycle with the seeded random phase profile
// (Gaussian envelope of width `sigma` centred on `mu`, with `mu` a 1-based
// node position). Drops any attached covariance.
//
// # Safety
// `sim` must be a live handle.
enum QcStatus qc_sim_set_initial_conditions(struct QcSimulation *sim,
                                            uint64_t seed,
                                            double sigma,
                                            double mu);

// Replaces the mean-field state with `2 N` interleaved values at time `t`.
// Drops any attached covariance.
//
// # Safety
// `sim` must be a live handle and `alpha` must point to `len` doubles.
enum QcStatus qc_sim_set_state(struct QcSimulation *sim, const double *alpha, size_t len, double t);

// Writes the mean-field state as `2 N` interleaved values.
//
// # Safety
// `sim` must be a live handle and `out` must point to `len` writable doubles.
enum QcStatus qc_sim_get_state(const struct QcSimulation *sim, double *out, size_t len);

// Advances by `span` with RK4 steps of `dt`. When a covariance is attached
// it is propagated along the same trajectory, and `span` must then be a
// whole number of steps.
//
// # Safety
// `sim` must be a live handle.
enum QcStatus qc_sim_advance(struct QcSimulation *sim, double span, double dt);

// Attaches a coherent-state covariance `(hbar/2) I` at the current time.
//
// # Safety
// `sim` must be a live handle.
enum QcStatus qc_sim_reset_covariance(struct QcSimulation *sim);

// Detaches the covariance so later advances evolve the mean field only.
//
// # Safety
// `sim` must be a live handle.
enum QcStatus qc_sim_clear_covariance(struct QcSimulation *sim);

// Writes the `2N x 2N` covariance row-major.
//
// # Safety
// `sim` must be a live handle and `out` must point to `len` writable doubles.
enum QcStatus qc_sim_get_covariance(const struct QcSimulation *sim, double *out, size_t len);

// Writes the windowed local order parameter `R_l` of every node.
//
// # Safety
// `sim` must be a live handle and `out` must point to `len` writable doubles.
enum QcStatus qc_sim_local_order(const struct QcSimulation *sim,
                                 size_t window,
                                 double *out,
                                 size_t len);

// Writes the coupling-weighted momentum correlation of every node.
//
// # Safety
// `sim` must be a live handle and `out` must point to `len` writable doubles.
enum QcStatus qc_sim_weighted_correlation(const struct QcSimulation *sim, double *out, size_t len);

// Rényi-2 mutual information between the first `l` nodes and the rest,
// computed from the attached covariance.
//
// # Safety
// `sim` must be a live handle and `out` a writable double.
enum QcStatus qc_sim_mutual_information(const struct QcSimulation *sim, size_t l, double *out);

// Rényi-2 entropy of a Gaussian state from its `dim x dim` row-major
// covariance, `dim` even.
//
// # Safety
// `c` must point to `dim * dim` doubles and `out` to a writable double.
enum QcStatus qc_renyi2(const double *c, size_t dim, double hbar, double *out);

// Rényi-2 mutual information between the first `l` of `n_nodes` modes and
// the rest, from a `2N x 2N` row-major covariance.
//
// # Safety
// `c` must point to `4 n_nodes^2` doubles and `out` to a writable double.
enum QcStatus qc_mutual_information(const double *c,
                                    size_t n_nodes,
                                    size_t l,
                                    double hbar,
                                    double *out);

// Copies the last error message on this thread into `buf` (NUL-terminated,
// truncated to fit) and returns the full message length in bytes excluding
// the terminator. Passing a null `buf` only queries the length.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t qc_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *qc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCHIMERA_H */

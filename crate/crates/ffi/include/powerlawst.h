#ifndef POWERLAWST_H
#define POWERLAWST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Crosstalk summation convention.
typedef enum PlsConvention {
  PLS_CONVENTION_PUBLISHED = 0,
  PLS_CONVENTION_DRAFT = 1,
} PlsConvention;

// Result code of every fallible call.
typedef enum PlsStatus {
  PLS_STATUS_OK = 0,
  PLS_STATUS_NULL_POINTER = 1,
  PLS_STATUS_INVALID_ARGUMENT = 2,
  PLS_STATUS_OUT_OF_RANGE = 3,
  PLS_STATUS_REGIME = 4,
  PLS_STATUS_SIZE_CAP = 5,
  PLS_STATUS_PANIC = 6,
} PlsStatus;

// Exact cascaded times with an affine tail.
typedef struct PlsFit PlsFit;

// A hypercubic lattice together with its power-law coupling.
typedef struct PlsLattice PlsLattice;

// Optimal hybrid plan for `r = 2..=r_max`.
typedef struct PlsPlan PlsPlan;

// A completed cascaded-CNOT schedule.
typedef struct PlsSchedule PlsSchedule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Owned by the library.
const char *pls_last_error(void);

// Library version as a static nul-terminated string.
const char *pls_version(void);

// Create a lattice with `dims` extents and couplings `prefactor / dist^alpha`.
//
// # Safety
// `extents` must point to `dims` readable values and `out` must be writable.
enum PlsStatus pls_lattice_new(const size_t *extents,
                               size_t dims,
                               double alpha,
                               double prefactor,
                               struct PlsLattice **out);

// # Safety
// `lattice` must come from [`pls_lattice_new`] and not be used afterwards.
void pls_lattice_free(struct PlsLattice *lattice);

// # Safety
// `lattice` must be a live handle or null (returns 0).
size_t pls_lattice_num_sites(const struct PlsLattice *lattice);

// Greedy cascaded-CNOT schedule from `source`.
//
// # Safety
// `lattice` must be a live handle and `out` writable.
enum PlsStatus pls_schedule_run(const struct PlsLattice *lattice,
                                size_t source,
                                struct PlsSchedule **out);

// # Safety
// `schedule` must come from [`pls_schedule_run`] and not be used afterwards.
void pls_schedule_free(struct PlsSchedule *schedule);

// # Safety
// `schedule` must be a live handle or null (returns NaN).
double pls_schedule_total_time(const struct PlsSchedule *schedule);

// # Safety
// `schedule` must be a live handle or null (returns 0).
size_t pls_schedule_num_events(const struct PlsSchedule *schedule);

// Completion time and site of event `k`, in completion order.
//
// # Safety
// `schedule` must be a live handle; `time` and `site` writable.
enum PlsStatus pls_schedule_event(const struct PlsSchedule *schedule,
                                  size_t k,
                                  double *time,
                                  size_t *site);

// Run the exact benchmark for `r = 2..=window_hi` and fit `[window_lo, window_hi]`.
//
// # Safety
// `out` must be writable.
enum PlsStatus pls_fit_compute(double alpha,
                               size_t d,
                               size_t window_lo,
                               size_t window_hi,
                               struct PlsFit **out);

// Fit precomputed exact times; `times[i]` is the time at `r = i + 2`.
//
// # Safety
// `times` must point to `len` readable values and `out` must be writable.
enum PlsStatus pls_fit_from_times(double alpha,
                                  size_t d,
                                  const double *times,
                                  size_t len,
                                  size_t window_lo,
                                  size_t window_hi,
                                  struct PlsFit **out);

// # Safety
// `fit` must come from a `pls_fit_*` constructor and not be used afterwards.
void pls_fit_free(struct PlsFit *fit);

// Cascaded time at `r`: exact inside the computed range, extrapolated beyond.
//
// # Safety
// `fit` must be a live handle or null (returns NaN).
double pls_fit_time(const struct PlsFit *fit, size_t r);

// # Safety
// `fit` must be a live handle; `slope` and `intercept` writable.
enum PlsStatus pls_fit_line(const struct PlsFit *fit, double *slope, double *intercept);

// Hybrid dynamic program on top of `fit` up to `r_max`.
//
// # Safety
// `fit` must be a live handle and `out` writable.
enum PlsStatus pls_plan_optimize(const struct PlsFit *fit, size_t r_max, struct PlsPlan **out);

// # Safety
// `plan` must come from [`pls_plan_optimize`] and not be used afterwards.
void pls_plan_free(struct PlsPlan *plan);

// Optimal time, split (`0` for no split) and recursion depth at `r`.
//
// # Safety
// `plan` must be a live handle; out-pointers writable.
enum PlsStatus pls_plan_entry(const struct PlsPlan *plan,
                              size_t r,
                              double *best_time,
                              size_t *best_split,
                              uint32_t *depth);

// Smallest `r` whose optimum merges, or 0 if none up to `r_max`.
//
// # Safety
// `plan` must be a live handle or null (returns 0).
size_t pls_plan_crossover(const struct PlsPlan *plan);

// Total crosstalk error over all recursion levels with `n` colors.
//
// # Safety
// `total` must be writable.
enum PlsStatus pls_total_crosstalk(double r,
                                   double r0,
                                   uint64_t n,
                                   double alpha,
                                   size_t d,
                                   enum PlsConvention convention,
                                   double *total);

// Smallest color count meeting `eps`, as the high and low 64-bit halves.
//
// # Safety
// `n_hi` and `n_lo` must be writable.
enum PlsStatus pls_colors_required(double r,
                                   double r0,
                                   double eps,
                                   double alpha,
                                   size_t d,
                                   enum PlsConvention convention,
                                   uint64_t *n_hi,
                                   uint64_t *n_lo);

// Distinct echo pulse times for `n` colors.
//
// # Safety
// `total` must be writable.
enum PlsStatus pls_pulse_count(uint32_t n, uint64_t *total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POWERLAWST_H */

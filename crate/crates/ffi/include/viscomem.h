#ifndef VISCOMEM_H
#define VISCOMEM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Strain measures selectable from C.
 */
typedef enum VmMeasureKind {
  VM_MEASURE_KIND_UCM = 0,
  VM_MEASURE_KIND_LCM = 1,
  VM_MEASURE_KIND_PSM_NORM = 2,
  /**
   * Uses `alpha` and `beta`.
   */
  VM_MEASURE_KIND_PSM = 3,
  /**
   * Uses `alpha` and `beta`.
   */
  VM_MEASURE_KIND_WAGNER = 4,
  VM_MEASURE_KIND_CURRIE = 5,
} VmMeasureKind;

/**
 * Result codes returned by every fallible function.
 */
typedef enum VmStatus {
  VM_STATUS_OK = 0,
  VM_STATUS_NULL_POINTER = 1,
  VM_STATUS_INVALID_ARGUMENT = 2,
  VM_STATUS_CONFIG = 3,
  VM_STATUS_NUMERICAL = 4,
  VM_STATUS_NOT_CONVERGED = 5,
  VM_STATUS_ABORTED = 6,
  VM_STATUS_IO = 7,
  VM_STATUS_BUFFER_TOO_SMALL = 8,
  VM_STATUS_PANIC = 9,
} VmStatus;

typedef struct VmAgeGrid VmAgeGrid;

typedef struct VmKernel VmKernel;

typedef struct VmMeasure VmMeasure;

typedef struct VmSimulation VmSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (nul-terminated).
 * Returns the message length without the terminator, or -1 if there is none.
 * The message is truncated when `len` is too small.
 *
 * # Safety
 * `buf` must point to `len` writable bytes or be null.
 */
ptrdiff_t vm_last_error_message(char *buf, size_t len);

/**
 * Single-mode exponential memory `m(s) = e^{-s}`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum VmStatus vm_kernel_single_exponential(struct VmKernel **out);

/**
 * Multi-mode Maxwell memory with `n` moduli `eta` and relaxation rates `lambda`.
 *
 * # Safety
 * `eta` and `lambda` must point to `n` values; `out` must be valid.
 */
enum VmStatus vm_kernel_multi_mode(const double *eta,
                                   const double *lambda,
                                   size_t n,
                                   struct VmKernel **out);

/**
 * Doi-Edwards memory truncated to `terms` modes.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum VmStatus vm_kernel_doi_edwards(double lambda, size_t terms, struct VmKernel **out);

/**
 * Normalized `m(s)`.
 *
 * # Safety
 * `kernel` and `out` must be valid pointers.
 */
enum VmStatus vm_kernel_evaluate(const struct VmKernel *kernel, double s, double *out);

/**
 * Kernel mass beyond age `s`.
 *
 * # Safety
 * `kernel` and `out` must be valid pointers.
 */
enum VmStatus vm_kernel_tail_mass(const struct VmKernel *kernel, double s, double *out);

/**
 * # Safety
 * `kernel` must come from a `vm_kernel_*` constructor or be null.
 */
void vm_kernel_free(struct VmKernel *kernel);

/**
 * Age grid truncated where the tail mass drops below `tail_tol`.
 *
 * # Safety
 * `kernel` and `out` must be valid pointers.
 */
enum VmStatus vm_age_grid_build(const struct VmKernel *kernel,
                                double tail_tol,
                                double quad_tol,
                                struct VmAgeGrid **out);

/**
 * Number of age nodes, or 0 for a null grid.
 *
 * # Safety
 * `grid` must be valid or null.
 */
size_t vm_age_grid_len(const struct VmAgeGrid *grid);

/**
 * Copies the age nodes into `buf`.
 *
 * # Safety
 * `grid` must be valid and `buf` must hold `len` values.
 */
enum VmStatus vm_age_grid_nodes(const struct VmAgeGrid *grid, double *buf, size_t len);

/**
 * Copies the quadrature weights into `buf`.
 *
 * # Safety
 * `grid` must be valid and `buf` must hold `len` values.
 */
enum VmStatus vm_age_grid_weights(const struct VmAgeGrid *grid, double *buf, size_t len);

/**
 * # Safety
 * `grid` must come from `vm_age_grid_build` or be null.
 */
void vm_age_grid_free(struct VmAgeGrid *grid);

/**
 * Strain measure of the given kind; `alpha` and `beta` are ignored by kinds
 * without parameters.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum VmStatus vm_measure_new(enum VmMeasureKind kind,
                             double alpha,
                             double beta,
                             struct VmMeasure **out);

/**
 * `S(G)` for a row-major `d×d` tensor `g` (`d` = 2 or 3), written row-major to `out`.
 *
 * # Safety
 * `measure` must be valid; `g` and `out` must hold `d*d` values.
 */
enum VmStatus vm_measure_evaluate(const struct VmMeasure *measure,
                                  size_t d,
                                  const double *g,
                                  double *out);

/**
 * # Safety
 * `measure` must come from `vm_measure_new` or be null.
 */
void vm_measure_free(struct VmMeasure *measure);

/**
 * Transient simulation built from a TOML run configuration, at rest at `t = 0`.
 *
 * # Safety
 * `config` must be a nul-terminated string and `out` a valid pointer.
 */
enum VmStatus vm_simulation_from_toml(const char *config, struct VmSimulation **out);

/**
 * Advances the simulation by `steps` steps of the configured `dt`.
 *
 * # Safety
 * `sim` must be a valid pointer.
 */
enum VmStatus vm_simulation_step(struct VmSimulation *sim, size_t steps);

/**
 * Current simulation time, or NaN for a null or failed simulation.
 *
 * # Safety
 * `sim` must be valid or null.
 */
double vm_simulation_time(const struct VmSimulation *sim);

/**
 * Spatial dimension of the simulation, or 0 for a null simulation.
 *
 * # Safety
 * `sim` must be valid or null.
 */
size_t vm_simulation_dim(const struct VmSimulation *sim);

/**
 * Cell-averaged polymer stress, row-major `d×d` into `out`.
 *
 * # Safety
 * `sim` must be valid and `out` must hold `len` values.
 */
enum VmStatus vm_simulation_mean_stress(const struct VmSimulation *sim, double *out, size_t len);

/**
 * # Safety
 * `sim` must come from `vm_simulation_from_toml` or be null.
 */
void vm_simulation_free(struct VmSimulation *sim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VISCOMEM_H */

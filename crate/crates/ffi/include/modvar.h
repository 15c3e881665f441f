#ifndef MODVAR_H
#define MODVAR_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Which dynamics an evaluation uses.
typedef enum ModvarFramework {
  MODVAR_FRAMEWORK_SCHRODINGER = 0,
  MODVAR_FRAMEWORK_CALDEIRA_LEGGETT = 1,
  // One particle of a pair sharing a bath; only valid for windows and
  // the reduced modular value.
  MODVAR_FRAMEWORK_COMMON_BATH = 2,
} ModvarFramework;

// Result of every fallible call.
typedef enum ModvarStatus {
  MODVAR_STATUS_OK = 0,
  MODVAR_STATUS_NULL_POINTER = 1,
  MODVAR_STATUS_INVALID_PARAMETER = 2,
  MODVAR_STATUS_DOMAIN = 3,
  MODVAR_STATUS_NUMERICAL = 4,
  MODVAR_STATUS_CONFIG = 5,
  MODVAR_STATUS_INTERNAL = 6,
  MODVAR_STATUS_PANIC = 7,
  MODVAR_STATUS_BUFFER_TOO_SMALL = 8,
} ModvarStatus;

// Opaque model: constants, the two-packet state and the bath.
typedef struct ModvarModel ModvarModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Build a model. Pass `gamma = temperature = 0` for unitary dynamics.
//
// # Safety
// `out` must be valid for writing one pointer.
enum ModvarStatus modvar_model_new(double mass,
                                   double hbar,
                                   double boltzmann,
                                   double gravity,
                                   double separation,
                                   double sigma0,
                                   double kick,
                                   double alpha,
                                   double gamma,
                                   double temperature,
                                   struct ModvarModel **out);

// Reference parameters (`m = ħ = k_B = 1`, `g = -3`, `L = 50`, `σ0 = 1`,
// `k = 0.1`) with the given phase and bath.
//
// # Safety
// `out` must be valid for writing one pointer.
enum ModvarStatus modvar_model_new_reference(double alpha,
                                             double gamma,
                                             double temperature,
                                             struct ModvarModel **out);

// Release a model. Null is ignored.
//
// # Safety
// `model` must be null or come from a constructor and not be used again.
void modvar_model_free(struct ModvarModel *model);

// Global modular value `⟨cos(p̂L/ħ)⟩` at time `t`.
//
// # Safety
// `model` must be a live model and `out` valid for one write.
enum ModvarStatus modvar_modular_value(const struct ModvarModel *model,
                                       enum ModvarFramework framework,
                                       double t,
                                       double *out);

// The damped modular value by direct quadrature of the density matrix,
// as an independent check of [`modvar_modular_value`].
//
// # Safety
// `model` must be a live model and `out` valid for one write.
enum ModvarStatus modvar_modular_quadrature(const struct ModvarModel *model, double t, double *out);

// Latest time at which the packets' supports stay disjoint.
//
// # Safety
// `model` must be a live model and `out` valid for one write.
enum ModvarStatus modvar_overlap_window(const struct ModvarModel *model,
                                        enum ModvarFramework framework,
                                        double support_factor,
                                        double *out);

// Probability density at `(x, t)`.
//
// # Safety
// `model` must be a live model and `out` valid for one write.
enum ModvarStatus modvar_density(const struct ModvarModel *model,
                                 enum ModvarFramework framework,
                                 double x,
                                 double t,
                                 double *out);

// Position at `t` of the left-packet Bohmian trajectory starting at `x0`.
//
// # Safety
// `model` must be a live model and `out` valid for one write.
enum ModvarStatus modvar_bohmian_position(const struct ModvarModel *model,
                                          enum ModvarFramework framework,
                                          double x0,
                                          double t,
                                          double *out);

// Local modular value at `(x, t)`; fails with `Domain` where the density
// underflows.
//
// # Safety
// `model` must be a live model and `out` valid for one write.
enum ModvarStatus modvar_local_modular(const struct ModvarModel *model,
                                       enum ModvarFramework framework,
                                       double x,
                                       double t,
                                       double *out);

// Length in bytes of the last error message on this thread, excluding the
// terminating NUL; 0 when there is none.
size_t modvar_last_error_length(void);

// Copy the last error message, NUL-terminated, into `buf`.
//
// # Safety
// `buf` must be valid for `len` bytes of writes.
enum ModvarStatus modvar_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *modvar_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MODVAR_H */

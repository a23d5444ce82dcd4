#ifndef XYCHAIN_H
#define XYCHAIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every exported function.
 */
typedef enum XyStatus {
  XY_STATUS_OK = 0,
  XY_STATUS_NULL_POINTER = 1,
  XY_STATUS_INVALID_ARGUMENT = 2,
  XY_STATUS_INVALID_STATE = 3,
  XY_STATUS_DIMENSION_MISMATCH = 4,
  XY_STATUS_NUMERICAL = 5,
  XY_STATUS_IO = 6,
  XY_STATUS_PARSE = 7,
  XY_STATUS_PANIC = 99,
} XyStatus;

/**
 * A validated density matrix.
 */
typedef struct XyDensity XyDensity;

/**
 * Spin-system parameters: names, couplings, relaxation times.
 */
typedef struct XySpinSystem XySpinSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *xy_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *xy_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void xy_string_free(char *s);

/**
 * The built-in three-spin system.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum XyStatus xy_spin_system_default(struct XySpinSystem **out);

/**
 * Parses a spin system from its JSON form.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be a valid pointer.
 */
enum XyStatus xy_spin_system_from_json(const char *json, struct XySpinSystem **out);

/**
 * JSON form of a spin system; free the result with [`xy_string_free`].
 *
 * # Safety
 * Pointers must be valid.
 */
enum XyStatus xy_spin_system_to_json(const struct XySpinSystem *system, char **out);

/**
 * # Safety
 * `system` must come from this library and not be freed twice.
 */
void xy_spin_system_free(struct XySpinSystem *system);

/**
 * Runs a preparation protocol (`bell-010`, `bell-101`, `w`, `ghz`) in a
 * mode (`ideal`, `compiled`, `schedule`, `schedule-noise`) from a
 * pseudo-pure input with purity fraction `epsilon`.
 *
 * # Safety
 * Strings must be NUL-terminated; pointers must be valid.
 */
enum XyStatus xy_prepare(const char *protocol,
                         const char *mode,
                         const struct XySpinSystem *system,
                         double epsilon,
                         struct XyDensity **out);

/**
 * Builds a density matrix from row-major real and imaginary parts of
 * length `dim * dim`; the matrix is validated.
 *
 * # Safety
 * `re` and `im` must each point to `dim * dim` doubles.
 */
enum XyStatus xy_density_from_parts(size_t dim,
                                    const double *re,
                                    const double *im,
                                    struct XyDensity **out);

/**
 * # Safety
 * `rho` must come from this library and not be freed twice.
 */
void xy_density_free(struct XyDensity *rho);

/**
 * # Safety
 * Pointers must be valid.
 */
enum XyStatus xy_density_dim(const struct XyDensity *rho, size_t *out);

/**
 * Entry `(row, col)`, zero-based.
 *
 * # Safety
 * Pointers must be valid.
 */
enum XyStatus xy_density_get(const struct XyDensity *rho,
                             size_t row,
                             size_t col,
                             double *re,
                             double *im);

/**
 * Normalized Hilbert-Schmidt overlap of two states.
 *
 * # Safety
 * Pointers must be valid.
 */
enum XyStatus xy_fidelity(const struct XyDensity *a, const struct XyDensity *b, double *out);

/**
 * `Tr(theory experiment) / Tr(theory^2)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum XyStatus xy_attenuated_correlation(const struct XyDensity *theory,
                                        const struct XyDensity *experiment,
                                        double *out);

/**
 * Concurrence between qubits `i` and `j` (1-based).
 *
 * # Safety
 * Pointers must be valid.
 */
enum XyStatus xy_pair_concurrence(const struct XyDensity *rho, size_t i, size_t j, double *out);

/**
 * The 64 Pauli expectation values of a three-qubit state, `III` first,
 * lexicographic with `I < X < Y < Z`. `len` must be at least 64.
 *
 * # Safety
 * `out` must point to `len` doubles.
 */
enum XyStatus xy_pauli_set(const struct XyDensity *rho, double *out, size_t len);

/**
 * Runs the compiler equivalence checks on `phi_samples` seeded angles.
 * `passed` receives whether every check met its tolerance.
 *
 * # Safety
 * Pointers must be valid.
 */
enum XyStatus xy_verify_compiler(size_t phi_samples,
                                 uint64_t seed,
                                 bool *passed,
                                 double *max_residual);

/**
 * Signal retained by a protocol's schedule under relaxation.
 *
 * # Safety
 * `protocol` must be NUL-terminated; pointers must be valid.
 */
enum XyStatus xy_decoherence_estimate(const char *protocol,
                                      const struct XySpinSystem *system,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XYCHAIN_H */

#ifndef EPRKIT_H
#define EPRKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EprkitStatus {
  EPRKIT_STATUS_OK = 0,
  EPRKIT_STATUS_NULL_POINTER = 1,
  EPRKIT_STATUS_INVALID_ARGUMENT = 2,
  EPRKIT_STATUS_DIMENSION_MISMATCH = 3,
  EPRKIT_STATUS_INVARIANT_VIOLATION = 4,
  EPRKIT_STATUS_BUFFER_TOO_SMALL = 5,
  EPRKIT_STATUS_PANIC = 6,
  EPRKIT_STATUS_INTERNAL = 7,
} EprkitStatus;

/**
 * Which factor an s-map or channel maps into.
 */
typedef enum EprkitDirection {
  /**
   * From the first factor to the second.
   */
  EPRKIT_DIRECTION_BA = 0,
  /**
   * From the second factor to the first.
   */
  EPRKIT_DIRECTION_AB = 1,
} EprkitDirection;

/**
 * Antilinear map, stored as `K` with `s(φ) = K conj(φ)`.
 */
typedef struct EprkitAntilinear EprkitAntilinear;

/**
 * Channel map built from a bipartite density operator.
 */
typedef struct EprkitChannel EprkitChannel;

/**
 * Density operator on a tensor product.
 */
typedef struct EprkitDensity EprkitDensity;

/**
 * Normalized pure state on a tensor product.
 */
typedef struct EprkitState EprkitState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *eprkit_last_error_message(void);

/**
 * Create a pure state from `dim` amplitudes on factors `dims[0..ndims]`.
 *
 * # Safety
 * `dims` must point to `ndims` values and `data` to `2 * dim` doubles.
 */
enum EprkitStatus eprkit_state_new(const size_t *dims,
                                   size_t ndims,
                                   const double *data,
                                   size_t dim,
                                   struct EprkitState **out);

/**
 * # Safety
 * `state` must come from `eprkit_state_new` and not be freed twice.
 */
void eprkit_state_free(struct EprkitState *state);

/**
 * Total dimension of a state.
 *
 * # Safety
 * `state` must be a live handle and `out_dim` writable.
 */
enum EprkitStatus eprkit_state_dim(const struct EprkitState *state, size_t *out_dim);

/**
 * Schmidt weights of a bipartite state, in descending order.
 *
 * # Safety
 * `state` must be a live handle and `out` must hold `capacity` doubles.
 */
enum EprkitStatus eprkit_schmidt_coefficients(const struct EprkitState *state,
                                              double *out,
                                              size_t capacity,
                                              size_t *out_len);

/**
 * Create a density operator from a `dim × dim` matrix on factors `dims`.
 *
 * # Safety
 * `dims` must point to `ndims` values and `data` to `2 * dim * dim` doubles.
 */
enum EprkitStatus eprkit_density_new(const size_t *dims,
                                     size_t ndims,
                                     const double *data,
                                     size_t dim,
                                     struct EprkitDensity **out);

/**
 * Density operator `|ψ⟩⟨ψ|` of a pure state.
 *
 * # Safety
 * `state` must be a live handle.
 */
enum EprkitStatus eprkit_density_from_state(const struct EprkitState *state,
                                            struct EprkitDensity **out);

/**
 * # Safety
 * `density` must come from this library and not be freed twice.
 */
void eprkit_density_free(struct EprkitDensity *density);

/**
 * s-map of a bipartite state.
 *
 * # Safety
 * `state` must be a live handle.
 */
enum EprkitStatus eprkit_smap(const struct EprkitState *state,
                              enum EprkitDirection direction,
                              struct EprkitAntilinear **out);

/**
 * # Safety
 * `map` must come from this library and not be freed twice.
 */
void eprkit_antilinear_free(struct EprkitAntilinear *map);

/**
 * Target and source dimensions of an antilinear map.
 *
 * # Safety
 * `map` must be a live handle and both outputs writable.
 */
enum EprkitStatus eprkit_antilinear_dims(const struct EprkitAntilinear *map,
                                         size_t *out_dst,
                                         size_t *out_src);

/**
 * The matrix `K` of an antilinear map, `dst × src`.
 *
 * # Safety
 * `map` must be a live handle and `out` must hold `2 * capacity` doubles.
 */
enum EprkitStatus eprkit_antilinear_kmatrix(const struct EprkitAntilinear *map,
                                            double *out,
                                            size_t capacity,
                                            size_t *out_len);

/**
 * Apply an antilinear map to a vector of length `src`.
 *
 * # Safety
 * `map` must be a live handle, `data` must hold `2 * len` doubles and `out`
 * `2 * capacity` doubles.
 */
enum EprkitStatus eprkit_antilinear_apply(const struct EprkitAntilinear *map,
                                          const double *data,
                                          size_t len,
                                          double *out,
                                          size_t capacity,
                                          size_t *out_len);

/**
 * Channel map of a bipartite density operator.
 *
 * # Safety
 * `density` must be a live handle.
 */
enum EprkitStatus eprkit_channel_from_density(const struct EprkitDensity *density,
                                              enum EprkitDirection direction,
                                              struct EprkitChannel **out);

/**
 * # Safety
 * `channel` must come from this library and not be freed twice.
 */
void eprkit_channel_free(struct EprkitChannel *channel);

/**
 * Input and output dimensions of a channel.
 *
 * # Safety
 * `channel` must be a live handle and both outputs writable.
 */
enum EprkitStatus eprkit_channel_dims(const struct EprkitChannel *channel,
                                      size_t *out_src,
                                      size_t *out_dst);

/**
 * Apply a channel to a `src × src` operator, giving a `dst × dst` one.
 *
 * # Safety
 * `channel` must be a live handle, `data` must hold `2 * dim * dim` doubles
 * and `out` `2 * capacity` doubles.
 */
enum EprkitStatus eprkit_channel_apply(const struct EprkitChannel *channel,
                                       const double *data,
                                       size_t dim,
                                       double *out,
                                       size_t capacity,
                                       size_t *out_len);

/**
 * Apply the dual of a channel to a `dst × dst` operator.
 *
 * # Safety
 * Same contract as [`eprkit_channel_apply`], with the dimensions swapped.
 */
enum EprkitStatus eprkit_channel_dual(const struct EprkitChannel *channel,
                                      const double *data,
                                      size_t dim,
                                      double *out,
                                      size_t capacity,
                                      size_t *out_len);

/**
 * Teleportation map `t: A → C` for ancilla `ψ_BC` and outcome vector `ψ_AB`.
 *
 * The result is `dC × dA`, reported through `out_rows` and `out_cols`.
 *
 * # Safety
 * Both states must be live handles and `out` must hold `2 * capacity`
 * doubles; the shape outputs may be null.
 */
enum EprkitStatus eprkit_teleport_map(const struct EprkitState *psi_bc,
                                      const struct EprkitState *psi_ab,
                                      double *out,
                                      size_t capacity,
                                      size_t *out_rows,
                                      size_t *out_cols);

/**
 * Sum of singular values of a `rows × cols` matrix.
 *
 * # Safety
 * `data` must hold `2 * rows * cols` doubles and `out` be writable.
 */
enum EprkitStatus eprkit_trace_norm(const double *data, size_t rows, size_t cols, double *out);

/**
 * Uhlmann fidelity `(Tr|√ρ1 √ρ2|)²` of two density operators.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum EprkitStatus eprkit_fidelity(const struct EprkitDensity *rho1,
                                  const struct EprkitDensity *rho2,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EPRKIT_H */

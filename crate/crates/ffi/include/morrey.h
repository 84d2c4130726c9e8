#ifndef MORREY_H
#define MORREY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status code returned by every fallible function.
 */
typedef enum MorreyStatus {
  MORREY_STATUS_OK = 0,
  MORREY_STATUS_NULL_POINTER = 1,
  MORREY_STATUS_INVALID_ARGUMENT = 2,
  MORREY_STATUS_NUMERICAL = 3,
  MORREY_STATUS_PANIC = 4,
} MorreyStatus;

/*
 Exponents `p < q` and dimension `d`.
 */
typedef struct MorreyParams MorreyParams;

/*
 Piecewise radial power profile.
 */
typedef struct MorreyProfile MorreyProfile;

/*
 Normalized witness family.
 */
typedef struct MorreyWitness MorreyWitness;

/*
 Search resolution for numeric norms. See [`morrey_search_config_default`].
 */
typedef struct MorreySearchConfig {
  size_t center_grid;
  size_t radius_grid;
  size_t quad_points;
  size_t mc_samples;
  uint64_t rng_seed;
} MorreySearchConfig;

/*
 A norm value with the ball where it was attained.
 */
typedef struct MorreyNormResult {
  double value;
  double center_dist;
  double radius;
  double abs_uncertainty;
} MorreyNormResult;

/*
 Outcome of checking every signed combination of a witness family.
 */
typedef struct MorreyWitnessResult {
  double min_signed_norm;
  double threshold;
  double theoretical_lower_bound;
  double nj_ratio;
  bool sandwich_holds;
  bool passed;
} MorreyWitnessResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the most recent failed call on this thread, or null.
 The pointer stays valid until the next failing call on this thread.
 */
const char *morrey_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *morrey_version(void);

/*
 Default search resolution.
 */
struct MorreySearchConfig morrey_search_config_default(void);

/*
 # Safety
 `out` must be a valid pointer to writable storage for a handle.
 */
enum MorreyStatus morrey_params_new(double p, double q, size_t d, struct MorreyParams **out);

/*
 # Safety
 `params` must be null or a handle from [`morrey_params_new`] not yet freed.
 */
void morrey_params_free(struct MorreyParams *params);

/*
 `|| |x|^(-d/q) ||` in the Morrey norm.

 # Safety
 `params` must be a live handle and `out` writable.
 */
enum MorreyStatus morrey_power_norm_exact(const struct MorreyParams *params, double *out);

/*
 Largest admissible chunk ratio for `delta`.

 # Safety
 `params` must be a live handle and `out` writable.
 */
enum MorreyStatus morrey_epsilon_upper_bound(const struct MorreyParams *params,
                                             double delta,
                                             double *out);

/*
 `(1 - epsilon^alpha)^(1/p)` times the power norm.

 # Safety
 `params` must be a live handle and `out` writable.
 */
enum MorreyStatus morrey_chunk_lower_bound(const struct MorreyParams *params,
                                           double epsilon,
                                           double *out);

/*
 Fills `out` row-major with the `n x 2^(n-1)` sign matrix.
 `required` (optional) receives the entry count even when `len` is too small.

 # Safety
 `out` must point to `len` writable `int8_t`; `required` may be null.
 */
enum MorreyStatus morrey_sign_matrix(size_t n, int8_t *out, size_t len, size_t *required);

/*
 Builds a profile from `count` segments listed innermost first.
 `r_hi` may be `INFINITY` for the last segment.

 # Safety
 `params` must be a live handle, the three arrays must hold `count`
 values each, and `out` must be writable.
 */
enum MorreyStatus morrey_profile_new(const struct MorreyParams *params,
                                     const double *r_lo,
                                     const double *r_hi,
                                     const double *coeff,
                                     size_t count,
                                     struct MorreyProfile **out);

/*
 Parses a TOML profile document.

 # Safety
 `text` must be a NUL-terminated string and `out` writable.
 */
enum MorreyStatus morrey_profile_from_toml(const char *text, struct MorreyProfile **out);

/*
 # Safety
 `profile` must be null or a live handle, freed at most once.
 */
void morrey_profile_free(struct MorreyProfile *profile);

/*
 Supremum over origin-centered balls.

 # Safety
 `profile` must be a live handle and `out` writable.
 */
enum MorreyStatus morrey_profile_centered_norm(const struct MorreyProfile *profile,
                                               struct MorreyNormResult *out);

/*
 Numeric supremum over all balls. `cfg` may be null for the defaults.

 # Safety
 `profile` must be a live handle, `cfg` null or valid, `out` writable.
 */
enum MorreyStatus morrey_profile_numeric_norm(const struct MorreyProfile *profile,
                                              const struct MorreySearchConfig *cfg,
                                              struct MorreyNormResult *out);

/*
 Builds the witness family for `(n, delta)`. Pass `epsilon = 0` for the
 default chunk ratio. `cfg` may be null.

 # Safety
 `params` must be a live handle, `cfg` null or valid, `out` writable.
 */
enum MorreyStatus morrey_witness_build(const struct MorreyParams *params,
                                       size_t n,
                                       double delta,
                                       double epsilon,
                                       const struct MorreySearchConfig *cfg,
                                       struct MorreyWitness **out);

/*
 Chunk ratio used by the family.

 # Safety
 `witness` must be a live handle and `out` writable.
 */
enum MorreyStatus morrey_witness_epsilon(const struct MorreyWitness *witness, double *out);

/*
 Morrey norm shared by the unnormalized witnesses.

 # Safety
 `witness` must be a live handle and `out` writable.
 */
enum MorreyStatus morrey_witness_shared_norm(const struct MorreyWitness *witness, double *out);

/*
 Copies witness `index` (0-based) into a new profile handle.

 # Safety
 `witness` must be a live handle and `out` writable.
 */
enum MorreyStatus morrey_witness_function(const struct MorreyWitness *witness,
                                          size_t index,
                                          struct MorreyProfile **out);

/*
 Evaluates every signed combination. `cfg` may be null.

 # Safety
 `witness` must be a live handle, `cfg` null or valid, `out` writable.
 */
enum MorreyStatus morrey_witness_verify(const struct MorreyWitness *witness,
                                        const struct MorreySearchConfig *cfg,
                                        struct MorreyWitnessResult *out);

/*
 # Safety
 `witness` must be null or a live handle, freed at most once.
 */
void morrey_witness_free(struct MorreyWitness *witness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MORREY_H */

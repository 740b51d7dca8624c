#ifndef NSBOX_H
#define NSBOX_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes; the values match the command-line exit codes.
typedef enum NsStatus {
  NS_OK = 0,
  NS_FAILED = 1,
  NS_PARSE = 2,
  NS_INVARIANT = 3,
  NS_UNKNOWN_NAME = 4,
  NS_SOLVER = 5,
  NS_NULL_POINTER = 6,
  NS_PANIC = 7,
} NsStatus;

typedef enum NsVertexKind {
  NS_VERTEX_PR = 0,
  NS_VERTEX_DETERMINISTIC = 1,
  NS_VERTEX_MERMIN = 2,
  NS_VERTEX_WHITE_NOISE = 3,
} NsVertexKind;

// Opaque box handle.
typedef struct NsBoxHandle NsBoxHandle;

// Opaque two-qubit state handle.
typedef struct NsStateHandle NsStateHandle;

typedef struct NsMeasures {
  double bell[2][2];
  double mermin[2][2];
  double bell_prod[2][2];
  double g;
  double q;
  double t;
  double c_signed;
  double c;
  double monogamy_lhs;
  bool chsh_violated;
  bool steering_violated;
} NsMeasures;

// Linear-program result. `weights[8a + 4b + 2g + e]` is the weight of the
// deterministic box with labels `(a, b, g, e)`.
typedef struct NsLpResult {
  bool feasible;
  double objective;
  double weights[16];
  uint32_t iterations;
} NsLpResult;

// Canonical decomposition. Components with zero weight are all zero.
// `mermin_gamma` is -1 when there is no Mermin part.
typedef struct NsDecomposition {
  double pr_weight;
  double mermin_weight;
  double residual_weight;
  double pr[16];
  double mermin[16];
  double residual[16];
  uint8_t orientation;
  int8_t mermin_gamma;
  bool degenerate;
} NsDecomposition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *ns_version(void);

// Message of the last failed call on this thread, or an empty string. The
// pointer stays valid until the next call into the library on this thread.
const char *ns_last_error(void);

// Validates 16 probabilities within `tol` and stores a new handle in `out`.
//
// # Safety
// `probs` must point to 16 readable doubles and `out` must be writable.
enum NsStatus ns_box_from_probs(const double *probs, double tol, struct NsBoxHandle **out);

// Parses box JSON (`{"probs": ...}` or `{"state": ..., "settings": ...}`).
//
// # Safety
// `json` must be a NUL-terminated string and `out` must be writable.
enum NsStatus ns_box_from_json(const char *json, double tol, struct NsBoxHandle **out);

// Extremal box or white noise. Unused label bits are ignored.
//
// # Safety
// `out` must be writable.
enum NsStatus ns_box_vertex(enum NsVertexKind kind,
                            uint8_t alpha,
                            uint8_t beta,
                            uint8_t gamma,
                            uint8_t epsilon,
                            struct NsBoxHandle **out);

// Convex mixture of `n` boxes.
//
// # Safety
// `boxes` and `weights` must each point to `n` readable elements, every
// element of `boxes` must be a live handle, and `out` must be writable.
enum NsStatus ns_box_mix(const struct NsBoxHandle *const *boxes,
                         const double *weights,
                         size_t n,
                         struct NsBoxHandle **out);

// Copies the 16 probabilities into `out`.
//
// # Safety
// `b` must be a live handle and `out` must point to 16 writable doubles.
enum NsStatus ns_box_probs(const struct NsBoxHandle *b, double *out);

// Frees a box handle. Null is ignored.
//
// # Safety
// `b` must be null or a handle not yet freed.
void ns_box_free(struct NsBoxHandle *b);

// Bell and Mermin strengths, discords and inequality flags.
//
// # Safety
// `b` must be a live handle and `out` must be writable.
enum NsStatus ns_measure(const struct NsBoxHandle *b, double tol, struct NsMeasures *out);

// Largest weight of a local component.
//
// # Safety
// `b` must be a live handle and `out` must be writable.
enum NsStatus ns_local_content(const struct NsBoxHandle *b, struct NsLpResult *out);

// Membership in the local polytope.
//
// # Safety
// `b` must be a live handle and `out` must be writable.
enum NsStatus ns_local_membership(const struct NsBoxHandle *b, struct NsLpResult *out);

// PR part, Mermin part and local remainder.
//
// # Safety
// `b` must be a live handle and `out` must be writable.
enum NsStatus ns_full_canonical(const struct NsBoxHandle *b, struct NsDecomposition *out);

// PR part and local remainder.
//
// # Safety
// `b` must be a live handle and `out` must be writable.
enum NsStatus ns_bell_canonical(const struct NsBoxHandle *b, struct NsDecomposition *out);

// Density matrix from row-major real and imaginary parts (16 doubles each).
//
// # Safety
// `re` and `im` must point to 16 readable doubles and `out` must be writable.
enum NsStatus ns_state_from_density(const double *re, const double *im, struct NsStateHandle **out);

// `(|01> + |10>) / sqrt2`.
//
// # Safety
// `out` must be writable.
enum NsStatus ns_state_psi_plus(struct NsStateHandle **out);

// Schmidt state with `s = sin 2 theta` in `[0, 1]`.
//
// # Safety
// `out` must be writable.
enum NsStatus ns_state_schmidt(double s, struct NsStateHandle **out);

// Werner state with visibility `p` in `[0, 1]`.
//
// # Safety
// `out` must be writable.
enum NsStatus ns_state_werner(double p, struct NsStateHandle **out);

// Colored-noise state with weight `p` in `[0, 1]`.
//
// # Safety
// `out` must be writable.
enum NsStatus ns_state_colored(double p, struct NsStateHandle **out);

// Frees a state handle. Null is ignored.
//
// # Safety
// `s` must be null or a handle not yet freed.
void ns_state_free(struct NsStateHandle *s);

// Born-rule box. `directions` holds 12 doubles: the unit vectors `a0, a1,
// b0, b1` as `(x, y, z)` triples.
//
// # Safety
// `state` must be a live handle, `directions` must point to 12 readable
// doubles and `out` must be writable.
enum NsStatus ns_born_box(const struct NsStateHandle *state,
                          const double *directions,
                          struct NsBoxHandle **out);

// Number of registered scenarios.
size_t ns_scenario_count(void);

// Name of scenario `index` as a static string, or null when out of range.
const char *ns_scenario_name(size_t index);

// Box of scenario `name` at parameter `param`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` must be writable.
enum NsStatus ns_scenario_box(const char *name, double param, struct NsBoxHandle **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NSBOX_H */

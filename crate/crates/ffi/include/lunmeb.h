#ifndef LUNMEB_H
#define LUNMEB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LunmebMethod {
  LUNMEB_METHOD_ALTERNATING_PROJECTION = 0,
  LUNMEB_METHOD_RESIDUAL_DESCENT = 1,
} LunmebMethod;

typedef enum LunmebStatus {
  LUNMEB_STATUS_OK = 0,
  LUNMEB_STATUS_NULL_POINTER = 1,
  LUNMEB_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The input was well formed but failed a mathematical check.
   */
  LUNMEB_STATUS_VALIDATION = 3,
  /**
   * The extension search ended without a result.
   */
  LUNMEB_STATUS_NOT_FOUND = 4,
  LUNMEB_STATUS_PARSE = 5,
  LUNMEB_STATUS_PANIC = 6,
} LunmebStatus;

/**
 * Opaque basis handle.
 */
typedef struct LunmebBasis LunmebBasis;

typedef struct LunmebTolerance {
  double verify_tol;
  double search_tol;
} LunmebTolerance;

typedef struct LunmebSearchParams {
  size_t restarts;
  size_t max_iters;
  uint64_t seed_value;
  enum LunmebMethod method;
  struct LunmebTolerance tol;
} LunmebSearchParams;

typedef struct LunmebVerifyReport {
  size_t size;
  bool all_non_maximal;
  bool orthonormal;
  double max_offdiagonal;
  double max_diagonal_deviation;
  bool locally_connected;
  size_t disconnected_pairs;
  double max_connector_error;
  bool all_pass;
} LunmebVerifyReport;

typedef struct LunmebExtendResult {
  bool found;
  double residual;
  double best_residual;
  size_t restarts_used;
  size_t iterations_total;
} LunmebExtendResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lunmeb_version(void);

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *lunmeb_last_error(void);

struct LunmebTolerance lunmeb_default_tolerance(void);

struct LunmebSearchParams lunmeb_default_search_params(void);

/**
 * Builds the cyclic basis for the Schmidt coefficients `schmidt[0..d]`,
 * which are normalised first. `tol` may be null for the defaults.
 */
enum LunmebStatus lunmeb_basis_build_cyclic(const double *schmidt,
                                            size_t d,
                                            const struct LunmebTolerance *tol,
                                            struct LunmebBasis **out);

void lunmeb_basis_free(struct LunmebBasis *basis);

/**
 * Local dimension, or 0 for a null handle.
 */
size_t lunmeb_basis_dim(const struct LunmebBasis *basis);

/**
 * Number of members, or 0 for a null handle.
 */
size_t lunmeb_basis_len(const struct LunmebBasis *basis);

/**
 * Copies generator `index` into `out`, which must hold `2 * d * d` doubles.
 */
enum LunmebStatus lunmeb_basis_generator(const struct LunmebBasis *basis,
                                         size_t index,
                                         double *out,
                                         size_t out_len);

/**
 * Checks orthonormality, non-maximality and pairwise local connection. The
 * return value is `OK` whenever the check ran; inspect `all_pass`.
 */
enum LunmebStatus lunmeb_basis_verify(const struct LunmebBasis *basis,
                                      const struct LunmebTolerance *tol,
                                      struct LunmebVerifyReport *out);

/**
 * Searches for a unitary extending the basis by one member.
 *
 * `params` may be null for the defaults. `result` is always filled when the
 * search ran. On `OK` the unitary is written to `out_v` if it is non-null
 * (`2 * d * d` doubles); `NOT_FOUND` means the search gave up, which is not a
 * proof that no extension exists. The basis itself is left unchanged.
 */
enum LunmebStatus lunmeb_basis_extend(const struct LunmebBasis *basis,
                                      const struct LunmebSearchParams *params,
                                      struct LunmebExtendResult *result,
                                      double *out_v,
                                      size_t out_len);

/**
 * Appends the member generated by the unitary in `v` (`2 * d * d` doubles).
 * Orthogonality is not checked here; call [`lunmeb_basis_verify`].
 */
enum LunmebStatus lunmeb_basis_append(struct LunmebBasis *basis,
                                      const double *v,
                                      size_t len,
                                      const struct LunmebTolerance *tol);

/**
 * Parses a JSON basis file. `tol` may be null for the defaults.
 */
enum LunmebStatus lunmeb_basis_from_json(const char *json,
                                         const struct LunmebTolerance *tol,
                                         struct LunmebBasis **out);

/**
 * Serialises the basis. Release the string with [`lunmeb_string_free`].
 */
enum LunmebStatus lunmeb_basis_to_json(const struct LunmebBasis *basis, char **out);

void lunmeb_string_free(char *s);

/**
 * Writes the Weyl operator `U_{nm}` of dimension `d` into `out`.
 */
enum LunmebStatus lunmeb_weyl_operator(size_t d, size_t n, size_t m, double *out, size_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LUNMEB_H */

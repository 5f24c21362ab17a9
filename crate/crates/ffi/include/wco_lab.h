#ifndef WCO_LAB_H
#define WCO_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Verdict bits written by [`wco_operator_classify`].
#define WCO_VERDICT_UNITARY 1

#define WCO_VERDICT_SELF_ADJOINT 2

#define WCO_VERDICT_NORMAL_FIXED_POINT 4

#define WCO_VERDICT_NORMAL_LFM 8

// Result of every call.
typedef enum WcoStatus {
  WCO_STATUS_OK = 0,
  WCO_STATUS_NULL_POINTER = 1,
  WCO_STATUS_INVALID_UTF8 = 2,
  // Malformed job or argument.
  WCO_STATUS_PARSE = 3,
  // Mathematical precondition violated (not a self-map, point outside the ball, ...).
  WCO_STATUS_DOMAIN = 4,
  WCO_STATUS_NUMERICAL = 5,
  // The caller's buffer is too small; the required size has been written.
  WCO_STATUS_BUFFER_TOO_SMALL = 6,
  WCO_STATUS_PANIC = 7,
} WcoStatus;

// Opaque linear fractional self-map.
typedef struct WcoMap WcoMap;

// Opaque operator symbol.
typedef struct WcoOperator WcoOperator;

typedef struct WcoComplex {
  double re;
  double im;
} WcoComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the next call.
const char *wco_last_error_message(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void wco_string_free(char *s);

// Runs a JSON job and returns the JSON report in `*out_report`. `command` may be NULL when the
// job names its own command.
//
// # Safety
// `job_json` and (if non-null) `command` must be NUL-terminated strings; `out_report` must be
// writable.
enum WcoStatus wco_run_job(const char *job_json, const char *command, char **out_report);

// Number of basis monomials of degree at most `degree_cap` in `n` variables.
//
// # Safety
// `out_len` must be writable.
enum WcoStatus wco_basis_len(size_t n, uint32_t degree_cap, size_t *out_len);

// z -> (A z + B) / (<z, C> + d). `a` is n*n row-major, `b` and `c` have length n.
//
// # Safety
// Arrays must hold the stated number of elements; `out` must be writable.
enum WcoStatus wco_map_new(size_t n,
                           const struct WcoComplex *a,
                           const struct WcoComplex *b,
                           const struct WcoComplex *c,
                           struct WcoComplex d,
                           struct WcoMap **out);

// The Moebius involution exchanging 0 and `a`.
//
// # Safety
// `a` must hold n elements; `out` must be writable.
enum WcoStatus wco_map_moebius(size_t n, const struct WcoComplex *a, struct WcoMap **out);

// # Safety
// `map` must come from this library and not have been freed. NULL is ignored.
void wco_map_free(struct WcoMap *map);

// # Safety
// `map` must be a live handle and `out_n` writable.
enum WcoStatus wco_map_dim(const struct WcoMap *map, size_t *out_n);

// Writes phi(z) to `out` (n elements).
//
// # Safety
// `z` and `out` must hold n elements, n being the map dimension.
enum WcoStatus wco_map_apply(const struct WcoMap *map,
                             const struct WcoComplex *z,
                             struct WcoComplex *out);

// # Safety
// `map` must be a live handle and `out` writable.
enum WcoStatus wco_map_is_automorphism(const struct WcoMap *map, bool *out);

// W = alpha K_c composed with `map`. `c` holds n elements; NULL means the origin.
//
// # Safety
// `map` must be a live handle, `c` NULL or n elements, `out` writable.
enum WcoStatus wco_operator_new_kernel(double gamma,
                                       const struct WcoMap *map,
                                       struct WcoComplex alpha,
                                       const struct WcoComplex *c,
                                       struct WcoOperator **out);

// lambda W_{k_a, psi} with a = psi^-1(0); `map` must be an automorphism and |lambda| = 1.
//
// # Safety
// `map` must be a live handle and `out` writable.
enum WcoStatus wco_operator_new_unitary(double gamma,
                                        const struct WcoMap *map,
                                        struct WcoComplex lambda,
                                        struct WcoOperator **out);

// # Safety
// `op` must come from this library and not have been freed. NULL is ignored.
void wco_operator_free(struct WcoOperator *op);

// `*out = first * second` as operators.
//
// # Safety
// Both handles must be live and `out` writable.
enum WcoStatus wco_operator_product(const struct WcoOperator *first,
                                    const struct WcoOperator *second,
                                    struct WcoOperator **out);

// Closed-form adjoint; fails with `WCO_STATUS_DOMAIN` unless the weight is alpha K_{sigma(0)}.
//
// # Safety
// `op` must be live and `out` writable.
enum WcoStatus wco_operator_adjoint(const struct WcoOperator *op, struct WcoOperator **out);

// Weight value f(z).
//
// # Safety
// `z` must hold n elements and `out` be writable.
enum WcoStatus wco_operator_weight_at(const struct WcoOperator *op,
                                      const struct WcoComplex *z,
                                      struct WcoComplex *out);

// Runs the four classifiers and writes a bitmask of `WCO_VERDICT_*` flags. Non-positive
// tolerances select the defaults.
//
// # Safety
// `op` must be live and `out_verdicts` writable.
enum WcoStatus wco_operator_classify(const struct WcoOperator *op,
                                     double tol_symbol,
                                     double tol_matrix,
                                     uint32_t *out_verdicts);

// Compression to monomials of degree at most `degree_cap`, row-major into `buf`
// (`buf_len` complex entries). `*out_size` receives the matrix size N; when N*N exceeds
// `buf_len` nothing is written and `WCO_STATUS_BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `buf` must hold `buf_len` elements (may be NULL when `buf_len` is 0); `out_size` writable.
enum WcoStatus wco_operator_compress(const struct WcoOperator *op,
                                     uint32_t degree_cap,
                                     struct WcoComplex *buf,
                                     size_t buf_len,
                                     size_t *out_size);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WCO_LAB_H */

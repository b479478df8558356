#ifndef NYMAN_H
#define NYMAN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum NymanStatus {
  NYMAN_STATUS_OK = 0,
  NYMAN_STATUS_NULL_POINTER = 1,
  NYMAN_STATUS_INVALID_UTF8 = 2,
  NYMAN_STATUS_PARSE = 3,
  NYMAN_STATUS_DOMAIN = 4,
  NYMAN_STATUS_POLE = 5,
  NYMAN_STATUS_PRECISION = 6,
  NYMAN_STATUS_CONDITIONING = 7,
  NYMAN_STATUS_NOT_POSITIVE_DEFINITE = 8,
  NYMAN_STATUS_LENGTH_MISMATCH = 9,
  NYMAN_STATUS_IO = 10,
  NYMAN_STATUS_PANIC = 11,
} NymanStatus;

/**
 * Finite linear combination of atoms.
 */
typedef struct NymanElement NymanElement;

/**
 * Inner-product engine with its caches.
 */
typedef struct NymanEngine NymanEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *nyman_last_error_message(void);

/**
 * New engine; `abs_tol <= 0` or `max_terms == 0` select the defaults.
 */
struct NymanEngine *nyman_engine_new(double abs_tol, uint64_t max_terms);

/**
 * # Safety
 * `engine` must come from `nyman_engine_new` and not be freed twice.
 */
void nyman_engine_free(struct NymanEngine *engine);

/**
 * Parses text such as `"e:2 - 1/2*e:1"` into `*out_element`.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out_element` must be writable.
 */
enum NymanStatus nyman_element_parse(const char *text, struct NymanElement **out_element);

/**
 * # Safety
 * `element` must come from `nyman_element_parse` and not be freed twice.
 */
void nyman_element_free(struct NymanElement *element);

/**
 * JSON form of an element; release with `nyman_string_free`.
 *
 * # Safety
 * `element` must be a live handle; `out_json` must be writable.
 */
enum NymanStatus nyman_element_to_json(const struct NymanElement *element, char **out_json);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void nyman_string_free(char *s);

/**
 * `⟨a, b⟩` with its error bound.
 *
 * # Safety
 * Handles must be live; output pointers must be writable.
 */
enum NymanStatus nyman_inner_product(const struct NymanEngine *engine,
                                     const struct NymanElement *a,
                                     const struct NymanElement *b,
                                     double *out_value,
                                     double *out_err);

/**
 * # Safety
 * `out_mu` must be writable.
 */
enum NymanStatus nyman_mobius(uint64_t n, int8_t *out_mu);

/**
 * `ζ(s)` for `Re s > 0`, `s ≠ 1`.
 *
 * # Safety
 * Output pointers must be writable.
 */
enum NymanStatus nyman_zeta(double re, double im, double *out_re, double *out_im);

/**
 * `ω(z)` for `|z| ≤ 1`.
 *
 * # Safety
 * `out_value` must be writable.
 */
enum NymanStatus nyman_omega(double z, double *out_value);

/**
 * `ψ(x)` for `x > 0`.
 *
 * # Safety
 * `out_value` must be writable.
 */
enum NymanStatus nyman_digamma(double x, double *out_value);

/**
 * `u(n; f)`; `functional != 0` evaluates it as an inner product.
 *
 * # Safety
 * Handles must be live; output pointers must be writable.
 */
enum NymanStatus nyman_u(const struct NymanEngine *engine,
                         const struct NymanElement *f,
                         uint64_t n,
                         int32_t functional,
                         double *out_value,
                         double *out_err);

/**
 * `w(n; f) = (μ ∗ u)(n)`.
 *
 * # Safety
 * Handles must be live; output pointers must be writable.
 */
enum NymanStatus nyman_w(const struct NymanEngine *engine,
                         const struct NymanElement *f,
                         uint64_t n,
                         int32_t functional,
                         double *out_value,
                         double *out_err);

/**
 * Best approximation of `χ` from the size-`n` span.
 *
 * `variant` is 0 for `e_1..e_n`, 1 for `e_k − e_1/k, 2 ≤ k ≤ n`. The
 * coefficients are written to `out_coefficients`, which must hold
 * `out_len` values; `*out_written` receives the basis size.
 *
 * # Safety
 * `engine` must be live; `out_coefficients` must hold `out_len` doubles;
 * the scalar outputs must be writable.
 */
enum NymanStatus nyman_project(const struct NymanEngine *engine,
                               size_t n,
                               int32_t variant,
                               int32_t extended,
                               double *out_coefficients,
                               size_t out_len,
                               size_t *out_written,
                               double *out_distance_sq,
                               double *out_condition);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NYMAN_H */

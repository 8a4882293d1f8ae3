#ifndef SZLAB_H
#define SZLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SzCountMethod {
  SZ_COUNT_METHOD_NAIVE = 0,
  SZ_COUNT_METHOD_SPECTRAL = 1,
} SzCountMethod;

typedef enum SzStatus {
  SZ_STATUS_OK = 0,
  SZ_STATUS_NULL_POINTER = 1,
  SZ_STATUS_INVALID_ARGUMENT = 2,
  SZ_STATUS_CONTRACT_VIOLATION = 3,
  SZ_STATUS_POSTCONDITION_VIOLATION = 4,
  SZ_STATUS_INTERNAL = 5,
  SZ_STATUS_PANIC = 6,
} SzStatus;

// A complex-valued function on Z/N.
typedef struct SzCyclic SzCyclic;

// A real weight function on V x V with entries in [-1, 1].
typedef struct SzEdge SzEdge;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the next failing
// call on the same thread; do not free.
const char *sz_last_error_message(void);

// Builds a function on Z/n from real parts and optional imaginary parts (`im` may be null).
//
// # Safety
// `re` (and `im` if non-null) must point to `n` readable doubles; `out` must be writable.
enum SzStatus sz_cyclic_new(const double *re, const double *im, size_t n, struct SzCyclic **out);

// # Safety
// `f` must be null or a handle from this library not yet freed.
void sz_cyclic_free(struct SzCyclic *f);

// # Safety
// `f` must be a live handle; `out` must be writable.
enum SzStatus sz_cyclic_modulus(const struct SzCyclic *f, size_t *out);

// Copies the values into `re` / `im` (either may be null), each of length `n`.
//
// # Safety
// Non-null buffers must hold `n` writable doubles, `n` equal to the modulus.
enum SzStatus sz_cyclic_values(const struct SzCyclic *f, double *re, double *im, size_t n);

// Function described by a generator spec such as `quadratic_phase:xi=1`; `seed` fills in
// any unspecified seed.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be writable.
enum SzStatus sz_generate_function(const char *spec,
                                   size_t n,
                                   uint64_t seed,
                                   struct SzCyclic **out);

// # Safety
// `f` must be a live handle; `out` must be writable.
enum SzStatus sz_u2_norm(const struct SzCyclic *f, double *out);

// # Safety
// `f` must be a live handle; `out` must be writable.
enum SzStatus sz_u3_norm(const struct SzCyclic *f, double *out);

// `E_{x,r} f0(x) f1(x+r) f2(x+2r)`.
//
// # Safety
// All handles must be live; `re` and `im` must be writable.
enum SzStatus sz_ap_form3(const struct SzCyclic *f0,
                          const struct SzCyclic *f1,
                          const struct SzCyclic *f2,
                          enum SzCountMethod method,
                          double *re,
                          double *im);

// Row-major `n x n` weights.
//
// # Safety
// `values` must hold `n * n` readable doubles; `out` must be writable.
enum SzStatus sz_edge_new(const double *values, size_t n, struct SzEdge **out);

// # Safety
// `g` must be null or a handle from this library not yet freed.
void sz_edge_free(struct SzEdge *g);

// # Safety
// `g` must be a live handle; `out` must be writable.
enum SzStatus sz_box2_norm(const struct SzEdge *g, double *out);

// `E_{x,y,z} f(x,y) g(y,z) h(z,x)`.
//
// # Safety
// All handles must be live; `out` must be writable.
enum SzStatus sz_triangle_form(const struct SzEdge *f,
                               const struct SzEdge *g,
                               const struct SzEdge *h,
                               double *out);

// Average of `Λ_{W,b}` over k-term progressions with `d ≥ 1` inside `[1, kN]`.
//
// # Safety
// `out` must be writable.
enum SzStatus sz_prime_ap_average(uint32_t k, uint64_t n, uint64_t w, uint64_t b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SZLAB_H */

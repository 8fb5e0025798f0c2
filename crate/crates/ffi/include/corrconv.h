#ifndef CORRCONV_H
#define CORRCONV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_NULL_POINTER = 1,
  CC_STATUS_INVALID_ARGUMENT = 2,
  CC_STATUS_INVALID_CODE = 3,
  CC_STATUS_CATASTROPHIC = 4,
  CC_STATUS_BUFFER_TOO_SMALL = 5,
  CC_STATUS_INTERNAL = 6,
} CcStatus;

// Opaque rate-1/2 code with its trellis.
typedef struct CcCode CcCode;

// Opaque weight spectrum, entries sorted by `(w, d)`.
typedef struct CcSpectrum CcSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *cc_status_message(enum CcStatus status);

// Creates a code from generator and feedback strings (binary with the
// highest power first, or octal with an `o` prefix) and memory `nu`.
//
// # Safety
// String arguments must be NUL-terminated; `out` must be writable.
enum CcStatus cc_code_new(const char *g1,
                          const char *g2,
                          const char *h,
                          uint32_t nu,
                          struct CcCode **out);

// Creates one of the built-in codes: `c80`, `c90`, `c95` or `nr3`.
//
// # Safety
// `name` must be NUL-terminated; `out` must be writable.
enum CcStatus cc_code_builtin(const char *name, struct CcCode **out);

// Releases a code. Null is ignored.
//
// # Safety
// `code` must come from `cc_code_new`/`cc_code_builtin` and not be used again.
void cc_code_free(struct CcCode *code);

// Memory `nu` of the code, 0 for a null handle.
//
// # Safety
// `code` must be null or a live handle.
uint32_t cc_code_memory(const struct CcCode *code);

// # Safety
// `code` must be null or a live handle.
bool cc_code_is_recursive(const struct CcCode *code);

// # Safety
// `code` must be null or a live handle.
bool cc_code_is_catastrophic(const struct CcCode *code);

// Number of coded bits for `k` information bits.
//
// # Safety
// `code` must be null or a live handle.
size_t cc_code_coded_len(const struct CcCode *code, size_t k, bool terminated);

// Encodes `k` bits (values 0/1) into `out`, which must hold
// `cc_code_coded_len(code, k, terminate)` bytes.
//
// # Safety
// Pointers must be valid for the given lengths.
enum CcStatus cc_encode(const struct CcCode *code,
                        const uint8_t *info,
                        size_t k,
                        bool terminate,
                        uint8_t *out,
                        size_t out_len);

// Soft-output Viterbi decoding. `llr` holds `n_llr` channel LLRs
// (positive favours bit 0); `apriori` holds P(bit = 1) per information bit
// or is null for a uniform prior. `hard` and `posterior` receive `k`
// entries, where `k = n_llr / 2 - (terminated ? nu : 0)`; `posterior` may be
// null.
//
// # Safety
// Pointers must be valid for the given lengths.
enum CcStatus cc_sova(const struct CcCode *code,
                      const double *llr,
                      size_t n_llr,
                      const double *apriori,
                      bool terminated,
                      uint8_t *hard,
                      double *posterior,
                      size_t k);

// Iterative joint decoding of two streams sharing `code`. `iterations` of
// 0 selects the default (5). `iterations_run` may be null.
//
// # Safety
// Pointers must be valid for the given lengths.
enum CcStatus cc_joint_decode(const struct CcCode *code,
                              const double *llr_x,
                              const double *llr_y,
                              size_t n_llr,
                              double rho,
                              uint32_t iterations,
                              bool terminated,
                              uint8_t *x_hat,
                              uint8_t *y_hat,
                              size_t k,
                              uint32_t *iterations_run);

// Pairwise error probability averaged over side-information patterns.
//
// # Safety
// `out` must be writable.
enum CcStatus cc_averaged_pep(uint32_t d_z,
                              uint32_t d_x,
                              double r,
                              double rho,
                              double gamma_b,
                              double *out);

// Packet error union bound of a rate-1/2 code at `gamma_b_db`, using the
// spectrum up to `d_free + d_max_offset`.
//
// # Safety
// `code` must be a live handle and `out` writable.
enum CcStatus cc_packet_bound(const struct CcCode *code,
                              double rho,
                              double gamma_b_db,
                              size_t l_pkt,
                              uint32_t d_max_offset,
                              double *out);

// Enumerates the weight spectrum up to `d_free + d_max_offset`.
//
// # Safety
// `code` must be a live handle and `out` writable.
enum CcStatus cc_spectrum_new(const struct CcCode *code,
                              uint32_t d_max_offset,
                              struct CcSpectrum **out);

// # Safety
// `s` must come from `cc_spectrum_new` and not be used again. Null is ignored.
void cc_spectrum_free(struct CcSpectrum *s);

// Number of nonzero `(w, d)` entries.
//
// # Safety
// `s` must be null or a live handle.
size_t cc_spectrum_len(const struct CcSpectrum *s);

// # Safety
// `s` must be null or a live handle.
uint32_t cc_spectrum_d_free(const struct CcSpectrum *s);

// # Safety
// `s` must be null or a live handle.
uint32_t cc_spectrum_d_max(const struct CcSpectrum *s);

// Entry `index` in `(w, d)` order.
//
// # Safety
// `s` must be a live handle; output pointers must be writable.
enum CcStatus cc_spectrum_get(const struct CcSpectrum *s,
                              size_t index,
                              uint32_t *w,
                              uint32_t *d,
                              uint64_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORRCONV_H */

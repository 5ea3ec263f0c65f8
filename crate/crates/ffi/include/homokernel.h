#ifndef HOMOKERNEL_H
#define HOMOKERNEL_H

#include <stddef.h>
#include <stdint.h>

/**
 * Result codes.
 */
typedef enum HkStatus {
  HK_STATUS_OK = 0,
  HK_STATUS_NULL_POINTER = 1,
  HK_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad configuration, parse error or inadmissible parameters.
   */
  HK_STATUS_INVALID_ARGUMENT = 3,
  /**
   * A point or parameter outside the domain's range.
   */
  HK_STATUS_OUT_OF_RANGE = 4,
  /**
   * The kernel is singular or non-integrable at the requested input.
   */
  HK_STATUS_SINGULAR = 5,
  /**
   * Quadrature or iteration did not converge, or a value was not finite.
   */
  HK_STATUS_NUMERICAL = 6,
  /**
   * The output buffer is too small.
   */
  HK_STATUS_BUFFER_TOO_SMALL = 7,
  /**
   * A Rust panic was caught at the boundary.
   */
  HK_STATUS_INTERNAL = 8,
} HkStatus;

/**
 * Opaque measure space with its dilation group.
 */
typedef struct HkDomain HkDomain;

/**
 * Opaque real-valued homogeneous kernel bound to its domain.
 */
typedef struct HkKernel HkKernel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated)
 * and returns its length without the terminator. Passing a null `buf` or a
 * short `len` only reports the length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t hk_last_error(char *buf, size_t len);

/**
 * Static name of a status code.
 */
const char *hk_status_name(enum HkStatus status);

/**
 * Parses a domain from `{"tag": ..., "R": ..., "C": ..., "alpha": ...}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HkStatus hk_domain_from_json(const char *json, struct HkDomain **out);

/**
 * # Safety
 * `d` must be null or a handle from `hk_domain_from_json` not yet freed.
 */
void hk_domain_free(struct HkDomain *d);

/**
 * `Γ_C(t)` for `t = r²` on a polar domain.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum HkStatus hk_domain_gamma_c(const struct HkDomain *d, double t, double *out);

/**
 * Acts by the dilation `(a, φ)` on the polar or cylinder point `(c0, c1)`.
 *
 * # Safety
 * `d` must be a live handle; `out` must hold two doubles.
 */
enum HkStatus hk_domain_act(const struct HkDomain *d,
                            double a,
                            double phi,
                            double c0,
                            double c1,
                            double *out);

/**
 * Measures the annulus `r_inner < r < r_outer` and its image under `(a, φ)`
 * by quadrature; writes the ratio and the character `λ_g`.
 *
 * # Safety
 * `d` must be a live handle; `ratio` and `expected` must be writable.
 */
enum HkStatus hk_domain_verify_dilation(const struct HkDomain *d,
                                        double a,
                                        double phi,
                                        double r_inner,
                                        double r_outer,
                                        double *ratio,
                                        double *expected);

/**
 * Builds a kernel from a generating-function preset (`one`,
 * `angular:a=cos`, `gl2:antisym`, ...).
 *
 * # Safety
 * `d` must be a live handle, `name` a NUL-terminated string, `out` writable.
 */
enum HkStatus hk_kernel_from_preset(const struct HkDomain *d,
                                    const char *name,
                                    struct HkKernel **out);

/**
 * Builds a kernel from a generating-function expression in `eta` (or `u`)
 * and `psi`.
 *
 * # Safety
 * `d` must be a live handle, `src` a NUL-terminated string, `out` writable.
 */
enum HkStatus hk_kernel_from_expr(const struct HkDomain *d, const char *src, struct HkKernel **out);

/**
 * # Safety
 * `k` must be null or a live kernel handle.
 */
void hk_kernel_free(struct HkKernel *k);

/**
 * `K(x, y)` in the domain's chart coordinates.
 *
 * # Safety
 * `k` must be a live handle; `out` writable.
 */
enum HkStatus hk_kernel_eval(const struct HkKernel *k,
                             double x0,
                             double x1,
                             double y0,
                             double y1,
                             double *out);

/**
 * Sampled strong-homogeneity check; writes the worst relative residual and
 * 1 when it is within `tol`, else 0.
 *
 * # Safety
 * `k` must be a live handle; outputs writable.
 */
enum HkStatus hk_kernel_check_homogeneity(const struct HkKernel *k,
                                          size_t samples,
                                          double tol,
                                          uint64_t seed,
                                          double *max_residual,
                                          int32_t *pass);

/**
 * Hardy–Littlewood constant of a named kernel (`hlp:1/(x+y)`,
 * `hlp:indicator`, `riesz:alpha=…`, `angular:a=…`); `divergent` is set to
 * 1 when the integral diverges, in which case `kappa` is +∞.
 *
 * # Safety
 * `name` must be a NUL-terminated string; outputs writable.
 */
enum HkStatus hk_hl_kappa(const char *name, double p, double *kappa, int32_t *divergent);

/**
 * Stabilizer witness for `x ∈ ℝⁿ`: on success `found` is 1 and `out`
 * (row-major, `n·n` doubles) holds `h` with `h e₁ = e₁`, `h x = x`,
 * `det h = 2`; `found` is 0 when none exists (`n = 2`, `x` off the `e₁`
 * axis).
 *
 * # Safety
 * `x` must hold `n` doubles and `out` `out_len` doubles.
 */
enum HkStatus hk_stabilizer_witness(const double *x,
                                    size_t n,
                                    double *out,
                                    size_t out_len,
                                    int32_t *found);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOMOKERNEL_H */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef NU_METRIC_H
#define NU_METRIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NmStatus {
  NM_STATUS_OK = 0,
  NM_STATUS_NULL_POINTER = 1,
  NM_STATUS_INVALID_UTF8 = 2,
  NM_STATUS_PARSE = 3,
  NM_STATUS_VALIDATION = 4,
  NM_STATUS_POLE_HIT = 5,
  NM_STATUS_DOMAIN = 6,
  NM_STATUS_UNSUPPORTED_DELAY = 7,
  NM_STATUS_DELAY_NOT_ALLOWED = 8,
  NM_STATUS_AXIS_ROOT = 9,
  NM_STATUS_NOT_COPRIME = 10,
  NM_STATUS_CURVE_THROUGH_ZERO = 11,
  NM_STATUS_NEEDS_REFINEMENT = 12,
  NM_STATUS_LENGTH_NOT_POWER_OF_TWO = 13,
  NM_STATUS_DEGENERATE_PAIR = 14,
  NM_STATUS_SHAPE_MISMATCH = 15,
  NM_STATUS_PANIC = 99,
} NmStatus;

typedef enum NmDomain {
  NM_DOMAIN_HALF_PLANE = 0,
  NM_DOMAIN_DISK = 1,
} NmDomain;

// Opaque handle to normalized coprime factors.
typedef struct NmFactors NmFactors;

// Opaque plant handle.
typedef struct NmPlant NmPlant;

typedef struct NmComplex {
  double re;
  double im;
} NmComplex;

// Radii `1 - 2^-k` for `k = k_min..=k_max`, `samples0` points per circle.
typedef struct NmScanConfig {
  uint32_t k_min;
  uint32_t k_max;
  size_t samples0;
  double eps_inv;
  size_t tail;
} NmScanConfig;

typedef struct NmDistance {
  double value;
  double sup_norm;
  bool converged;
  bool condition_holds;
  bool marginal;
  // NaN when no scanned radius starts a passing run.
  double rho_star;
} NmDistance;

typedef struct NmMargin {
  double mu;
  // NaN when the loop is not stabilized.
  double h_norm;
  bool stabilized;
} NmMargin;

typedef struct NmWinding {
  int64_t winding;
  double min_modulus;
  uint32_t refinement_depth;
} NmWinding;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread (empty after a success).
// The pointer stays valid until the next call into this library on the
// same thread.
const char *nm_last_error_message(void);

// Builds `num(x) / den(x) * exp(-s delay)` from ascending coefficients,
// cancelling common roots.
//
// # Safety
// `num` and `den` must point to `num_len` and `den_len` doubles; `out` must be writable.
enum NmStatus nm_plant_new(const double *num,
                           size_t num_len,
                           const double *den,
                           size_t den_len,
                           double delay,
                           enum NmDomain domain,
                           struct NmPlant **out);

// Parses the JSON plant format used by the command-line tool.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum NmStatus nm_plant_from_json(const char *json, struct NmPlant **out);

// # Safety
// `plant` must come from this library and not be used afterwards; null is ignored.
void nm_plant_free(struct NmPlant *plant);

// Value at a point of the closed unit disk.
//
// # Safety
// `plant` must be a live handle and `out` writable.
enum NmStatus nm_plant_eval(const struct NmPlant *plant, struct NmComplex z, struct NmComplex *out);

// Normalized coprime factorization.
//
// # Safety
// `plant` must be a live handle and `out` writable.
enum NmStatus nm_factorize(const struct NmPlant *plant, struct NmFactors **out);

// `max | |N|^2 + |D|^2 - 1 |` on the boundary; NaN for a null handle.
//
// # Safety
// `factors` must be a live handle or null.
double nm_factors_residual(const struct NmFactors *factors);

// Lower bound of `|N| + |D|` over the closed disk; NaN for a null handle.
//
// # Safety
// `factors` must be a live handle or null.
double nm_factors_corona_gap(const struct NmFactors *factors);

// JSON `{"N": {...}, "D": {...}}`; release with [`nm_string_free`].
//
// # Safety
// `factors` must be a live handle and `out` writable.
enum NmStatus nm_factors_to_json(const struct NmFactors *factors, char **out);

// # Safety
// `s` must come from this library and not be used afterwards; null is ignored.
void nm_string_free(char *s);

// # Safety
// `factors` must come from this library and not be used afterwards; null is ignored.
void nm_factors_free(struct NmFactors *factors);

// The default scan: `k = 3..=14`, 1024 samples, floor 1e-9, tail 3.
struct NmScanConfig nm_scan_default(void);

// Extended nu-metric. A null `cfg` selects [`nm_scan_default`].
//
// # Safety
// Plant handles must be live, `cfg` valid or null, `out` writable.
enum NmStatus nm_distance(const struct NmPlant *p1,
                          const struct NmPlant *p2,
                          const struct NmScanConfig *cfg,
                          struct NmDistance *out);

// Classical unit-circle nu-metric; delay plants give `DelayNotAllowed`.
//
// # Safety
// Plant handles must be live and `out` writable.
enum NmStatus nm_distance_classical(const struct NmPlant *p1,
                                    const struct NmPlant *p2,
                                    size_t samples,
                                    double *out);

// Stability margin of the positive-feedback loop of `plant` and `controller`.
//
// # Safety
// Handles must be live, `cfg` valid or null, `out` writable.
enum NmStatus nm_margin(const struct NmPlant *plant,
                        const struct NmPlant *controller,
                        const struct NmScanConfig *cfg,
                        struct NmMargin *out);

// Winding number of the plant around the circle `|z| = radius`.
//
// # Safety
// `plant` must be a live handle and `out` writable.
enum NmStatus nm_winding(const struct NmPlant *plant,
                         double radius,
                         size_t samples,
                         double eps_inv,
                         struct NmWinding *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NU_METRIC_H */

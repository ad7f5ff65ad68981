#ifndef SCHWARZPICK_H
#define SCHWARZPICK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_INVALID_INPUT = 1,
  SP_STATUS_SCHEMA = 2,
  SP_STATUS_DOMAIN = 3,
  SP_STATUS_NUMERICAL = 4,
  SP_STATUS_CERTIFICATION = 5,
  SP_STATUS_PRECONDITION = 6,
  SP_STATUS_NULL_POINTER = 7,
  SP_STATUS_IO = 8,
  SP_STATUS_PANIC = 9,
} SpStatus;

// Opaque map handle.
typedef struct SpMap SpMap;

typedef struct SpGrad {
  double value;
  // 0 nonzero branch, 1 zero branch.
  int32_t branch;
  bool ambiguous;
} SpGrad;

typedef struct SpBoundReport {
  double lhs;
  double rhs;
  double slack;
  bool holds;
  int32_t branch;
} SpBoundReport;

typedef struct SpDiskSlice {
  double c_re;
  double c_im;
  double r;
} SpDiskSlice;

typedef struct SpBoundFactor {
  double factor;
  double rhs;
  bool collinear;
} SpBoundFactor;

typedef struct SpDiagnosis {
  bool matches;
  // NaN in the zero case.
  double fitted_theta;
  double max_residual;
  size_t points_tested;
  // NaN in the zero case.
  double orthogonal_norm;
} SpDiagnosis;

typedef struct SpCampaignSummary {
  size_t trials_run;
  size_t points_checked;
  size_t violations;
  // NaN when nothing was checked.
  double worst_slack;
  // NaN when nothing was checked.
  double oracle_max_dev;
} SpCampaignSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *sp_last_error_message(void);

// Parses a MapSpec JSON document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SpStatus sp_map_from_json(const char *json, struct SpMap **out);

// # Safety
// `map` must be NULL or a handle from this library that has not been freed.
void sp_map_free(struct SpMap *map);

// # Safety
// `map` must be a live handle; `n` and `m` must be writable.
enum SpStatus sp_map_dims(const struct SpMap *map, size_t *n, size_t *m);

// MapSpec JSON of `map`; release it with `sp_string_free`.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum SpStatus sp_map_to_json(const struct SpMap *map, char **out);

// # Safety
// `s` must be NULL or a string returned by this library that has not been freed.
void sp_string_free(char *s);

// Gradient of `|f|` at `z` (`n` complex entries).
//
// # Safety
// `z` must hold `2 * n` doubles; `out` must be writable.
enum SpStatus sp_mod_grad(const struct SpMap *map, const double *z, size_t n, struct SpGrad *out);

// Checks the modulus-gradient bound at `z`. A violated bound is reported in
// `out->holds`, not as an error.
//
// # Safety
// `z` must hold `2 * n` doubles; `out` must be writable.
enum SpStatus sp_bound(const struct SpMap *map,
                       const double *z,
                       size_t n,
                       double tol,
                       struct SpBoundReport *out);

// # Safety
// `p` and `q` must hold `2 * n` doubles each; `out` must be writable.
enum SpStatus sp_disk_slice(const double *p, const double *q, size_t n, struct SpDiskSlice *out);

// # Safety
// `p` and `q` must hold `2 * n` doubles each; `out` must be writable.
enum SpStatus sp_bound_factor(const double *p,
                              const double *q,
                              size_t n,
                              struct SpBoundFactor *out);

// Witness with `f(p) = 0` along the unit direction `u` (collinear with `p`).
//
// # Safety
// `p` and `u` must hold `2 * n` doubles, `beta` `2 * m`; `out` must be writable.
enum SpStatus sp_extremal_zero(const double *p,
                               const double *u,
                               size_t n,
                               const double *beta,
                               size_t m,
                               struct SpMap **out);

// Witness with `f(p) = a`, `0 < |a| < 1`.
//
// # Safety
// `p` and `u` must hold `2 * n` doubles, `a` `2 * m`; `out` must be writable.
enum SpStatus sp_extremal_nonzero(const double *p,
                                  const double *u,
                                  size_t n,
                                  const double *a,
                                  size_t m,
                                  double theta,
                                  struct SpMap **out);

// # Safety
// `p` and `q` must hold `2 * n` doubles each; `out` must be writable.
enum SpStatus sp_diagnose(const struct SpMap *map,
                          const double *p,
                          const double *q,
                          size_t n,
                          size_t samples,
                          double tol,
                          struct SpDiagnosis *out);

// Runs a campaign with default oracle settings and no log.
//
// # Safety
// `out` must be writable.
enum SpStatus sp_fuzz(size_t trials,
                      size_t points_per_trial,
                      size_t n,
                      size_t m,
                      uint32_t max_degree,
                      double margin,
                      uint64_t seed,
                      double tol,
                      struct SpCampaignSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHWARZPICK_H */

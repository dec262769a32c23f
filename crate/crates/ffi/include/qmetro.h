#ifndef QMETRO_H
#define QMETRO_H

/* Generated by cbindgen; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Selects the parameter family.
typedef enum QmModel {
  // `(B, θ)`.
  QM_MODEL_TWO_PARAM = 2,
  // `(B, θ, φ)`.
  QM_MODEL_THREE_PARAM = 3,
} QmModel;

// Result codes.
typedef enum QmStatus {
  QM_STATUS_OK = 0,
  QM_STATUS_NULL_POINTER = 1,
  QM_STATUS_INVALID_ARGUMENT = 2,
  // The QFIM is singular; bounds are undefined.
  QM_STATUS_SINGULAR = 3,
  // A numerical routine failed or a consistency check was violated.
  QM_STATUS_NUMERIC = 4,
  QM_STATUS_IO = 5,
  // A Rust panic was caught at the boundary.
  QM_STATUS_PANIC = 6,
} QmStatus;

// Opaque report handle.
typedef struct QmReport QmReport;

// Scalar figures of a report. Bound fields are NaN when `singular` is nonzero.
typedef struct QmScalars {
  double det_q;
  double c_sld;
  double c_h;
  double delta;
  double r_ai;
  int32_t singular;
} QmScalars;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the next call on this thread.
const char *qm_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *qm_version(void);

// Builds a report for the superposition probe `cos α|J⟩ + e^{iφ} sin α|−J⟩`.
//
// `model` takes a [`QmModel`] value; anything else gives `QM_STATUS_INVALID_ARGUMENT`.
// `azimuth` is ignored for the two-parameter model. A singular QFIM is not an
// error here; it shows up in [`QmScalars::singular`].
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum QmStatus qm_report_new(int32_t model,
                            uintptr_t dim,
                            double alpha,
                            double phi,
                            double b,
                            double theta,
                            double azimuth,
                            double t,
                            double rel_tol,
                            struct QmReport **out);

// Releases a report. Null is accepted.
//
// # Safety
// `report` must come from [`qm_report_new`] and not be freed twice.
void qm_report_free(struct QmReport *report);

// # Safety
// `report` and `out` must be valid or null.
enum QmStatus qm_report_num_params(const struct QmReport *report, uintptr_t *out);

// Copies the QFIM row-major into `buf`, which must hold at least `n²` values.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum QmStatus qm_report_qfim(const struct QmReport *report, double *buf, uintptr_t len);

// Copies the Uhlmann matrix row-major into `buf`.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum QmStatus qm_report_uhlmann(const struct QmReport *report, double *buf, uintptr_t len);

// # Safety
// `report` and `out` must be valid or null.
enum QmStatus qm_report_scalars(const struct QmReport *report, struct QmScalars *out);

// `|cos 2α|`, the three-parameter AI measure for `N ≥ 4`.
//
// # Safety
// `out` must be valid or null.
enum QmStatus qm_ai_threeparam_probe(uintptr_t dim, double alpha, double *out);

// Scans `T = ℛ − Δ` for a [`QmModel`] over `θ ∈ [0, 2π]`, `B ∈ [0, 2π/t]` and writes the CSV to `path`.
//
// Returns [`QmStatus::Numeric`] if any regular cell breaks `0 ≤ Δ ≤ ℛ ≤ 1`
// within `1e-9`; the file is written either way.
//
// # Safety
// `path` must be a NUL-terminated UTF-8 string or null.
enum QmStatus qm_scan_write_csv(int32_t model,
                                uintptr_t dim,
                                double alpha,
                                double phi,
                                double azimuth,
                                double t,
                                uintptr_t theta_count,
                                uintptr_t b_count,
                                const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMETRO_H */

#ifndef STEERING_H
#define STEERING_H

/* Generated by cbindgen; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status code returned by every function.
typedef enum StStatus {
  ST_STATUS_OK = 0,
  // A required pointer was null.
  ST_STATUS_NULL_POINTER = 1,
  // An argument is out of range (dimension, order, visibility, distribution...).
  ST_STATUS_INVALID_ARGUMENT = 2,
  // A numerical consistency check failed.
  ST_STATUS_NUMERICAL = 3,
  // Record index past the end of a scan.
  ST_STATUS_OUT_OF_BOUNDS = 4,
  // The library panicked; this is a bug.
  ST_STATUS_PANIC = 5,
} StStatus;

// Opaque scan result.
typedef struct StScan StScan;

// Both sides of the steering inequality at one visibility.
typedef struct StCertificate {
  double lhs;
  double bound;
  // `bound - lhs`; positive means steering is detected.
  double violation;
  double alpha;
  double beta;
  bool detected;
} StCertificate;

// One row of a scan. Absent values are NaN.
typedef struct StRecord {
  double parameter;
  // Rényi order; `INFINITY` for the min-entropy, NaN if the row has none.
  double alpha;
  double beta;
  double detected_visibility;
  double exact_visibility;
  double gap;
} StRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call on the same thread.
const char *st_last_error(void);

// Library version as a static NUL-terminated string.
const char *st_version(void);

// Rényi entropy in bits of `probs[0..n]`. Use `INFINITY` for the min-entropy.
//
// # Safety
// `probs` must point to `n` readable doubles and `out` to one writable double.
enum StStatus st_renyi_entropy(const double *probs, size_t n, double alpha, double *out);

// Conditional Rényi entropy `H_α(X|Y)` in bits of a row-major `rows x cols`
// table, rows indexing `X`.
//
// # Safety
// `table` must point to `rows * cols` readable doubles and `out` to one writable double.
enum StStatus st_conditional_renyi(const double *table,
                                   size_t rows,
                                   size_t cols,
                                   double alpha,
                                   double *out);

// Visibility below which noisy computational and Fourier measurements in
// dimension `d` become jointly measurable.
//
// # Safety
// `out` must point to one writable double.
enum StStatus st_compatibility_threshold(size_t d, double *out);

// Visibility above which the steering criterion of order `alpha` detects
// steering for maximally entangled states measured in computational and
// Fourier bases, to within `tol`.
//
// # Safety
// `out` must point to one writable double.
enum StStatus st_detection_threshold(size_t d, double alpha, double tol, double *out);

// Evaluates the steering inequality at one visibility.
//
// # Safety
// `out` must point to one writable `StCertificate`.
enum StStatus st_certificate(size_t d, double visibility, double alpha, struct StCertificate *out);

// Detection thresholds over dimensions `dims[0..n_dims]` and orders
// `alphas[0..n_alphas]`.
//
// # Safety
// The arrays must be readable for their lengths; `out` must be writable.
// The handle written to `out` must be released with `st_scan_free`.
enum StStatus st_scan_dimensions(const size_t *dims,
                                 size_t n_dims,
                                 const double *alphas,
                                 size_t n_alphas,
                                 double tol,
                                 struct StScan **out);

// Thresholds for `n_cases` random pairs of qubit measurements drawn from `seed`.
//
// # Safety
// `out` must be writable; release the handle with `st_scan_free`.
enum StStatus st_scan_qubit_random(size_t n_cases, uint64_t seed, double tol, struct StScan **out);

// Number of records in `scan`.
//
// # Safety
// `scan` must be a live handle and `out` writable.
enum StStatus st_scan_len(const struct StScan *scan, size_t *out);

// Copies record `index` of `scan` into `out`.
//
// # Safety
// `scan` must be a live handle and `out` writable.
enum StStatus st_scan_record(const struct StScan *scan, size_t index, struct StRecord *out);

// Releases a scan handle. Null is ignored.
//
// # Safety
// `scan` must be null or a handle not yet freed.
void st_scan_free(struct StScan *scan);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEERING_H */

#ifndef SRG_LAB_H
#define SRG_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Result codes of every fallible call.
 */
typedef enum SrgStatus {
  SRG_STATUS_OK = 0,
  SRG_STATUS_NULL_POINTER = 1,
  SRG_STATUS_INVALID_ARGUMENT = 2,
  SRG_STATUS_DIMENSION_MISMATCH = 3,
  SRG_STATUS_NUMERIC = 4,
  SRG_STATUS_EMPTY_CLOUD = 5,
  SRG_STATUS_KIND_MISMATCH = 6,
  SRG_STATUS_INDETERMINATE = 7,
  SRG_STATUS_WELL_POSEDNESS = 8,
  SRG_STATUS_DIVERGENCE = 9,
  SRG_STATUS_IO = 10,
  SRG_STATUS_OUT_OF_RANGE = 11,
  SRG_STATUS_PANIC = 12,
} SrgStatus;

typedef enum SrgVerdict {
  SRG_VERDICT_CERTIFIED = 0,
  SRG_VERDICT_NOT_CERTIFIED = 1,
  SRG_VERDICT_INDETERMINATE = 2,
} SrgVerdict;

/*
 Separation certificate.
 */
typedef struct SrgCertificate SrgCertificate;

/*
 Sampled soft or hard SRG cloud.
 */
typedef struct SrgCloud SrgCloud;

/*
 Operator specification.
 */
typedef struct SrgOperator SrgOperator;

/*
 Region of the complex plane.
 */
typedef struct SrgRegion SrgRegion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. Valid until the
 next call into this library from the same thread.
 */
const char *srg_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *srg_version(void);

/*
 Releases a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void srg_string_free(char *s);

/*
 Parses and validates an operator specification.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SrgStatus srg_operator_from_json(const char *json, struct SrgOperator **out);

/*
 Input/output dimension of an operator.

 # Safety
 `op` must be a live handle; `out` must be writable.
 */
enum SrgStatus srg_operator_dimension(const struct SrgOperator *op, uintptr_t *out);

/*
 # Safety
 `op` must come from this library and not be freed twice. NULL is ignored.
 */
void srg_operator_free(struct SrgOperator *op);

/*
 Samples the soft SRG. `config_json` may be NULL for the default ensemble.

 # Safety
 `op` must be a live handle; `config_json` NULL or NUL-terminated; `out` writable.
 */
enum SrgStatus srg_sample_soft(const struct SrgOperator *op,
                               const char *config_json,
                               struct SrgCloud **out);

/*
 Samples the hard SRG. `config_json` may be NULL for the default ensemble.

 # Safety
 As [`srg_sample_soft`].
 */
enum SrgStatus srg_sample_hard(const struct SrgOperator *op,
                               const char *config_json,
                               struct SrgCloud **out);

/*
 # Safety
 `cloud` must be a live handle; `out` writable.
 */
enum SrgStatus srg_cloud_len(const struct SrgCloud *cloud, uintptr_t *out);

/*
 Upper-half-plane representative of point `index`.

 # Safety
 `cloud` must be a live handle; `re`, `im` writable.
 */
enum SrgStatus srg_cloud_point(const struct SrgCloud *cloud,
                               uintptr_t index,
                               double *re,
                               double *im);

/*
 # Safety
 `cloud` must be a live handle; `out` writable. Free the result with `srg_string_free`.
 */
enum SrgStatus srg_cloud_to_json(const struct SrgCloud *cloud, char **out);

/*
 # Safety
 `cloud` must come from this library and not be freed twice. NULL is ignored.
 */
void srg_cloud_free(struct SrgCloud *cloud);

/*
 # Safety
 `json` must be NUL-terminated; `out` writable.
 */
enum SrgStatus srg_region_from_json(const char *json, struct SrgRegion **out);

/*
 # Safety
 `region` must be a live handle.
 */
enum SrgStatus srg_region_contains(const struct SrgRegion *region, double re, double im, bool *out);

/*
 Distance between two regions.

 # Safety
 `a`, `b` must be live handles; `out` writable.
 */
enum SrgStatus srg_region_distance(const struct SrgRegion *a,
                                   const struct SrgRegion *b,
                                   double *out);

/*
 # Safety
 `region` must come from this library and not be freed twice. NULL is ignored.
 */
void srg_region_free(struct SrgRegion *region);

/*
 Hard separation certificate from region evidence. `checklist_json` may be
 NULL (all premises unchecked); a negative `margin_floor` selects the default.

 # Safety
 Handles must be live; strings NULL or NUL-terminated; `out` writable.
 */
enum SrgStatus srg_certify_hard_regions(const struct SrgRegion *srg_p,
                                        const struct SrgRegion *inv_srg_c,
                                        const char *checklist_json,
                                        double margin_floor,
                                        struct SrgCertificate **out);

/*
 Passivity corollary certificate. Cloud handles may be NULL; non-NULL
 clouds are checked against the passivity premises.

 # Safety
 Handles must be live or NULL where allowed; strings NULL or NUL-terminated; `out` writable.
 */
enum SrgStatus srg_certify_passivity(const struct SrgOperator *p,
                                     const struct SrgOperator *c,
                                     double delta,
                                     double epsilon,
                                     const struct SrgCloud *p_hard,
                                     const struct SrgCloud *neg_c_hard,
                                     const char *checklist_json,
                                     struct SrgCertificate **out);

/*
 # Safety
 `cert` must be a live handle; `out` writable.
 */
enum SrgStatus srg_certificate_verdict(const struct SrgCertificate *cert, enum SrgVerdict *out);

/*
 # Safety
 `cert` must be a live handle; `out` writable.
 */
enum SrgStatus srg_certificate_margin(const struct SrgCertificate *cert, double *out);

/*
 # Safety
 `cert` must be a live handle; `out` writable. Free the result with `srg_string_free`.
 */
enum SrgStatus srg_certificate_to_json(const struct SrgCertificate *cert, char **out);

/*
 # Safety
 `cert` must come from this library and not be freed twice. NULL is ignored.
 */
void srg_certificate_free(struct SrgCertificate *cert);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SRG_LAB_H */

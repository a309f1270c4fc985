#ifndef MWGAP_H
#define MWGAP_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MwgapStatus {
  MWGAP_STATUS_OK = 0,
  MWGAP_STATUS_NULL_POINTER = 1,
  MWGAP_STATUS_INVALID_ARGUMENT = 2,
  MWGAP_STATUS_PARSE = 3,
  MWGAP_STATUS_MISMATCH = 4,
  MWGAP_STATUS_TOO_LARGE = 5,
  MWGAP_STATUS_INTERNAL = 6,
} MwgapStatus;

typedef enum MwgapFamily {
  MWGAP_FAMILY_NON_OPPOSITE = 0,
  MWGAP_FAMILY_THREE_WAY = 1,
} MwgapFamily;

typedef struct MwgapCertificate MwgapCertificate;

typedef struct MwgapCut MwgapCut;

typedef struct MwgapWeights MwgapWeights;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the next call.
 */
const char *mwgap_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void mwgap_string_free(char *s);

/**
 * Builds a named construction: "w3", "fk", "what", "wprime" or "wtilde".
 *
 * # Safety
 * `kind` must be a valid C string and `out` a valid pointer.
 */
enum MwgapStatus mwgap_weights_build(const char *kind,
                                     size_t k,
                                     uint32_t n,
                                     struct MwgapWeights **out);

/**
 * # Safety
 * `json` must be a valid C string and `out` a valid pointer.
 */
enum MwgapStatus mwgap_weights_from_json(const char *json, struct MwgapWeights **out);

/**
 * # Safety
 * `w` must be a live handle and `out` a valid pointer.
 */
enum MwgapStatus mwgap_weights_to_json(const struct MwgapWeights *w, char **out);

/**
 * Canonical LP value as a "p/q" string.
 *
 * # Safety
 * `w` must be a live handle and `out` a valid pointer.
 */
enum MwgapStatus mwgap_weights_lpc(const struct MwgapWeights *w, char **out);

/**
 * # Safety
 * `w` must be null or a handle from this library, not yet freed.
 */
void mwgap_weights_free(struct MwgapWeights *w);

/**
 * # Safety
 * `json` must be a valid C string and `out` a valid pointer.
 */
enum MwgapStatus mwgap_cut_from_json(const char *json, struct MwgapCut **out);

/**
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum MwgapStatus mwgap_cut_to_json(const struct MwgapCut *p, char **out);

/**
 * Total weight of the edges the cut separates, as a "p/q" string.
 *
 * # Safety
 * `p` and `w` must be live handles and `out` a valid pointer.
 */
enum MwgapStatus mwgap_cut_cost(const struct MwgapCut *p, const struct MwgapWeights *w, char **out);

/**
 * # Safety
 * `p` must be null or a handle from this library, not yet freed.
 */
void mwgap_cut_free(struct MwgapCut *p);

/**
 * Dual-graph certificate for a k = 3 instance against a "p/q" target.
 *
 * # Safety
 * `w` must be a live handle, `target` a valid C string and `out` a valid pointer.
 */
enum MwgapStatus mwgap_certify(const struct MwgapWeights *w,
                               enum MwgapFamily family,
                               const char *target,
                               struct MwgapCertificate **out);

/**
 * Whether the certified bound reaches the target; false for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
bool mwgap_certificate_passed(const struct MwgapCertificate *c);

/**
 * Certified lower bound as a "p/q" string.
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum MwgapStatus mwgap_certificate_bound(const struct MwgapCertificate *c, char **out);

/**
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum MwgapStatus mwgap_certificate_to_json(const struct MwgapCertificate *c, char **out);

/**
 * # Safety
 * `c` must be null or a handle from this library, not yet freed.
 */
void mwgap_certificate_free(struct MwgapCertificate *c);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MWGAP_H */

#ifndef CLAIMCHECK_H
#define CLAIMCHECK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum cc_status {
  CC_OK = 0,
  CC_ERR_NULL_ARGUMENT = 1,
  CC_ERR_INVALID_UTF8 = 2,
  CC_ERR_INVALID_CONFIG = 3,
  CC_ERR_INVALID_ARGUMENT = 4,
  /**
   * No verdict label could be recognized.
   */
  CC_ERR_UNPARSEABLE = 5,
  /**
   * The run ended without a verdict; the report records why.
   */
  CC_ERR_RUN_FAILED = 6,
  CC_ERR_RUNTIME = 7,
  CC_ERR_PANIC = 8,
} cc_status;

/**
 * Verdict labels, in the order Supported, Refuted, Conflicting
 * Evidence/Cherrypicking, Not Enough Evidence.
 */
typedef enum cc_verdict {
  CC_VERDICT_SUPPORTED = 0,
  CC_VERDICT_REFUTED = 1,
  CC_VERDICT_CONFLICTING_EVIDENCE = 2,
  CC_VERDICT_NOT_ENOUGH_EVIDENCE = 3,
} cc_verdict;

/**
 * Opaque pipeline handle.
 */
typedef struct cc_pipeline_t cc_pipeline_t;

/**
 * Opaque report handle.
 */
typedef struct cc_report_t cc_report_t;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next call into this library on the same thread.
 */
const char *cc_last_error_message(void);

/**
 * Library version string (static).
 */
const char *cc_version(void);

/**
 * Creates a pipeline from a JSON configuration:
 * `{"backend": {...}, "pipeline": {...}, "think": "TTTT"}`; every key is
 * optional. `config_json` may be NULL for defaults.
 *
 * # Safety
 * `config_json` must be NULL or a NUL-terminated string; `out` must be a
 * valid pointer.
 */
enum cc_status cc_pipeline_new(const char *config_json, struct cc_pipeline_t **out);

/**
 * # Safety
 * `pipeline` must be NULL or a handle from [`cc_pipeline_new`] not yet
 * freed.
 */
void cc_pipeline_free(struct cc_pipeline_t *pipeline);

/**
 * Fact-checks one claim, blocking until the run ends. `claim_date` is
 * NULL or `YYYY-MM-DD`. A report is produced even when the run fails;
 * inspect it with [`cc_report_verdict`].
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum cc_status cc_pipeline_check(const struct cc_pipeline_t *pipeline,
                                 const char *claim_text,
                                 const char *claim_date,
                                 struct cc_report_t **out);

/**
 * # Safety
 * `report` must be NULL or a live report handle.
 */
void cc_report_free(struct cc_report_t *report);

/**
 * Parses a report from its JSON encoding.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` valid.
 */
enum cc_status cc_report_from_json(const char *json, struct cc_report_t **out);

/**
 * Final verdict of a report; `CC_ERR_RUN_FAILED` when the run failed.
 *
 * # Safety
 * `report` must be a live handle; `out` valid.
 */
enum cc_status cc_report_verdict(const struct cc_report_t *report, enum cc_verdict *out);

/**
 * Markdown rendering of a report. Free the result with [`cc_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out` valid.
 */
enum cc_status cc_report_to_markdown(const struct cc_report_t *report, char **out);

/**
 * JSON encoding of a report. Free the result with [`cc_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out` valid.
 */
enum cc_status cc_report_to_json(const struct cc_report_t *report, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void cc_string_free(char *s);

/**
 * Recognizes a verdict label such as "Refuted" or
 * "conflicting evidence/cherrypicking".
 *
 * # Safety
 * `label` must be NUL-terminated; `out` valid.
 */
enum cc_status cc_parse_verdict_label(const char *label, enum cc_verdict *out);

/**
 * Extracts the verdict from an evaluation answer (last backtick-enclosed
 * label wins).
 *
 * # Safety
 * `answer` must be NUL-terminated; `out` valid.
 */
enum cc_status cc_extract_judgement(const char *answer, enum cc_verdict *out);

/**
 * Writes `n` indices of a seeded sample of `0..len` to `out`, which must
 * hold `n` elements. Identical to the Rust harness' subsetting.
 *
 * # Safety
 * `out` must point to `n` writable `size_t` slots.
 */
enum cc_status cc_sample_subset_indices(size_t len, size_t n, uint64_t seed, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLAIMCHECK_H */

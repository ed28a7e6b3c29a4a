#ifndef MECHEVAL_H
#define MECHEVAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MecStatus {
  MEC_STATUS_OK = 0,
  MEC_STATUS_NULL_ARGUMENT = 1,
  MEC_STATUS_INVALID_UTF8 = 2,
  MEC_STATUS_INVALID_INPUT = 3,
  MEC_STATUS_NOT_FOUND = 4,
  MEC_STATUS_CONFLICT = 5,
  MEC_STATUS_FORBIDDEN = 6,
  MEC_STATUS_IO = 7,
  MEC_STATUS_PANIC = 8,
} MecStatus;

typedef struct MecEquivalenceTable MecEquivalenceTable;

typedef struct MecJudgmentStore MecJudgmentStore;

typedef struct MecModel MecModel;

typedef struct MecReviewService MecReviewService;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread, or null. Valid until the next call
 * into this library from the same thread.
 */
const char *mec_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void mec_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *mec_version(void);

/**
 * Loads an equivalence table; a null `path` gives the bundled default.
 *
 * # Safety
 * `path` must be null or a NUL-terminated string; `out` must be writable.
 */
enum MecStatus mec_equivalence_table_load(const char *path, struct MecEquivalenceTable **out);

/**
 * # Safety
 * `table` must be null or a handle from this library, freed once.
 */
void mec_equivalence_table_free(struct MecEquivalenceTable *table);

/**
 * Matches two interactions given as card JSON `interaction` objects.
 * Writes `{"class","flags","auto_flagged","swapped"}`.
 *
 * # Safety
 * Pointers must be valid; `out_json` receives a string to free.
 */
enum MecStatus mec_match_interactions(const struct MecEquivalenceTable *table,
                                      const char *candidate_json,
                                      const char *gold_json,
                                      char **out_json);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum MecStatus mec_model_load(const char *path, struct MecModel **out);

/**
 * # Safety
 * `model` must be null or a handle from this library, freed once.
 */
void mec_model_free(struct MecModel *model);

/**
 * Sign reaching the end of a path (JSON array of edge ids) when the
 * first node is perturbed with `perturbation` (+1 or -1).
 *
 * # Safety
 * Pointers must be valid; `out_sign` must be writable.
 */
enum MecStatus mec_propagate_sign(const struct MecModel *model,
                                  const char *path_json,
                                  int8_t perturbation,
                                  int8_t *out_sign);

/**
 * Opens (or creates) an append-only judgment log. `known_cards_json` is a
 * JSON array of card ids that may be judged; a null `path` keeps the log
 * in memory.
 *
 * # Safety
 * Pointers must be valid or null where allowed; `out` must be writable.
 */
enum MecStatus mec_judgment_store_open(const char *path,
                                       const char *known_cards_json,
                                       struct MecJudgmentStore **out);

/**
 * # Safety
 * `store` must be null or a handle from this library, freed once.
 */
void mec_judgment_store_free(struct MecJudgmentStore *store);

/**
 * Appends a judgment (JSON) if `based_on` is the subject's current
 * revision; writes the new revision.
 *
 * # Safety
 * Pointers must be valid; `out_revision` must be writable.
 */
enum MecStatus mec_judgment_store_record(const struct MecJudgmentStore *store,
                                         const char *judgment_json,
                                         uint32_t based_on,
                                         uint32_t *out_revision);

/**
 * Latest judgment per subject, as a JSON array.
 *
 * # Safety
 * Pointers must be valid; `out_json` receives a string to free.
 */
enum MecStatus mec_judgment_store_snapshot(const struct MecJudgmentStore *store, char **out_json);

/**
 * Scores a run configuration (JSON) without persisting anything.
 * `judgments_path` may be null.
 *
 * # Safety
 * Pointers must be valid or null where allowed; `out_json` receives a string to free.
 */
enum MecStatus mec_score(const char *config_json, const char *judgments_path, char **out_json);

/**
 * # Safety
 * `data_root` must be a NUL-terminated string; `out` must be writable.
 */
enum MecStatus mec_review_service_open(const char *data_root,
                                       uint64_t claim_timeout_secs,
                                       struct MecReviewService **out);

/**
 * # Safety
 * `svc` must be null or a handle from this library, freed once.
 */
void mec_review_service_free(struct MecReviewService *svc);

/**
 * Creates a run from a configuration (JSON) and writes the run as JSON.
 *
 * # Safety
 * Pointers must be valid; `out_json` receives a string to free.
 */
enum MecStatus mec_review_service_ingest(const struct MecReviewService *svc,
                                         const char *config_json,
                                         char **out_json);

/**
 * Queue of a run. `filter_json` may be null or `{"kind","state","paper"}`.
 *
 * # Safety
 * Pointers must be valid or null where allowed; `out_json` receives a string to free.
 */
enum MecStatus mec_review_service_queue(const struct MecReviewService *svc,
                                        const char *run_id,
                                        const char *filter_json,
                                        char **out_json);

/**
 * # Safety
 * Pointers must be valid; `out_json` receives a string to free.
 */
enum MecStatus mec_review_service_claim(const struct MecReviewService *svc,
                                        const char *item_id,
                                        const char *reviewer,
                                        char **out_json);

/**
 * Resolves a claimed item with a decision (JSON). Writes
 * `{"item","judgment"}`.
 *
 * # Safety
 * Pointers must be valid; `out_json` receives a string to free.
 */
enum MecStatus mec_review_service_resolve(const struct MecReviewService *svc,
                                          const char *item_id,
                                          const char *reviewer,
                                          const char *decision_json,
                                          char **out_json);

/**
 * # Safety
 * Pointers must be valid; `out_json` receives a string to free.
 */
enum MecStatus mec_review_service_report(const struct MecReviewService *svc,
                                         const char *run_id,
                                         char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MECHEVAL_H */

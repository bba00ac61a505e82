/* Copyright (c) 2026, seqset developers
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the seqset library. Every function returns a status code;
 * on failure seqset_last_error() describes the problem for the calling
 * thread. Strings handed back through char** out-parameters are owned by the
 * caller and released with seqset_string_free().
 */
#ifndef SEQSET_SEQSET_H
#define SEQSET_SEQSET_H

#include <stddef.h>

#if defined(SEQSET_BUILDING_LIBRARY)
#define SEQSET_API __attribute__((visibility("default")))
#else
#define SEQSET_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum seqset_status {
  SEQSET_OK = 0,
  SEQSET_ERR_INPUT = 2,     /* bad config, missing file, malformed data */
  SEQSET_ERR_NUMERIC = 3,   /* divergence, domain error, failed gradient check */
  SEQSET_ERR_INTERNAL = 4
} seqset_status;

typedef struct seqset_model seqset_model;

SEQSET_API const char* seqset_version(void);
/* Message of the last failing call on this thread, "" if none. */
SEQSET_API const char* seqset_last_error(void);
/* Short machine-readable kind of the last failure, e.g. "config". */
SEQSET_API const char* seqset_last_error_kind(void);
SEQSET_API void seqset_string_free(char* s);

/* ---- model handles ------------------------------------------------------ */

SEQSET_API seqset_status seqset_model_load(const char* checkpoint_path, seqset_model** out);
SEQSET_API void seqset_model_free(seqset_model* model);
/* Model configuration and schema as JSON. */
SEQSET_API seqset_status seqset_model_info(const seqset_model* model, char** out_json);

/* hidden_path may be NULL for token-level models. */
SEQSET_API seqset_status seqset_model_evaluate(const seqset_model* model, const char* data_path,
                                               const char* hidden_path, double threshold, size_t threads,
                                               char** out_json);
/* One JSON line per sample. */
SEQSET_API seqset_status seqset_model_predict(const seqset_model* model, const char* data_path,
                                              const char* hidden_path, size_t threads, char** out_jsonl);
/* Prediction for a single sample given as a JSON object; "label" is optional. */
SEQSET_API seqset_status seqset_model_predict_json(const seqset_model* model, const char* sample_json,
                                                   char** out_json);
/* ids_csv selects samples by id (NULL or "" for all). out_html may be NULL. */
SEQSET_API seqset_status seqset_model_explain(const seqset_model* model, const char* data_path,
                                              const char* hidden_path, const char* ids_csv, char** out_json,
                                              char** out_html);
/* out_csv may be NULL. */
SEQSET_API seqset_status seqset_model_erase_eval(const seqset_model* model, const char* data_path,
                                                 const char* hidden_path, double threshold, size_t threads,
                                                 char** out_json, char** out_csv);

/* ---- whole commands ------------------------------------------------------- */

/* Run config with relative paths resolved against the config file and the
 * overrides applied, as JSON. */
SEQSET_API seqset_status seqset_resolve_config(const char* config_path, const char* overrides_json, char** out_json);

/* overrides_json may be NULL; recognised keys: seed, out, threads, model, optimizer.
 * Writes the run directory and returns a JSON summary. */
SEQSET_API seqset_status seqset_train(const char* config_path, const char* overrides_json, char** out_json);
/* selection_json may be NULL for the full grid. Writes <out>/grid.csv. */
SEQSET_API seqset_status seqset_ablate(const char* config_path, const char* overrides_json,
                                       const char* selection_json, char** out_json);
/* Returns SEQSET_ERR_NUMERIC when the check runs but exceeds its tolerance;
 * the report is still written to out_json. */
SEQSET_API seqset_status seqset_gradcheck(const char* options_json, char** out_json);
SEQSET_API seqset_status seqset_synth(const char* options_json, const char* out_dir, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* SEQSET_SEQSET_H */

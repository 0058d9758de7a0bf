/*
 * Copyright 2026 The c2v Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the c2v engine: pipeline stages over files and a read-only
 * query engine over a snapshot.
 *
 * Every function returns a c2v_status. On failure c2v_last_error() gives a
 * message for the calling thread. Strings returned through char** are owned
 * by the caller and released with c2v_string_free.
 */

#ifndef C2V_C2V_H_
#define C2V_C2V_H_

#include <stddef.h>
#include <stdint.h>

#if defined(C2V_BUILDING_LIBRARY)
#define C2V_API __attribute__((visibility("default")))
#else
#define C2V_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum c2v_status {
  C2V_OK = 0,
  C2V_ERR_INPUT = 1,
  C2V_ERR_PARSE = 2,
  C2V_ERR_FORMAT = 3,
  C2V_ERR_VERSION = 4,
  C2V_ERR_IO = 5,
  C2V_ERR_CONFIG = 6,
  C2V_ERR_DOMAIN = 7,
  C2V_ERR_FIT = 8,
  C2V_ERR_LOOKUP = 9,
  C2V_ERR_SPLIT = 10,
  C2V_ERR_RESAMPLING = 11,
  C2V_ERR_EVALUATION = 12,
  C2V_ERR_INTERNAL = 100
} c2v_status;

C2V_API const char* c2v_version(void);
C2V_API const char* c2v_status_name(c2v_status status);
/* Message of the last failed call on this thread; "" after a success. */
C2V_API const char* c2v_last_error(void);
C2V_API void c2v_string_free(char* s);

/* ---- pipeline stages ---------------------------------------------------- */

/* Fetches every URL of `url_list` and writes the scrape table. */
C2V_API c2v_status c2v_ingest(const char* url_list, const char* out_scrape_table,
                              unsigned workers, int64_t timeout_ms);

/* Joins company metadata with the scrape table on URL, attaches image
 * labels by company id, tokenises every channel and writes the dataset.
 * `image_labels` and `stopwords` may be NULL. `warnings` (nullable)
 * receives one line per join warning. */
C2V_API c2v_status c2v_preprocess(const char* metadata, const char* scrape_table,
                                  const char* image_labels, const char* stopwords,
                                  size_t frequent_top_n, const char* out_dataset,
                                  char** warnings);

/* `vector_format` is "text" or "binary"; `strategy` one of text, image,
 * alt, append, concat. Writes a snapshot without PCA. */
C2V_API c2v_status c2v_embed(const char* dataset, const char* vectors, const char* vector_format,
                             const char* strategy, const char* out_snapshot);

/* Fits PCA on the snapshot rows and writes the reduced snapshot. */
C2V_API c2v_status c2v_pca(const char* in_snapshot, double variance_threshold,
                           size_t max_components, const char* out_snapshot, char** report);

C2V_API c2v_status c2v_segment_fit(const char* in_snapshot, size_t k, uint64_t seed,
                                   size_t restarts, size_t max_iter, const char* out_snapshot,
                                   char** report);

/* Distortion for k in [k_min, k_max] plus the detected elbow. */
C2V_API c2v_status c2v_segment_elbow(const char* snapshot, size_t k_min, size_t k_max,
                                     uint64_t seed, size_t restarts, size_t max_iter,
                                     char** report);

typedef struct c2v_eval_options {
  int level;                /* 1 or 2 */
  const char* strategies;   /* comma-separated, e.g. "text,image,alt,append,concat" */
  const char* classifiers;  /* comma-separated, "logreg,knn" */
  double test_fraction;
  uint64_t seed;
  size_t smote_k;
  int unbalanced;           /* evaluate on the raw training split */
  int balanced;             /* evaluate on the SMOTE-balanced split */
  double l2;
  double learning_rate;
  size_t epochs;
  size_t knn_k;
} c2v_eval_options;

C2V_API void c2v_eval_options_init(c2v_eval_options* options);

/* Strategy x classifier grid. `table` receives the accuracy table,
 * `confusion` (nullable) the confusion matrices. */
C2V_API c2v_status c2v_evaluate(const char* dataset, const char* vectors,
                                const char* vector_format, const c2v_eval_options* options,
                                char** table, char** confusion);

/* Intrinsic word-vector evaluation; `correlation` is "spearman" or
 * "pearson". */
C2V_API c2v_status c2v_wordsim(const char* vectors, const char* vector_format,
                               const char* dataset, const char* correlation, char** report);

/* ---- query engine -------------------------------------------------------- */

typedef struct c2v_engine c2v_engine;

/* `vectors` may be NULL; word queries then fail. */
C2V_API c2v_status c2v_engine_open(const char* snapshot, const char* vectors,
                                   const char* vector_format, c2v_engine** out);
C2V_API void c2v_engine_close(c2v_engine* engine);
C2V_API const char* c2v_engine_digest(const c2v_engine* engine);
C2V_API size_t c2v_engine_rows(const c2v_engine* engine);

/* Routes one HTTP request; always fills `http_status` and `response` (a
 * JSON body) unless an internal error occurs. */
C2V_API c2v_status c2v_engine_handle(const c2v_engine* engine, const char* method,
                                     const char* target, const char* body, size_t body_len,
                                     int* http_status, char** response);

/* Typed queries. Each fills `json` with the same body the HTTP service
 * returns and maps 4xx answers to C2V_ERR_INPUT or C2V_ERR_LOOKUP. */
C2V_API c2v_status c2v_engine_peers(const c2v_engine* engine, const char* firm, size_t n,
                                    char** json);
C2V_API c2v_status c2v_engine_portfolio(const c2v_engine* engine, const char* const* firms,
                                        size_t count, size_t n, char** json);
C2V_API c2v_status c2v_engine_segment_peers(const c2v_engine* engine, const char* firm,
                                            char** json);
C2V_API c2v_status c2v_engine_topwords(const c2v_engine* engine, const char* firm, size_t n,
                                       char** json);
C2V_API c2v_status c2v_engine_analogy(const c2v_engine* engine, const char* a, const char* b,
                                      const char* c, size_t n, char** json);
/* `company_id,x,y` lines for every firm with an embedding. */
C2V_API c2v_status c2v_engine_map_csv(const c2v_engine* engine, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* C2V_C2V_H_ */

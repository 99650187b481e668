/*
 * attrscope C API.
 *
 * Diagnostics for multi-attribute image classifiers: per-attribute
 * confusion metrics, attribute co-existence statistics, 2-D embeddings
 * (t-SNE / PCA) of the label, feature and prediction spaces, and clustering
 * of image groups, served over a JSON API.
 *
 * All functions return an attrscope_status. On failure, the calling thread's
 * last error (attrscope_last_error_code / attrscope_last_error_message)
 * describes it. Strings handed out through `char**` parameters are owned by
 * the caller and must be released with attrscope_string_free().
 */
#ifndef ATTRSCOPE_ATTRSCOPE_H
#define ATTRSCOPE_ATTRSCOPE_H

#include <stdint.h>

#if defined(_WIN32)
#if defined(ATTRSCOPE_BUILDING)
#define ATTRSCOPE_API __declspec(dllexport)
#else
#define ATTRSCOPE_API __declspec(dllimport)
#endif
#else
#define ATTRSCOPE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum attrscope_status {
  ATTRSCOPE_OK = 0,
  ATTRSCOPE_ERR_VALIDATION = 1,
  ATTRSCOPE_ERR_NOT_FOUND = 2,
  ATTRSCOPE_ERR_NOT_READY = 3,
  ATTRSCOPE_ERR_NUMERICAL = 4,
  ATTRSCOPE_ERR_IO = 5,
  ATTRSCOPE_ERR_INTERNAL = 6,
  ATTRSCOPE_ERR_INVALID_ARGUMENT = 7
} attrscope_status;

/* Opaque engine: loaded dataset, group store, embedding cache. Safe to use
 * from several threads at once. */
typedef struct attrscope_engine attrscope_engine;

ATTRSCOPE_API const char* attrscope_version(void);

/* cache_dir may be NULL (no persistence). seed is the default seed for
 * requests that do not carry one. */
ATTRSCOPE_API attrscope_status attrscope_engine_create(const char* cache_dir,
                                                       uint64_t seed,
                                                       attrscope_engine** out);
ATTRSCOPE_API void attrscope_engine_destroy(attrscope_engine* engine);

/* Loads manifest.json and makes it the active dataset. summary_json may be
 * NULL. */
ATTRSCOPE_API attrscope_status attrscope_load_manifest(attrscope_engine* engine,
                                                       const char* manifest_path,
                                                       char** summary_json);

/* Runs one API request. `target` is the path plus optional query string,
 * e.g. "/api/coexistence/table?k=3&rankBy=corNum". body may be NULL.
 * Returns ATTRSCOPE_OK whenever a response was produced, including error
 * responses; inspect *http_status. */
ATTRSCOPE_API attrscope_status attrscope_request(attrscope_engine* engine,
                                                 const char* method,
                                                 const char* target,
                                                 const char* body,
                                                 int* http_status,
                                                 char** response_json);

/* Computes (or fetches from cache) an embedding of the active dataset.
 * params_json: {"space":"FEA","method":"tsne","perplexity":30,...}.
 * Produces `image_id,x,y` CSV and a JSON sidecar with params and objective
 * trace. Either output pointer may be NULL. */
ATTRSCOPE_API attrscope_status attrscope_embed(attrscope_engine* engine,
                                               const char* params_json,
                                               char** csv, char** sidecar_json);

/* Clusters the rows of an `image_id,x,y` CSV restricted to `group_ids`
 * (newline-separated ids; NULL or empty means every row).
 * params_json: {"method":"kmeans","k":3,"seed":1} or
 * {"method":"dbscan","eps":0.5,"min_pts":4}. */
ATTRSCOPE_API attrscope_status attrscope_cluster_csv(const char* embedding_csv,
                                                     const char* group_ids,
                                                     const char* params_json,
                                                     char** labels_csv,
                                                     char** scores_json);

/* Serves the HTTP API; blocks until attrscope_stop() is called from another
 * thread. port 0 binds a free port, reported through *bound_port before
 * serving starts (bound_port may be NULL). */
ATTRSCOPE_API attrscope_status attrscope_serve(attrscope_engine* engine,
                                               const char* host, int port,
                                               volatile int* bound_port);
ATTRSCOPE_API attrscope_status attrscope_stop(attrscope_engine* engine);

ATTRSCOPE_API attrscope_status attrscope_last_error_code(void);
/* Short machine-readable slug such as "invalid_k". Valid until the next
 * failing call on this thread. */
ATTRSCOPE_API const char* attrscope_last_error_slug(void);
ATTRSCOPE_API const char* attrscope_last_error_message(void);

ATTRSCOPE_API void attrscope_string_free(char* str);

#ifdef __cplusplus
}
#endif

#endif /* ATTRSCOPE_ATTRSCOPE_H */

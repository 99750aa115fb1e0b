/* aspectscope C API. All strings are UTF-8. Strings returned through char**
 * out-parameters are owned by the caller and released with asc_free_string. */
#ifndef ASPECTSCOPE_H
#define ASPECTSCOPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(ASC_BUILDING_LIBRARY)
#define ASC_API __attribute__((visibility("default")))
#else
#define ASC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum asc_status {
  ASC_OK = 0,
  ASC_ERR_INVALID_ARGUMENT = 1,
  ASC_ERR_NOT_FOUND = 2,
  ASC_ERR_IO = 3,
  ASC_ERR_INGESTION = 4,
  ASC_ERR_TRAINING = 5,
  ASC_ERR_NOT_ARTIFACT = 6,
  ASC_ERR_CORRUPT = 7,
  ASC_ERR_UNSUPPORTED_VERSION = 8,
  ASC_ERR_KIND_MISMATCH = 9,
  ASC_ERR_UNAVAILABLE = 10,
  ASC_ERR_INTERNAL = 11
} asc_status;

/* Message for the last failed call on this thread; "" after a success. */
ASC_API const char* asc_last_error(void);
ASC_API const char* asc_status_name(asc_status status);
ASC_API const char* asc_version(void);
ASC_API void asc_free_string(char* s);

ASC_API asc_status asc_heuristic_topic_count(size_t n_docs, size_t* out);

/* ingest */

typedef struct asc_ingest_options {
  const char* id_column; /* default "cord_uid" */
  char delimiter;        /* default ',' */
  int case_insensitive_covid;
  double english_threshold; /* default 0.08 */
  size_t english_min_words; /* default 5 */
} asc_ingest_options;

ASC_API void asc_ingest_options_init(asc_ingest_options* options);
/* report_json may be NULL. */
ASC_API asc_status asc_ingest(const char* metadata_path, const char* snapshot_out,
                              const asc_ingest_options* options, char** report_json);

/* train */

typedef struct asc_train_options {
  const char* aspect_labels; /* JSON lines, NULL for section-header bootstrap */
  size_t iterations;         /* default 15 */
  uint64_t seed;
  double alpha; /* default 0.1 */
  double beta;  /* default 0.01 */
  double min_df;
  double max_df;
  size_t max_features;
  double perplexity;
  size_t projection_iterations;
  size_t max_projection_points;
  int sample_if_too_large;
  int parallel; /* default 1 */
} asc_train_options;

ASC_API void asc_train_options_init(asc_train_options* options);
ASC_API asc_status asc_train(const char* snapshot, const char* out_dir,
                             const asc_train_options* options, char** report_json);

/* gazetteer; warnings_json receives a JSON array of collision warnings */
ASC_API asc_status asc_build_gazetteer(const char* dictionary_path, const char* out_path,
                                       char** warnings_json);

/* config */

typedef struct asc_config asc_config;

ASC_API asc_status asc_config_new(asc_config** out);
/* Relative paths in the file resolve against its directory. */
ASC_API asc_status asc_config_load(const char* path, asc_config** out);
ASC_API asc_status asc_config_set(asc_config* config, const char* key, const char* value);
/* ASPSCOPE_<KEY> environment variables. */
ASC_API asc_status asc_config_apply_env(asc_config* config);
ASC_API void asc_config_free(asc_config* config);

/* service */

typedef struct asc_service asc_service;

ASC_API asc_status asc_service_open(const asc_config* config, asc_service** out);
/* target is "path?query". body may be NULL. Endpoint errors are reported
 * through http_status and the body, not the return value. */
ASC_API asc_status asc_service_handle(asc_service* service, const char* method,
                                      const char* target, const char* body, int* http_status,
                                      char** response_body);
ASC_API asc_status asc_service_reload(asc_service* service);
/* Corpus statistics of the loaded snapshot as JSON. */
ASC_API asc_status asc_service_stats(asc_service* service, char** stats_json);
/* host NULL and port < 0 take listen_host / listen_port from the config.
 * port 0 picks a free port; bound_port may be NULL. */
ASC_API asc_status asc_service_bind(asc_service* service, const char* host, int port,
                                    int* bound_port);
/* Host passed to the last successful bind; "" before that. */
ASC_API const char* asc_service_host(const asc_service* service);
/* Blocks until asc_service_stop. */
ASC_API asc_status asc_service_run(asc_service* service);
/* Safe from any thread. */
ASC_API void asc_service_stop(asc_service* service);
ASC_API void asc_service_close(asc_service* service);

#ifdef __cplusplus
}
#endif

#endif

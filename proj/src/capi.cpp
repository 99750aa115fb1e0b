#include "aspectscope/aspectscope.h"

#include <cstring>
#include <memory>
#include <string>

#include "aspectscope/config.hpp"
#include "aspectscope/error.hpp"
#include "aspectscope/lda.hpp"
#include "aspectscope/pipeline.hpp"
#include "aspectscope/service.hpp"
#include "json.hpp"

struct asc_config {
  aspectscope::ServiceConfig config;
};

struct asc_service {
  explicit asc_service(aspectscope::ServiceConfig config) : service(std::move(config)) {}
  aspectscope::Service service;
  std::unique_ptr<aspectscope::HttpServer> server;
  std::string host;
};

namespace {

thread_local std::string g_last_error;

asc_status to_status(aspectscope::ErrorCode code) {
  using aspectscope::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return ASC_ERR_INVALID_ARGUMENT;
    case ErrorCode::kNotFound: return ASC_ERR_NOT_FOUND;
    case ErrorCode::kIo: return ASC_ERR_IO;
    case ErrorCode::kIngestion: return ASC_ERR_INGESTION;
    case ErrorCode::kTraining: return ASC_ERR_TRAINING;
    case ErrorCode::kNotArtifact: return ASC_ERR_NOT_ARTIFACT;
    case ErrorCode::kCorrupt: return ASC_ERR_CORRUPT;
    case ErrorCode::kUnsupportedVersion: return ASC_ERR_UNSUPPORTED_VERSION;
    case ErrorCode::kKindMismatch: return ASC_ERR_KIND_MISMATCH;
    case ErrorCode::kUnavailable: return ASC_ERR_UNAVAILABLE;
    case ErrorCode::kInternal: return ASC_ERR_INTERNAL;
  }
  return ASC_ERR_INTERNAL;
}

template <typename Fn>
asc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ASC_OK;
  } catch (const aspectscope::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return ASC_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ASC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ASC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ASC_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw aspectscope::Error(aspectscope::ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void give(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

}  // namespace

extern "C" {

const char* asc_last_error(void) { return g_last_error.c_str(); }

const char* asc_status_name(asc_status status) {
  switch (status) {
    case ASC_OK: return "ok";
    case ASC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case ASC_ERR_NOT_FOUND: return "not_found";
    case ASC_ERR_IO: return "io";
    case ASC_ERR_INGESTION: return "ingestion";
    case ASC_ERR_TRAINING: return "training";
    case ASC_ERR_NOT_ARTIFACT: return "not_artifact";
    case ASC_ERR_CORRUPT: return "corrupt";
    case ASC_ERR_UNSUPPORTED_VERSION: return "unsupported_version";
    case ASC_ERR_KIND_MISMATCH: return "kind_mismatch";
    case ASC_ERR_UNAVAILABLE: return "unavailable";
    case ASC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* asc_version(void) { return "1.0.0"; }

void asc_free_string(char* s) { std::free(s); }

asc_status asc_heuristic_topic_count(size_t n_docs, size_t* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = aspectscope::heuristic_topic_count(n_docs);
  });
}

void asc_ingest_options_init(asc_ingest_options* options) {
  if (!options) return;
  const aspectscope::IngestOptions defaults;
  options->id_column = "cord_uid";
  options->delimiter = defaults.metadata.delimiter;
  options->case_insensitive_covid = 0;
  options->english_threshold = defaults.language.threshold;
  options->english_min_words = defaults.language.min_words;
}

asc_status asc_ingest(const char* metadata_path, const char* snapshot_out,
                      const asc_ingest_options* options, char** report_json) {
  return guarded([&] {
    require(metadata_path && snapshot_out, "paths must not be null");
    aspectscope::IngestOptions opts;
    if (options) {
      if (options->id_column) opts.metadata.id_column = options->id_column;
      opts.metadata.delimiter = options->delimiter;
      opts.case_insensitive_covid = options->case_insensitive_covid != 0;
      opts.language.threshold = options->english_threshold;
      opts.language.min_words = options->english_min_words;
    }
    const auto report = aspectscope::ingest_file(metadata_path, snapshot_out, opts);
    give(report_json, aspectscope::ingest_report_json(report));
  });
}

void asc_train_options_init(asc_train_options* options) {
  if (!options) return;
  const aspectscope::TrainPipelineOptions d;
  options->aspect_labels = nullptr;
  options->iterations = d.iterations;
  options->seed = d.seed;
  options->alpha = d.alpha;
  options->beta = d.beta;
  options->min_df = d.vocabulary.min_df;
  options->max_df = d.vocabulary.max_df;
  options->max_features = d.vocabulary.max_features;
  options->perplexity = d.projection.perplexity;
  options->projection_iterations = d.projection.iterations;
  options->max_projection_points = d.projection.max_points;
  options->sample_if_too_large = d.projection.sample_if_too_large ? 1 : 0;
  options->parallel = d.parallel ? 1 : 0;
}

asc_status asc_train(const char* snapshot, const char* out_dir, const asc_train_options* options,
                     char** report_json) {
  return guarded([&] {
    require(snapshot && out_dir, "paths must not be null");
    aspectscope::TrainPipelineOptions opts;
    if (options) {
      if (options->aspect_labels) opts.aspect_labels = options->aspect_labels;
      opts.iterations = options->iterations;
      opts.seed = options->seed;
      opts.alpha = options->alpha;
      opts.beta = options->beta;
      opts.vocabulary.min_df = options->min_df;
      opts.vocabulary.max_df = options->max_df;
      opts.vocabulary.max_features = options->max_features;
      opts.projection.perplexity = options->perplexity;
      opts.projection.iterations = options->projection_iterations;
      opts.projection.max_points = options->max_projection_points;
      opts.projection.sample_if_too_large = options->sample_if_too_large != 0;
      opts.parallel = options->parallel != 0;
    }
    const auto report = aspectscope::train_pipeline(snapshot, out_dir, opts);
    give(report_json, aspectscope::train_report_json(report));
  });
}

asc_status asc_build_gazetteer(const char* dictionary_path, const char* out_path,
                               char** warnings_json) {
  return guarded([&] {
    require(dictionary_path && out_path, "paths must not be null");
    const auto warnings = aspectscope::build_gazetteer_file(dictionary_path, out_path);
    give(warnings_json, nlohmann::json(warnings).dump());
  });
}

asc_status asc_config_new(asc_config** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new asc_config{};
  });
}

asc_status asc_config_load(const char* path, asc_config** out) {
  return guarded([&] {
    require(path && out, "arguments must not be null");
    *out = new asc_config{aspectscope::load_config(path)};
  });
}

asc_status asc_config_set(asc_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config && key && value, "arguments must not be null");
    aspectscope::set_config_value(config->config, key, value);
  });
}

asc_status asc_config_apply_env(asc_config* config) {
  return guarded([&] {
    require(config != nullptr, "config is null");
    aspectscope::apply_env_overrides(config->config);
  });
}

void asc_config_free(asc_config* config) { delete config; }

asc_status asc_service_open(const asc_config* config, asc_service** out) {
  return guarded([&] {
    require(config && out, "arguments must not be null");
    *out = new asc_service(config->config);
  });
}

asc_status asc_service_handle(asc_service* service, const char* method, const char* target,
                              const char* body, int* http_status, char** response_body) {
  return guarded([&] {
    require(service && method && target && http_status && response_body,
            "arguments must not be null");
    const auto request =
        aspectscope::Request::from_target(method, target, body ? std::string(body) : std::string());
    const auto response = service->service.handle(request);
    *response_body = dup_string(response.body);
    *http_status = response.status;
  });
}

asc_status asc_service_reload(asc_service* service) {
  return guarded([&] {
    require(service != nullptr, "service is null");
    service->service.reload();
  });
}

asc_status asc_service_stats(asc_service* service, char** stats_json) {
  return guarded([&] {
    require(service && stats_json, "arguments must not be null");
    const auto state = service->service.snapshot();
    *stats_json = dup_string(
        aspectscope::corpus_stats_json(aspectscope::corpus_stats(state->corpus, state->annotated.labels)));
  });
}

asc_status asc_service_bind(asc_service* service, const char* host, int port, int* bound_port) {
  return guarded([&] {
    require(service != nullptr, "service is null");
    require(!service->server, "service is already bound");
    const auto& config = service->service.config();
    const std::string h = host ? std::string(host) : config.listen_host;
    auto server = std::make_unique<aspectscope::HttpServer>(service->service);
    const int bound = server->bind(h, port < 0 ? config.listen_port : port);
    service->server = std::move(server);
    service->host = h;
    if (bound_port) *bound_port = bound;
  });
}

const char* asc_service_host(const asc_service* service) {
  return service ? service->host.c_str() : "";
}

asc_status asc_service_run(asc_service* service) {
  return guarded([&] {
    require(service && service->server, "service is not bound");
    service->server->listen_after_bind();
  });
}

void asc_service_stop(asc_service* service) {
  if (service && service->server) service->server->stop();
}

void asc_service_close(asc_service* service) { delete service; }

}  // extern "C"

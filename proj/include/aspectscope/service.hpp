#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aspectscope/aspect.hpp"
#include "aspectscope/config.hpp"
#include "aspectscope/corpus.hpp"
#include "aspectscope/gazetteer.hpp"
#include "aspectscope/knn.hpp"
#include "aspectscope/pipeline.hpp"
#include "aspectscope/search.hpp"
#include "aspectscope/store.hpp"

namespace aspectscope {

struct SlotState {
  LdaBundle bundle;
  KnnIndex index;
};

// Immutable snapshot of every loaded artifact.
struct ServiceState {
  Corpus corpus;
  AspectModel aspect_model;
  AnnotatedCorpus annotated;
  std::vector<std::string> lowered_abstracts;
  std::map<SlotId, SlotState> slots;  // trained slots only
  // Every (scope, covid) pair; views into corpus and lowered_abstracts.
  std::map<SlotId, std::vector<SearchTarget>> search_targets;
  std::optional<Gazetteer> gazetteer;
  std::optional<QuestionCatalog> questions;
  std::string questions_error;
};

// Slots come from the manifest in artifact_dir when present, otherwise from
// whichever bundle files exist there.
std::shared_ptr<const ServiceState> load_service_state(const ServiceConfig& config);

struct Request {
  std::string method;  // "GET" / "POST"
  std::string path;
  std::multimap<std::string, std::string> params;
  std::string body;

  // Splits "path?query" and percent-decodes.
  static Request from_target(std::string method, std::string_view target, std::string body = {});
};

struct Response {
  int status = 200;
  std::string body;
};

// Request handling shared by the HTTP server and the CLI query command.
class Service {
 public:
  explicit Service(ServiceConfig config);

  // Every endpoint, including POST /admin/reload. Never throws.
  Response handle(const Request& request);

  // Loads a fresh state and swaps it in; in-flight requests keep the old one.
  void reload();

  std::shared_ptr<const ServiceState> snapshot() const;
  const ServiceConfig& config() const noexcept { return config_; }

 private:
  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::shared_ptr<const ServiceState> state_;
};

// Blocking HTTP server over Service::handle.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds; returns the bound port (useful with port 0).
  int bind(const std::string& host, int port);
  void listen_after_bind();  // blocks until stop()
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aspectscope

// Command-line driver. Talks to the library only through the C API.
#include <signal.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "aspectscope/aspectscope.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitEmpty = 1;
constexpr int kExitError = 2;

struct Failure {
  std::string message;
};

void check(asc_status status, const std::string& what) {
  if (status != ASC_OK) {
    throw Failure{what + ": " + asc_status_name(status) + ": " + asc_last_error()};
  }
}

void log(const std::string& line) { std::cerr << "asc: " << line << std::endl; }

std::string take(char* s) {
  std::string out = s ? s : "";
  asc_free_string(s);
  return out;
}

void log_warnings(const nlohmann::json& report) {
  if (!report.contains("warnings")) return;
  for (const auto& w : report["warnings"]) log("warning: " + w.get<std::string>());
}

struct ConfigOptions {
  std::string config;
  std::string artifact_dir;
  std::string gazetteer;
  std::string questions;
};

void add_config_options(CLI::App* app, ConfigOptions& o) {
  app->add_option("--config", o.config, "Config file (key = value)");
  app->add_option("--artifact-dir", o.artifact_dir, "Directory written by train");
  app->add_option("--gazetteer", o.gazetteer, "Gazetteer artifact");
  app->add_option("--questions", o.questions, "Question catalog file");
}

class Config {
 public:
  explicit Config(const ConfigOptions& o) {
    if (!o.config.empty()) {
      check(asc_config_load(o.config.c_str(), &cfg_), "config");
    } else {
      check(asc_config_new(&cfg_), "config");
    }
    check(asc_config_apply_env(cfg_), "environment");
    if (!o.artifact_dir.empty()) set("artifact_dir", o.artifact_dir);
    if (!o.gazetteer.empty()) set("gazetteer", o.gazetteer);
    if (!o.questions.empty()) set("questions", o.questions);
  }
  ~Config() { asc_config_free(cfg_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;

  void set(const char* key, const std::string& value) {
    check(asc_config_set(cfg_, key, value.c_str()), std::string("config ") + key);
  }
  const asc_config* get() const { return cfg_; }

 private:
  asc_config* cfg_ = nullptr;
};

class Service {
 public:
  explicit Service(const Config& config) { check(asc_service_open(config.get(), &svc_), "load"); }
  ~Service() { asc_service_close(svc_); }
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;
  asc_service* get() const { return svc_; }

 private:
  asc_service* svc_ = nullptr;
};

std::string url_encode(const std::string& s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

struct QueryOptions {
  ConfigOptions config;
  std::string what;
  std::string scope;
  std::optional<bool> covid;
  std::string filter;
  std::string topic;
  std::string order;
  std::optional<std::size_t> limit;
  std::optional<std::size_t> offset;
  std::string text;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed;
  std::string q;
  std::string mode;
  std::string id;
  bool fail_empty = false;
};

struct Target {
  std::string method = "GET";
  std::string target;
  std::string body;
  std::string list_field;
};

Target build_target(const QueryOptions& o) {
  Target t;
  std::string query;
  auto add = [&query](const std::string& key, const std::string& value) {
    query += (query.empty() ? "?" : "&") + key + "=" + url_encode(value);
  };
  auto slot_params = [&] {
    if (!o.scope.empty()) add("scope", o.scope);
    if (o.covid) add("covid", *o.covid ? "true" : "false");
  };
  auto paging = [&] {
    if (o.limit) add("limit", std::to_string(*o.limit));
    if (o.offset) add("offset", std::to_string(*o.offset));
  };
  if (o.what == "topics") {
    slot_params();
    if (!o.filter.empty()) add("filter", o.filter);
    paging();
    t.target = "/topics" + query;
    t.list_field = "topics";
  } else if (o.what == "papers") {
    if (o.topic.empty()) throw Failure{"query papers needs --topic"};
    slot_params();
    if (!o.order.empty()) add("order", o.order);
    paging();
    t.target = "/topics/" + url_encode(o.topic) + "/papers" + query;
    t.list_field = "papers";
  } else if (o.what == "recommend") {
    nlohmann::json body = {{"text", o.text}};
    if (!o.scope.empty()) body["scope"] = o.scope;
    if (o.covid) body["covid"] = *o.covid;
    if (o.k) body["k"] = *o.k;
    if (o.seed) body["seed"] = *o.seed;
    t.method = "POST";
    t.target = "/recommend";
    t.body = body.dump();
    t.list_field = "results";
  } else if (o.what == "search") {
    add("q", o.q);
    slot_params();
    if (!o.mode.empty()) add("mode", o.mode);
    paging();
    t.target = "/search" + query;
    t.list_field = "results";
  } else if (o.what == "projection") {
    slot_params();
    t.target = "/projection" + query;
    t.list_field = "points";
  } else if (o.what == "paper") {
    if (o.id.empty()) throw Failure{"query paper needs --id"};
    t.target = "/papers/" + url_encode(o.id);
  } else if (o.what == "questions") {
    t.target = "/questions";
    t.list_field = "questions";
  }
  return t;
}

int run_query(const QueryOptions& o) {
  Config config(o.config);
  Service service(config);
  const Target t = build_target(o);
  int status = 0;
  char* body = nullptr;
  check(asc_service_handle(service.get(), t.method.c_str(), t.target.c_str(), t.body.c_str(),
                           &status, &body),
        "query");
  const std::string out = take(body);
  std::cout << out << std::flush;
  if (status != 200) {
    const auto j = nlohmann::json::parse(out, nullptr, false);
    std::string message = out;
    if (j.is_object() && j.contains("error")) message = j["error"].value("message", out);
    log("error (" + std::to_string(status) + "): " + message);
    return kExitError;
  }
  if (o.fail_empty && !t.list_field.empty()) {
    const auto j = nlohmann::json::parse(out);
    if (j[t.list_field].empty()) return kExitEmpty;
  }
  return kExitOk;
}

int run_serve(const ConfigOptions& co, const std::string& host, std::optional<int> port) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGHUP);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Config config(co);
  if (!host.empty()) config.set("listen_host", host);
  if (port) config.set("listen_port", std::to_string(*port));
  Service service(config);
  int bound = 0;
  check(asc_service_bind(service.get(), nullptr, -1, &bound), "bind");
  log("listening on " + std::string(asc_service_host(service.get())) + ":" +
      std::to_string(bound));

  std::atomic<bool> finished{false};
  std::thread signal_thread([&] {
    for (;;) {
      int sig = 0;
      if (sigwait(&signals, &sig) != 0) continue;
      if (finished) return;
      if (sig == SIGHUP) {
        if (asc_service_reload(service.get()) == ASC_OK) {
          log("reloaded artifacts");
        } else {
          log(std::string("reload failed, keeping current artifacts: ") + asc_last_error());
        }
        continue;
      }
      log("shutting down");
      while (!finished) {
        asc_service_stop(service.get());
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
      }
      return;
    }
  });
  const asc_status run_status = asc_service_run(service.get());
  finished = true;
  kill(getpid(), SIGTERM);
  signal_thread.join();
  check(run_status, "serve");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aspectscope: topic exploration over paper abstracts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(asc_version()));

  std::string metadata, snapshot_out, id_column;
  bool case_insensitive = false;
  auto* ingest = app.add_subcommand("ingest", "Parse a metadata CSV into a corpus snapshot");
  ingest->add_option("--metadata", metadata, "Metadata CSV")->required();
  ingest->add_option("--out", snapshot_out, "Snapshot file to write")->required();
  ingest->add_flag("--case-insensitive-covid", case_insensitive, "Match COVID in any case");
  ingest->add_option("--id-column", id_column, "Unique id column (default cord_uid)");

  std::string snapshot, out_dir, aspect_labels, preset;
  std::optional<std::size_t> iterations;
  std::uint64_t seed = 0;
  std::optional<double> alpha, beta;
  bool sequential = false;
  auto* train = app.add_subcommand("train", "Train the aspect model and all topic model slots");
  train->add_option("--snapshot", snapshot, "Corpus snapshot from ingest")->required();
  train->add_option("--out-dir", out_dir, "Output directory")->required();
  train->add_option("--aspect-labels", aspect_labels, "Labeled sentences (JSON lines)");
  train->add_option("--iterations", iterations, "Gibbs sweeps per slot");
  train->add_option("--preset", preset, "default (15 sweeps) or thorough (200 sweeps)")
      ->check(CLI::IsMember({"default", "thorough"}));
  train->add_option("--seed", seed, "Random seed");
  train->add_option("--alpha", alpha, "Doc-topic prior");
  train->add_option("--beta", beta, "Topic-word prior");
  train->add_flag("--sequential", sequential, "Train slots one after another");

  std::string dictionary, gazetteer_out;
  auto* gazetteer = app.add_subcommand("gazetteer", "Build a gazetteer from a concept dictionary");
  gazetteer->add_option("--dictionary", dictionary, "Concepts (JSON lines or TSV)")->required();
  gazetteer->add_option("--out", gazetteer_out, "Gazetteer file to write")->required();

  ConfigOptions serve_config;
  std::string serve_host;
  std::optional<int> serve_port;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP JSON API");
  add_config_options(serve, serve_config);
  serve->add_option("--host", serve_host, "Listen host");
  serve->add_option("--port", serve_port, "Listen port (0 picks one)");

  QueryOptions query_options;
  auto* query = app.add_subcommand("query", "Run one API request and print the JSON body");
  add_config_options(query, query_options.config);
  query->add_option("what", query_options.what, "topics|papers|recommend|search|projection|paper|questions")
      ->required()
      ->check(CLI::IsMember({"topics", "papers", "recommend", "search", "projection", "paper",
                             "questions"}));
  query->add_option("--scope", query_options.scope, "background|purpose|method|finding|whole");
  query->add_option("--covid", query_options.covid, "Covid-only slot (true|false)");
  query->add_option("--filter", query_options.filter, "Topic keyword filter");
  query->add_option("--topic", query_options.topic, "Topic id");
  query->add_option("--order", query_options.order, "score|date");
  query->add_option("--limit", query_options.limit, "Page size");
  query->add_option("--offset", query_options.offset, "Page offset");
  query->add_option("--text", query_options.text, "Recommendation query text");
  query->add_option("--k", query_options.k, "Number of recommendations");
  query->add_option("--seed", query_options.seed, "Inference seed");
  query->add_option("--q", query_options.q, "Search terms");
  query->add_option("--mode", query_options.mode, "all|any");
  query->add_option("--id", query_options.id, "Paper id");
  query->add_flag("--fail-empty", query_options.fail_empty, "Exit 1 when the result is empty");

  ConfigOptions stats_config;
  auto* stats = app.add_subcommand("stats", "Per-aspect document counts");
  add_config_options(stats, stats_config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*ingest) {
      asc_ingest_options opts;
      asc_ingest_options_init(&opts);
      opts.case_insensitive_covid = case_insensitive ? 1 : 0;
      if (!id_column.empty()) opts.id_column = id_column.c_str();
      char* report = nullptr;
      check(asc_ingest(metadata.c_str(), snapshot_out.c_str(), &opts, &report), "ingest");
      const std::string body = take(report);
      const auto j = nlohmann::json::parse(body);
      log_warnings(j);
      if (j["kept"].get<std::size_t>() == 0) log("warning: snapshot has no papers");
      std::cout << body << std::endl;
    } else if (*train) {
      asc_train_options opts;
      asc_train_options_init(&opts);
      if (preset == "thorough") opts.iterations = 200;
      if (iterations) opts.iterations = *iterations;
      opts.seed = seed;
      if (alpha) opts.alpha = *alpha;
      if (beta) opts.beta = *beta;
      if (!aspect_labels.empty()) opts.aspect_labels = aspect_labels.c_str();
      opts.parallel = sequential ? 0 : 1;
      char* report = nullptr;
      check(asc_train(snapshot.c_str(), out_dir.c_str(), &opts, &report), "train");
      const std::string body = take(report);
      log_warnings(nlohmann::json::parse(body));
      std::cout << body << std::endl;
    } else if (*gazetteer) {
      char* warnings = nullptr;
      check(asc_build_gazetteer(dictionary.c_str(), gazetteer_out.c_str(), &warnings), "gazetteer");
      const auto j = nlohmann::json::parse(take(warnings));
      for (const auto& w : j) log("warning: " + w.get<std::string>());
      std::cout << nlohmann::json{{"out", gazetteer_out}, {"warnings", j}}.dump(2) << std::endl;
    } else if (*serve) {
      return run_serve(serve_config, serve_host, serve_port);
    } else if (*query) {
      return run_query(query_options);
    } else if (*stats) {
      Config config(stats_config);
      Service service(config);
      char* out = nullptr;
      check(asc_service_stats(service.get(), &out), "stats");
      std::cout << take(out) << std::endl;
    }
  } catch (const Failure& f) {
    log(f.message);
    return kExitError;
  } catch (const std::exception& e) {
    log(e.what());
    return kExitError;
  }
  return kExitOk;
}

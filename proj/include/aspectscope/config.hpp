#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace aspectscope {

// Service/CLI configuration. File format: "key = value" per line, '#'
// comments. Every key may be overridden by the environment variable
// ASPSCOPE_<KEY> (upper case).
struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::filesystem::path artifact_dir = ".";
  std::filesystem::path corpus;       // default <artifact_dir>/corpus.asc
  std::filesystem::path aspect_model; // default <artifact_dir>/aspect.asc
  std::filesystem::path gazetteer;    // optional
  std::filesystem::path questions;    // optional, shipped list otherwise
  std::string cors_origin;            // empty disables CORS headers
  std::size_t default_limit = 20;
  std::size_t recommend_k = 10;
  std::uint64_t infer_seed = 0;
  std::size_t infer_iterations = 50;
  double topic_min_score = 0.25;
  std::size_t threads = 8;

  std::filesystem::path corpus_path() const;
  std::filesystem::path aspect_model_path() const;
};

ServiceConfig parse_config(const std::string& text,
                           const std::filesystem::path& base_dir = {});
// Relative paths in the file resolve against the file's directory.
ServiceConfig load_config(const std::filesystem::path& path);
void apply_env_overrides(ServiceConfig& config);
// Throws kInvalidArgument for an unknown key or a bad value.
void set_config_value(ServiceConfig& config, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir = {});

}  // namespace aspectscope

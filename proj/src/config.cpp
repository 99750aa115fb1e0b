#include "aspectscope/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "aspectscope/error.hpp"
#include "aspectscope/pipeline.hpp"
#include "aspectscope/text.hpp"

namespace aspectscope {

namespace fs = std::filesystem;

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (!in || !in.eof() || value.empty() || (std::is_unsigned_v<T> && value[0] == '-')) {
    throw Error(ErrorCode::kInvalidArgument, "config key '" + key + "': bad value '" + value + "'");
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

using Setter = std::function<void(ServiceConfig&, const std::string&, const fs::path&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"listen_host", [](auto& c, const auto& v, const auto&) { c.listen_host = v; }},
      {"listen_port",
       [](auto& c, const auto& v, const auto&) {
         const int port = parse_number<int>("listen_port", v);
         if (port < 0 || port > 65535) {
           throw Error(ErrorCode::kInvalidArgument, "config key 'listen_port' out of range");
         }
         c.listen_port = port;
       }},
      {"artifact_dir", [](auto& c, const auto& v, const auto& b) { c.artifact_dir = resolve(b, v); }},
      {"corpus", [](auto& c, const auto& v, const auto& b) { c.corpus = resolve(b, v); }},
      {"aspect_model",
       [](auto& c, const auto& v, const auto& b) { c.aspect_model = resolve(b, v); }},
      {"gazetteer", [](auto& c, const auto& v, const auto& b) { c.gazetteer = resolve(b, v); }},
      {"questions", [](auto& c, const auto& v, const auto& b) { c.questions = resolve(b, v); }},
      {"cors_origin", [](auto& c, const auto& v, const auto&) { c.cors_origin = v; }},
      {"default_limit",
       [](auto& c, const auto& v, const auto&) {
         c.default_limit = parse_number<std::size_t>("default_limit", v);
       }},
      {"recommend_k",
       [](auto& c, const auto& v, const auto&) {
         c.recommend_k = parse_number<std::size_t>("recommend_k", v);
         if (c.recommend_k == 0) {
           throw Error(ErrorCode::kInvalidArgument, "config key 'recommend_k' must be >= 1");
         }
       }},
      {"infer_seed",
       [](auto& c, const auto& v, const auto&) {
         c.infer_seed = parse_number<std::uint64_t>("infer_seed", v);
       }},
      {"infer_iterations",
       [](auto& c, const auto& v, const auto&) {
         c.infer_iterations = parse_number<std::size_t>("infer_iterations", v);
       }},
      {"topic_min_score",
       [](auto& c, const auto& v, const auto&) {
         c.topic_min_score = parse_number<double>("topic_min_score", v);
       }},
      {"threads",
       [](auto& c, const auto& v, const auto&) {
         c.threads = parse_number<std::size_t>("threads", v);
         if (c.threads == 0) {
           throw Error(ErrorCode::kInvalidArgument, "config key 'threads' must be >= 1");
         }
       }},
  };
  return table;
}

void set_key(ServiceConfig& config, const std::string& key, const std::string& value,
             const fs::path& base) {
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  }
  it->second(config, value, base);
}

}  // namespace

void set_config_value(ServiceConfig& config, const std::string& key, const std::string& value,
                      const fs::path& base_dir) {
  set_key(config, key, value, base_dir);
}

fs::path ServiceConfig::corpus_path() const {
  return corpus.empty() ? artifact_dir / kCorpusFile : corpus;
}

fs::path ServiceConfig::aspect_model_path() const {
  return aspect_model.empty() ? artifact_dir / kAspectModelFile : aspect_model;
}

ServiceConfig parse_config(const std::string& text, const fs::path& base_dir) {
  ServiceConfig config;
  if (!base_dir.empty()) config.artifact_dir = base_dir;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(body.substr(0, eq)));
    std::string value(trim(body.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    set_key(config, key, value, base_dir);
  }
  return config;
}

ServiceConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

void apply_env_overrides(ServiceConfig& config) {
  for (const auto& [key, setter] : setters()) {
    std::string name = "ASPSCOPE_";
    for (char c : key) name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (const char* value = std::getenv(name.c_str())) setter(config, value, {});
  }
}

}  // namespace aspectscope

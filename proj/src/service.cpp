#include "aspectscope/service.hpp"

#include <charconv>

#include "aspectscope/error.hpp"
#include "aspectscope/lda.hpp"
#include "json.hpp"

namespace aspectscope {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<SearchTarget> build_targets(const Corpus& corpus, const AnnotatedCorpus& annotated,
                                        const std::vector<std::string>& lowered, SlotId slot) {
  std::vector<SearchTarget> targets;
  const auto label = scope_label(slot.scope);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const PaperRecord& paper = corpus.papers()[i];
    if (slot.covid_only && !paper.is_covid) continue;
    SearchTarget t{paper.paper_id, lowered[i], paper.publish_time, {}};
    if (!label) {
      t.ranges.push_back({0, lowered[i].size()});
    } else {
      for (std::size_t s = 0; s < annotated.sentences[i].size(); ++s) {
        if (annotated.labels[i][s] != *label) continue;
        t.ranges.push_back({annotated.sentences[i][s].char_start, annotated.sentences[i][s].char_end});
      }
      if (t.ranges.empty()) continue;
    }
    targets.push_back(std::move(t));
  }
  return targets;
}

std::map<SlotId, fs::path> bundle_paths(const fs::path& dir) {
  std::map<SlotId, fs::path> out;
  const fs::path manifest = dir / kManifestFile;
  if (fs::exists(manifest)) {
    for (const auto& [slot, file] : read_manifest(manifest).slot_files) out[slot] = dir / file;
    return out;
  }
  for (SlotId slot : all_slots()) {
    const fs::path p = dir / slot_bundle_filename(slot);
    if (fs::exists(p)) out[slot] = p;
  }
  return out;
}

}  // namespace

std::shared_ptr<const ServiceState> load_service_state(const ServiceConfig& config) {
  auto state = std::make_shared<ServiceState>();
  state->corpus = load_corpus(config.corpus_path());
  state->aspect_model = load_aspect_model(config.aspect_model_path());
  state->annotated = annotate(state->corpus, state->aspect_model);
  state->lowered_abstracts.reserve(state->corpus.size());
  for (const auto& p : state->corpus.papers()) {
    state->lowered_abstracts.push_back(to_lower_ascii(p.abstract));
  }
  for (const auto& [slot, path] : bundle_paths(config.artifact_dir)) {
    LdaBundle bundle = load_lda_bundle(path);
    if (bundle.slot != slot) {
      throw Error(ErrorCode::kCorrupt, "bundle '" + path.string() + "' holds slot " +
                                           bundle.slot.name() + ", expected " + slot.name());
    }
    KnnIndex index = KnnIndex::build(bundle.model, slot.name());
    state->slots.emplace(slot, SlotState{std::move(bundle), std::move(index)});
  }
  for (SlotId slot : all_slots()) {
    state->search_targets[slot] =
        build_targets(state->corpus, state->annotated, state->lowered_abstracts, slot);
  }
  if (!config.gazetteer.empty()) state->gazetteer = load_gazetteer(config.gazetteer);
  if (config.questions.empty()) {
    state->questions = default_question_catalog();
  } else {
    try {
      state->questions = load_question_catalog(config.questions.string());
    } catch (const Error& e) {
      state->questions_error = e.what();
    }
  }
  return state;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string percent_decode(std::string_view s, bool plus_is_space) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      const int hi = hex_value(s[i + 1]);
      const int lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(plus_is_space && s[i] == '+' ? ' ' : s[i]);
  }
  return out;
}

}  // namespace

Request Request::from_target(std::string method, std::string_view target, std::string body) {
  Request r;
  r.method = std::move(method);
  r.body = std::move(body);
  const auto q = target.find('?');
  r.path = percent_decode(target.substr(0, q), false);
  if (q == std::string_view::npos) return r;
  std::string_view query = target.substr(q + 1);
  while (!query.empty()) {
    const auto amp = query.find('&');
    const std::string_view pair = query.substr(0, amp);
    if (!pair.empty()) {
      const auto eq = pair.find('=');
      r.params.emplace(percent_decode(pair.substr(0, eq), true),
                       eq == std::string_view::npos ? std::string()
                                                    : percent_decode(pair.substr(eq + 1), true));
    }
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return r;
}

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void fail(int status, std::string code, std::string message) {
  throw HttpError{status, std::move(code), std::move(message)};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kUnavailable: return 503;
    default: return 500;
  }
}

Response error_response(int status, const std::string& code, const std::string& message) {
  return {status, json{{"error", {{"code", code}, {"message", message}}}}.dump()};
}

json date_json(const std::optional<Date>& d) { return d ? json(d->iso()) : json(nullptr); }

const std::string* param(const Request& r, const std::string& name) {
  const auto it = r.params.find(name);
  return it == r.params.end() ? nullptr : &it->second;
}

std::size_t parse_count(const std::string& name, const std::string& value) {
  std::size_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end) {
    fail(400, "invalid_argument", "'" + name + "' must be a non-negative integer");
  }
  return out;
}

std::size_t count_param(const Request& r, const std::string& name, std::size_t fallback) {
  const std::string* v = param(r, name);
  return v ? parse_count(name, *v) : fallback;
}

bool parse_bool(const std::string& name, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(400, "invalid_argument", "'" + name + "' must be true or false");
}

SlotId slot_from(const std::string* scope, bool covid) {
  SlotId slot{Scope::kWhole, covid};
  if (scope) {
    const auto s = parse_scope(*scope);
    if (!s) {
      fail(400, "invalid_argument",
           "bad scope '" + *scope + "'; expected background, purpose, method, finding or whole");
    }
    slot.scope = *s;
  }
  return slot;
}

SlotId slot_param(const Request& r) {
  const std::string* covid = param(r, "covid");
  return slot_from(param(r, "scope"), covid ? parse_bool("covid", *covid) : false);
}

const SlotState& slot_state(const ServiceState& state, SlotId slot) {
  const auto it = state.slots.find(slot);
  if (it != state.slots.end()) return it->second;
  std::string available;
  for (const auto& [s, st] : state.slots) {
    if (!available.empty()) available += ", ";
    available += s.name();
  }
  fail(503, "unavailable",
       "slot " + slot.name() + " is not loaded; available: " +
           (available.empty() ? std::string("none") : available));
}

json slot_header(SlotId slot) {
  return {{"scope", std::string(scope_name(slot.scope))}, {"covid", slot.covid_only}};
}

template <typename T>
std::pair<std::size_t, std::size_t> window(const std::vector<T>& items, std::size_t offset,
                                           std::size_t limit) {
  const std::size_t begin = std::min(offset, items.size());
  return {begin, std::min(items.size(), begin + limit)};
}

class Router {
 public:
  Router(const ServiceState& state, const ServiceConfig& config) : state_(state), config_(config) {}

  Response health() const {
    json slots = json::array();
    for (const auto& [slot, st] : state_.slots) slots.push_back(slot.name());
    return ok({{"status", "ok"}, {"papers", state_.corpus.size()}, {"slots", slots}});
  }

  Response topics(const Request& r) const {
    const SlotId slot = slot_param(r);
    const SlotState& st = slot_state(state_, slot);
    const std::string* filter = param(r, "filter");
    const auto summaries = list_topics(st.bundle.model, filter ? *filter : std::string());
    const auto [b, e] = window(summaries, count_param(r, "offset", 0),
                               count_param(r, "limit", config_.default_limit));
    json items = json::array();
    for (std::size_t i = b; i < e; ++i) {
      const auto& s = summaries[i];
      json words = json::array();
      for (const auto& w : s.top_words) words.push_back({{"word", w.word}, {"weight", w.weight}});
      items.push_back(
          {{"topic_id", s.topic_id}, {"document_count", s.document_count}, {"top_words", words}});
    }
    json out = slot_header(slot);
    out["num_topics"] = st.bundle.model.num_topics();
    out["total"] = summaries.size();
    out["topics"] = std::move(items);
    return ok(out);
  }

  Response topic_papers(const Request& r, std::string_view id_text) const {
    const SlotId slot = slot_param(r);
    const SlotState& st = slot_state(state_, slot);
    std::size_t topic = 0;
    const auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), topic);
    if (id_text.empty() || ec != std::errc() || ptr != id_text.data() + id_text.size()) {
      fail(404, "not_found", "topic '" + std::string(id_text) + "' does not exist");
    }
    PapersInTopicOptions opts;
    opts.min_score = config_.topic_min_score;
    opts.limit = count_param(r, "limit", config_.default_limit);
    opts.offset = count_param(r, "offset", 0);
    std::string order = "score";
    if (const std::string* o = param(r, "order")) order = *o;
    if (order == "date") {
      opts.order = PaperOrder::kDate;
    } else if (order != "score") {
      fail(400, "invalid_argument", "order must be score or date");
    }
    const Corpus& corpus = state_.corpus;
    const auto page = papers_in_topic(st.bundle.model, topic, opts, [&corpus](const std::string& id) {
      const PaperRecord* p = corpus.find(id);
      return p ? p->publish_time : std::nullopt;
    });
    json items = json::array();
    for (const auto& p : page.papers) {
      items.push_back({{"paper_id", p.paper_id},
                       {"title", title_of(p.paper_id)},
                       {"score", p.score},
                       {"publish_time", date_json(p.publish_time)}});
    }
    json out = slot_header(slot);
    out["topic_id"] = topic;
    out["order"] = order;
    out["total"] = page.total;
    out["papers"] = std::move(items);
    return ok(out);
  }

  Response recommend_papers(const Request& r) const {
    json body;
    try {
      body = json::parse(r.body);
    } catch (const json::exception&) {
      fail(400, "invalid_argument", "request body must be a JSON object");
    }
    if (!body.is_object()) fail(400, "invalid_argument", "request body must be a JSON object");
    const auto text = body.find("text");
    if (text == body.end() || !text->is_string()) {
      fail(400, "invalid_argument", "'text' must be a string");
    }
    std::optional<std::string> scope;
    if (const auto s = body.find("scope"); s != body.end()) {
      if (!s->is_string()) fail(400, "invalid_argument", "'scope' must be a string");
      scope = s->get<std::string>();
    }
    bool covid = false;
    if (const auto c = body.find("covid"); c != body.end()) {
      if (c->is_boolean()) {
        covid = c->get<bool>();
      } else if (c->is_string()) {
        covid = parse_bool("covid", c->get<std::string>());
      } else {
        fail(400, "invalid_argument", "'covid' must be a boolean");
      }
    }
    RecommendOptions opts;
    opts.k = config_.recommend_k;
    opts.seed = config_.infer_seed;
    opts.infer_iterations = config_.infer_iterations;
    if (const auto k = body.find("k"); k != body.end()) {
      if (!k->is_number_unsigned() || k->get<std::size_t>() < 1) {
        fail(400, "invalid_argument", "'k' must be a positive integer");
      }
      opts.k = k->get<std::size_t>();
    }
    if (const auto s = body.find("seed"); s != body.end()) {
      if (!s->is_number_unsigned()) fail(400, "invalid_argument", "'seed' must be an unsigned integer");
      opts.seed = s->get<std::uint64_t>();
    }
    const SlotId slot = slot_from(scope ? &*scope : nullptr, covid);
    const SlotState& st = slot_state(state_, slot);
    const auto neighbors = recommend(st.bundle.model, st.index, text->get<std::string>(), opts);
    json items = json::array();
    for (const auto& n : neighbors) {
      const PaperRecord* p = state_.corpus.find(n.paper_id);
      items.push_back({{"paper_id", n.paper_id},
                       {"title", p ? p->title : std::string()},
                       {"distance", n.distance},
                       {"publish_time", date_json(p ? p->publish_time : std::nullopt)}});
    }
    json out = slot_header(slot);
    out["k"] = opts.k;
    out["results"] = std::move(items);
    return ok(out);
  }

  Response search(const Request& r) const {
    const std::string* q = param(r, "q");
    if (!q || trim(*q).empty()) fail(400, "invalid_argument", "query is empty");
    const SlotId slot = slot_param(r);
    SearchOptions opts;
    std::string mode = "all";
    if (const std::string* m = param(r, "mode")) mode = *m;
    if (mode == "any") {
      opts.match_any = true;
    } else if (mode != "all") {
      fail(400, "invalid_argument", "mode must be all or any");
    }
    const auto hits = keyword_search(state_.search_targets.at(slot), *q, opts);
    const auto [b, e] = window(hits, count_param(r, "offset", 0),
                               count_param(r, "limit", config_.default_limit));
    json items = json::array();
    for (std::size_t i = b; i < e; ++i) {
      const auto& h = hits[i];
      json spans = json::array();
      for (const auto& s : h.matched_spans) {
        spans.push_back({{"term", s.term}, {"char_start", s.char_start}, {"char_end", s.char_end}});
      }
      items.push_back({{"paper_id", h.paper_id},
                       {"title", title_of(h.paper_id)},
                       {"publish_time", date_json(h.publish_time)},
                       {"matched_spans", spans}});
    }
    json out = slot_header(slot);
    out["query"] = *q;
    out["terms"] = query_terms(*q);
    out["mode"] = mode;
    out["total"] = hits.size();
    out["results"] = std::move(items);
    return ok(out);
  }

  Response questions() const {
    if (!state_.questions) fail(503, "unavailable", state_.questions_error);
    return ok({{"questions", state_.questions->terms}});
  }

  Response projection(const Request& r) const {
    const SlotId slot = slot_param(r);
    const SlotState& st = slot_state(state_, slot);
    if (!st.bundle.projection) {
      fail(503, "unavailable", "projection not built for slot " + slot.name());
    }
    json points = json::array();
    for (const auto& p : *st.bundle.projection) {
      points.push_back({{"paper_id", p.paper_id},
                        {"x", p.x},
                        {"y", p.y},
                        {"dominant_topic", p.dominant_topic},
                        {"title", title_of(p.paper_id)}});
    }
    json out = slot_header(slot);
    out["points"] = std::move(points);
    return ok(out);
  }

  Response paper(std::string_view id) const {
    const auto index = state_.corpus.index_of(id);
    if (!index) fail(404, "not_found", "unknown paper '" + std::string(id) + "'");
    const PaperRecord& p = state_.corpus.papers()[*index];
    json sentences = json::array();
    const auto& sents = state_.annotated.sentences[*index];
    for (std::size_t s = 0; s < sents.size(); ++s) {
      sentences.push_back({{"text", sents[s].text},
                           {"char_start", sents[s].char_start},
                           {"char_end", sents[s].char_end},
                           {"aspect", aspect_label_name(state_.annotated.labels[*index][s])}});
    }
    json entities = json::array();
    if (state_.gazetteer) {
      for (const auto& e : state_.gazetteer->find_entities(p.abstract)) {
        const Concept& c = state_.gazetteer->link(e.cui);
        entities.push_back({{"char_start", e.char_start},
                            {"char_end", e.char_end},
                            {"surface", e.surface},
                            {"cui", c.cui},
                            {"semantic_type", c.semantic_type},
                            {"name", c.canonical_name},
                            {"definition", c.definition}});
      }
    }
    return ok({{"paper_id", p.paper_id},
               {"title", p.title},
               {"publish_time", date_json(p.publish_time)},
               {"is_covid", p.is_covid},
               {"abstract", p.abstract},
               {"sentences", sentences},
               {"entities", entities}});
  }

 private:
  static Response ok(const json& body) { return {200, body.dump()}; }

  std::string title_of(const std::string& id) const {
    const PaperRecord* p = state_.corpus.find(id);
    return p ? p->title : std::string();
  }

  const ServiceState& state_;
  const ServiceConfig& config_;
};

}  // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)), state_(load_service_state(config_)) {}

std::shared_ptr<const ServiceState> Service::snapshot() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void Service::reload() {
  auto fresh = load_service_state(config_);
  std::lock_guard lock(mutex_);
  state_ = std::move(fresh);
}

Response Service::handle(const Request& request) {
  try {
    const std::string& path = request.path;
    const bool get = request.method == "GET";
    const bool post = request.method == "POST";
    auto method_not_allowed = [&]() -> Response {
      return error_response(405, "method_not_allowed",
                            request.method + " not allowed on " + path);
    };
    if (path == "/admin/reload") {
      if (!post) return method_not_allowed();
      reload();
      return {200, json{{"status", "reloaded"}, {"papers", snapshot()->corpus.size()}}.dump()};
    }
    const auto state = snapshot();
    const Router router(*state, config_);
    if (path == "/recommend") {
      return post ? router.recommend_papers(request) : method_not_allowed();
    }
    if (!get) {
      const bool known = path == "/health" || path == "/topics" || path == "/search" ||
                         path == "/questions" || path == "/projection" ||
                         path.starts_with("/topics/") || path.starts_with("/papers/");
      return known ? method_not_allowed()
                   : error_response(404, "not_found", "no route for " + path);
    }
    if (path == "/health") return router.health();
    if (path == "/topics") return router.topics(request);
    if (path == "/search") return router.search(request);
    if (path == "/questions") return router.questions();
    if (path == "/projection") return router.projection(request);
    constexpr std::string_view kTopics = "/topics/";
    constexpr std::string_view kPapersSuffix = "/papers";
    if (path.starts_with(kTopics) && path.ends_with(kPapersSuffix) &&
        path.size() > kTopics.size() + kPapersSuffix.size()) {
      const std::string_view id = std::string_view(path).substr(
          kTopics.size(), path.size() - kTopics.size() - kPapersSuffix.size());
      if (id.find('/') == std::string_view::npos) return router.topic_papers(request, id);
    }
    constexpr std::string_view kPapers = "/papers/";
    if (path.starts_with(kPapers) && path.size() > kPapers.size()) {
      return router.paper(std::string_view(path).substr(kPapers.size()));
    }
    return error_response(404, "not_found", "no route for " + path);
  } catch (const HttpError& e) {
    return error_response(e.status, e.code, e.message);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), std::string(error_code_name(e.code())), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

}  // namespace aspectscope

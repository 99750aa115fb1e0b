#include "aspectscope/gazetteer.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>

#include "aspectscope/error.hpp"
#include "aspectscope/text.hpp"
#include "json.hpp"

namespace aspectscope {

std::string normalize_form(std::string_view form) {
  std::string out;
  out.reserve(form.size());
  bool pending_space = false;
  for (char ch : trim(form)) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_space_byte(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
  }
  return out;
}

Gazetteer Gazetteer::build(std::vector<Concept> concepts, std::vector<std::string>* warnings) {
  if (concepts.empty()) throw Error(ErrorCode::kInvalidArgument, "concept dictionary is empty");
  std::sort(concepts.begin(), concepts.end(),
            [](const Concept& a, const Concept& b) { return a.cui < b.cui; });

  Gazetteer g;
  std::map<std::string, std::size_t> form_owner;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const Concept& c = concepts[i];
    if (c.cui.empty()) throw Error(ErrorCode::kInvalidArgument, "concept with empty cui");
    if (i > 0 && concepts[i - 1].cui == c.cui) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate cui '" + c.cui + "'");
    }
    if (normalize_form(c.canonical_name).empty()) {
      throw Error(ErrorCode::kInvalidArgument, "concept '" + c.cui + "' has an empty name");
    }
    std::vector<std::string> surface{c.canonical_name};
    surface.insert(surface.end(), c.synonyms.begin(), c.synonyms.end());
    for (const auto& s : surface) {
      std::string form = normalize_form(s);
      if (form.empty()) continue;
      auto [it, inserted] = form_owner.emplace(form, i);
      if (!inserted && it->second != i && warnings) {
        // Concepts are visited in cui order, so the existing owner is smaller.
        warnings->push_back("surface form '" + form + "' shared by " + concepts[it->second].cui +
                            " and " + c.cui + "; using " + concepts[it->second].cui);
      }
    }
  }

  g.concepts_ = std::move(concepts);
  for (std::size_t i = 0; i < g.concepts_.size(); ++i) g.by_cui_.emplace(g.concepts_[i].cui, i);
  for (auto& [form, owner] : form_owner) {
    g.forms_.push_back(form);
    g.form_concept_.push_back(owner);
  }

  g.nodes_.emplace_back();
  for (std::size_t f = 0; f < g.forms_.size(); ++f) {
    std::uint32_t node = 0;
    for (char ch : g.forms_[f]) {
      const auto c = static_cast<unsigned char>(ch);
      auto& next = g.nodes_[node].next;
      auto it = std::lower_bound(next.begin(), next.end(), c,
                                 [](const auto& e, unsigned char b) { return e.first < b; });
      if (it != next.end() && it->first == c) {
        node = it->second;
        continue;
      }
      const auto created = static_cast<std::uint32_t>(g.nodes_.size());
      next.insert(it, {c, created});
      g.nodes_.emplace_back();
      node = created;
    }
    g.nodes_[node].form = static_cast<std::int32_t>(f);
  }

  std::deque<std::uint32_t> queue;
  for (const auto& [c, v] : g.nodes_[0].next) queue.push_back(v);
  while (!queue.empty()) {
    const std::uint32_t u = queue.front();
    queue.pop_front();
    for (const auto& [c, v] : g.nodes_[u].next) {
      std::uint32_t f = g.nodes_[u].fail;
      while (f != 0 && g.child(f, c) == 0) f = g.nodes_[f].fail;
      const std::uint32_t target = g.child(f, c);
      g.nodes_[v].fail = target == v ? 0 : target;
      const Node& fail = g.nodes_[g.nodes_[v].fail];
      g.nodes_[v].output = fail.form >= 0 ? g.nodes_[v].fail : fail.output;
      queue.push_back(v);
    }
  }
  return g;
}

std::uint32_t Gazetteer::child(std::uint32_t node, unsigned char c) const {
  const auto& next = nodes_[node].next;
  auto it = std::lower_bound(next.begin(), next.end(), c,
                             [](const auto& e, unsigned char b) { return e.first < b; });
  return it != next.end() && it->first == c ? it->second : 0;
}

std::uint32_t Gazetteer::step(std::uint32_t node, unsigned char c) const {
  while (true) {
    if (const std::uint32_t next = child(node, c)) return next;
    if (node == 0) return 0;
    node = nodes_[node].fail;
  }
}

std::vector<EntitySpan> Gazetteer::find_entities(std::string_view text) const {
  // Normalize like the forms, remembering where each byte came from.
  std::string norm;
  std::vector<std::size_t> origin;
  norm.reserve(text.size());
  origin.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c)) {
      if (!norm.empty() && norm.back() == ' ') continue;
      norm.push_back(' ');
    } else {
      norm.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : text[i]);
    }
    origin.push_back(i);
  }

  struct Candidate {
    std::size_t start;
    std::size_t end;
    std::int32_t form;
  };
  std::vector<Candidate> candidates;
  std::uint32_t state = 0;
  for (std::size_t i = 0; i < norm.size(); ++i) {
    state = step(state, static_cast<unsigned char>(norm[i]));
    std::uint32_t hit = nodes_[state].form >= 0 ? state : nodes_[state].output;
    while (hit != 0) {
      const std::int32_t form = nodes_[hit].form;
      const std::size_t end = i + 1;
      const std::size_t start = end - forms_[static_cast<std::size_t>(form)].size();
      const bool left = start == 0 || !is_word_byte(static_cast<unsigned char>(norm[start - 1]));
      const bool right =
          end == norm.size() || !is_word_byte(static_cast<unsigned char>(norm[end]));
      if (left && right) candidates.push_back({start, end, form});
      hit = nodes_[hit].output;
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.end > b.end;
  });
  std::vector<EntitySpan> spans;
  std::size_t cursor = 0;
  for (const auto& c : candidates) {
    if (c.start < cursor) continue;
    EntitySpan span;
    span.char_start = origin[c.start];
    span.char_end = origin[c.end - 1] + 1;
    span.surface = std::string(text.substr(span.char_start, span.char_end - span.char_start));
    span.cui = concepts_[form_concept_[static_cast<std::size_t>(c.form)]].cui;
    spans.push_back(std::move(span));
    cursor = c.end;
  }
  return spans;
}

const Concept& Gazetteer::link(std::string_view cui) const {
  auto it = by_cui_.find(std::string(cui));
  if (it == by_cui_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown cui '" + std::string(cui) + "'");
  }
  return concepts_[it->second];
}

std::vector<std::pair<std::string, std::string>> Gazetteer::forms() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(forms_.size());
  for (std::size_t f = 0; f < forms_.size(); ++f) {
    out.emplace_back(forms_[f], concepts_[form_concept_[f]].cui);
  }
  return out;
}

std::vector<Concept> read_concepts_jsonl(std::istream& input) {
  std::vector<Concept> concepts;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(input, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      Concept c;
      c.cui = obj.at("cui").get<std::string>();
      c.canonical_name = obj.at("name").get<std::string>();
      if (obj.contains("synonyms")) c.synonyms = obj["synonyms"].get<std::vector<std::string>>();
      c.semantic_type = obj.value("semantic_type", "");
      c.definition = obj.value("definition", "");
      concepts.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  "dictionary line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return concepts;
}

std::vector<Concept> read_concepts_tsv(std::istream& input) {
  std::vector<Concept> concepts;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(input, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
      const std::size_t tab = line.find('\t', pos);
      cols.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (line_number == 1 && to_lower_ascii(trim(cols[0])) == "cui") continue;  // header
    if (cols.size() < 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "dictionary line " + std::to_string(line_number) + ": expected cui and name");
    }
    Concept c;
    c.cui = std::string(trim(cols[0]));
    c.canonical_name = std::string(trim(cols[1]));
    if (cols.size() > 2) {
      std::string_view syn = cols[2];
      std::size_t p = 0;
      while (p <= syn.size()) {
        std::size_t bar = syn.find('|', p);
        if (bar == std::string_view::npos) bar = syn.size();
        auto s = trim(syn.substr(p, bar - p));
        if (!s.empty()) c.synonyms.emplace_back(s);
        p = bar + 1;
      }
    }
    if (cols.size() > 3) c.semantic_type = std::string(trim(cols[3]));
    if (cols.size() > 4) c.definition = std::string(trim(cols[4]));
    concepts.push_back(std::move(c));
  }
  return concepts;
}

std::vector<Concept> load_concepts(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open dictionary '" + path + "'");
  char first = 0;
  while (in.get(first) && is_space_byte(static_cast<unsigned char>(first))) {
  }
  in.clear();
  in.seekg(0);
  return first == '{' ? read_concepts_jsonl(in) : read_concepts_tsv(in);
}

}  // namespace aspectscope

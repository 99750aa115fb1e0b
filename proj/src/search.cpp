#include "aspectscope/search.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "aspectscope/error.hpp"
#include "resources.hpp"

namespace aspectscope {

std::vector<std::string> query_terms(std::string_view query) {
  const std::string lowered = to_lower_ascii(query);
  std::vector<std::string> terms;
  for (auto word : split_whitespace(lowered)) {
    if (std::find(terms.begin(), terms.end(), word) == terms.end()) terms.emplace_back(word);
  }
  if (terms.empty()) throw Error(ErrorCode::kInvalidArgument, "query is empty");
  return terms;
}

std::optional<TextRange> find_whole_word(std::string_view text, std::span<const TextRange> ranges,
                                         std::string_view term) {
  if (term.empty()) return std::nullopt;
  for (const auto& range : ranges) {
    const std::string_view segment = text.substr(range.begin, range.end - range.begin);
    std::size_t pos = segment.find(term);
    while (pos != std::string_view::npos) {
      const std::size_t end = pos + term.size();
      const bool left_ok = pos == 0 || !is_word_byte(static_cast<unsigned char>(segment[pos - 1]));
      const bool right_ok =
          end == segment.size() || !is_word_byte(static_cast<unsigned char>(segment[end]));
      if (left_ok && right_ok) return TextRange{range.begin + pos, range.begin + end};
      pos = segment.find(term, pos + 1);
    }
  }
  return std::nullopt;
}

std::vector<SearchHit> keyword_search(std::span<const SearchTarget> targets, std::string_view query,
                                      const SearchOptions& options) {
  const auto terms = query_terms(query);
  std::vector<SearchHit> hits;
  for (const auto& target : targets) {
    SearchHit hit;
    bool all = true;
    for (const auto& term : terms) {
      if (auto found = find_whole_word(target.lowered_text, target.ranges, term)) {
        hit.matched_spans.push_back({term, found->begin, found->end});
      } else {
        all = false;
        if (!options.match_any) break;
      }
    }
    const bool matched = options.match_any ? !hit.matched_spans.empty() : all;
    if (!matched) continue;
    hit.paper_id = std::string(target.paper_id);
    hit.publish_time = target.publish_time;
    hits.push_back(std::move(hit));
  }
  std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.publish_time.has_value() != b.publish_time.has_value()) return a.publish_time.has_value();
    if (a.publish_time && *a.publish_time != *b.publish_time) {
      return *a.publish_time > *b.publish_time;
    }
    return a.paper_id < b.paper_id;
  });
  return hits;
}

QuestionCatalog parse_question_catalog(std::string_view listing) {
  QuestionCatalog catalog;
  std::unordered_set<std::string> seen;
  std::size_t pos = 0;
  while (pos <= listing.size()) {
    std::size_t nl = listing.find('\n', pos);
    if (nl == std::string_view::npos) nl = listing.size();
    const std::string_view line = trim(listing.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    if (!seen.emplace(line).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "question catalog repeats term '" + std::string(line) + "'");
    }
    catalog.terms.emplace_back(line);
  }
  if (catalog.terms.empty()) throw Error(ErrorCode::kInvalidArgument, "question catalog is empty");
  return catalog;
}

QuestionCatalog load_question_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open question catalog '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_question_catalog(buf.str());
}

const QuestionCatalog& default_question_catalog() {
  static const QuestionCatalog catalog = parse_question_catalog(resources::questions());
  return catalog;
}

}  // namespace aspectscope

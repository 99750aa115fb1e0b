#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aspectscope/corpus.hpp"

namespace aspectscope {

struct TextRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// A document restricted to the byte ranges of its in-scope sentences.
// lowered_text is the ASCII-lowercased abstract.
struct SearchTarget {
  std::string_view paper_id;
  std::string_view lowered_text;
  std::optional<Date> publish_time;
  std::vector<TextRange> ranges;
};

struct MatchedSpan {
  std::string term;
  std::size_t char_start = 0;
  std::size_t char_end = 0;

  friend bool operator==(const MatchedSpan&, const MatchedSpan&) = default;
};

struct SearchHit {
  std::string paper_id;
  std::optional<Date> publish_time;
  std::vector<MatchedSpan> matched_spans;  // one per matched term, in query order
};

struct SearchOptions {
  bool match_any = false;  // OR instead of AND across terms
};

// Lowercased whitespace-split query terms, duplicates removed, order kept.
// Throws kInvalidArgument for an empty query.
std::vector<std::string> query_terms(std::string_view query);

// First whole-word occurrence of term inside one of the ranges. A whole-word
// occurrence has no letter, digit or hyphen immediately on either side.
std::optional<TextRange> find_whole_word(std::string_view lowered_text,
                                         std::span<const TextRange> ranges,
                                         std::string_view term);

// Hits ordered by publish time (newest first, undated last), ties by id.
std::vector<SearchHit> keyword_search(std::span<const SearchTarget> targets,
                                      std::string_view query,
                                      const SearchOptions& options = {});

struct QuestionCatalog {
  std::vector<std::string> terms;
};

// One term per line, '#' comments. Throws kInvalidArgument when empty or
// when a term repeats.
QuestionCatalog parse_question_catalog(std::string_view listing);
QuestionCatalog load_question_catalog(const std::string& path);
const QuestionCatalog& default_question_catalog();

}  // namespace aspectscope

#include "aspectscope/text.hpp"

#include <algorithm>
#include <cctype>

#include "aspectscope/error.hpp"
#include "aspectscope/labels.hpp"
#include "aspectscope/matrix.hpp"
#include "resources.hpp"

namespace aspectscope {

// Small shared helpers that have no better home.

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kIngestion: return "ingestion";
    case ErrorCode::kTraining: return "training";
    case ErrorCode::kNotArtifact: return "not_artifact";
    case ErrorCode::kCorrupt: return "corrupt";
    case ErrorCode::kUnsupportedVersion: return "unsupported_version";
    case ErrorCode::kKindMismatch: return "kind_mismatch";
    case ErrorCode::kUnavailable: return "unavailable";
    case ErrorCode::kInternal: return "internal";
  }
  return "internal";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kInvalidArgument, "matrix data size does not match shape");
  }
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::string_view aspect_label_name(AspectLabel label) {
  switch (label) {
    case AspectLabel::kBackground: return "background";
    case AspectLabel::kPurpose: return "purpose";
    case AspectLabel::kMethod: return "method";
    case AspectLabel::kFinding: return "finding";
    case AspectLabel::kOther: return "other";
  }
  return "other";
}

std::optional<AspectLabel> parse_aspect_label(std::string_view name) {
  const std::string lowered = to_lower_ascii(trim(name));
  for (AspectLabel label : kAllAspectLabels) {
    if (lowered == aspect_label_name(label)) return label;
  }
  if (lowered == "finding/contribution" || lowered == "contribution") {
    return AspectLabel::kFinding;
  }
  return std::nullopt;
}

std::string_view scope_name(Scope scope) {
  switch (scope) {
    case Scope::kBackground: return "background";
    case Scope::kPurpose: return "purpose";
    case Scope::kMethod: return "method";
    case Scope::kFinding: return "finding";
    case Scope::kWhole: return "whole";
  }
  return "whole";
}

std::optional<Scope> parse_scope(std::string_view name) {
  for (Scope scope : kAllScopes) {
    if (name == scope_name(scope)) return scope;
  }
  return std::nullopt;
}

std::optional<AspectLabel> scope_label(Scope scope) {
  if (scope == Scope::kWhole) return std::nullopt;
  return static_cast<AspectLabel>(static_cast<std::size_t>(scope));
}

std::string SlotId::name() const {
  return std::string(scope_name(scope)) + (covid_only ? "-covid" : "-all");
}

std::optional<SlotId> SlotId::parse(std::string_view name) {
  const auto dash = name.rfind('-');
  if (dash == std::string_view::npos) return std::nullopt;
  const auto scope = parse_scope(name.substr(0, dash));
  const auto suffix = name.substr(dash + 1);
  if (!scope || (suffix != "all" && suffix != "covid")) return std::nullopt;
  return SlotId{*scope, suffix == "covid"};
}

std::vector<SlotId> all_slots() {
  std::vector<SlotId> slots;
  for (Scope scope : kAllScopes) {
    slots.push_back({scope, false});
    slots.push_back({scope, true});
  }
  return slots;
}

// Text processing proper.

bool is_word_byte(unsigned char c) noexcept {
  return std::isalnum(c) != 0 || c == '-' || c >= 0x80;
}

bool is_space_byte(unsigned char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space_byte(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && is_space_byte(static_cast<unsigned char>(text[e - 1]))) --e;
  return text.substr(b, e - b);
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space_byte(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

namespace {

std::vector<std::string> parse_listing(std::string_view listing) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= listing.size()) {
    std::size_t nl = listing.find('\n', pos);
    if (nl == std::string_view::npos) nl = listing.size();
    std::string_view line = trim(listing.substr(pos, nl - pos));
    if (!line.empty() && line.front() != '#') lines.emplace_back(line);
    pos = nl + 1;
  }
  return lines;
}

}  // namespace

StopwordSet StopwordSet::parse(std::string_view listing) {
  std::unordered_set<std::string> words;
  for (auto& line : parse_listing(listing)) words.insert(to_lower_ascii(line));
  return StopwordSet(std::move(words));
}

bool StopwordSet::contains(std::string_view word) const {
  return words_.find(std::string(word)) != words_.end();
}

StopwordSet StopwordSet::merged(const StopwordSet& other) const {
  auto words = words_;
  words.insert(other.words_.begin(), other.words_.end());
  return StopwordSet(std::move(words));
}

const StopwordSet& english_stopwords() {
  static const StopwordSet set = StopwordSet::parse(resources::english_stopwords());
  return set;
}

const StopwordSet& tokenizer_stopwords() {
  static const StopwordSet set =
      english_stopwords().merged(StopwordSet::parse(resources::section_stopwords()));
  return set;
}

bool is_english(std::string_view text, const LanguageOptions& options) {
  const StopwordSet& stopwords = options.stopwords ? *options.stopwords : english_stopwords();
  const auto words = split_whitespace(text);
  if (words.empty() || words.size() < options.min_words) return false;
  std::size_t hits = 0;
  for (std::string_view word : words) {
    std::size_t b = 0;
    std::size_t e = word.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(word[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(word[e - 1]))) --e;
    if (b < e && stopwords.contains(to_lower_ascii(word.substr(b, e - b)))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(words.size()) >= options.threshold;
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> list = parse_listing(resources::abbreviations());
  return list;
}

namespace {

bool ends_with_abbreviation(std::string_view text, std::size_t period,
                            const std::vector<std::string>& abbreviations) {
  const std::string_view upto = text.substr(0, period + 1);
  for (const auto& abbr : abbreviations) {
    if (abbr.size() > upto.size()) continue;
    if (upto.substr(upto.size() - abbr.size()) != abbr) continue;
    const std::size_t before = upto.size() - abbr.size();
    // "Fig." must not match the tail of "Config."
    if (before == 0 || !std::isalnum(static_cast<unsigned char>(upto[before - 1]))) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<Sentence> segment_sentences(std::string_view text, const SegmenterOptions& options) {
  const auto& abbreviations =
      options.abbreviations.empty() ? default_abbreviations() : options.abbreviations;
  std::vector<Sentence> sentences;
  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && is_space_byte(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && is_space_byte(static_cast<unsigned char>(text[end - 1]))) --end;
    if (end > begin) {
      sentences.push_back({std::string(text.substr(begin, end - begin)), begin, end});
    }
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    std::size_t j = i + 1;
    if (j >= text.size() || !is_space_byte(static_cast<unsigned char>(text[j]))) continue;
    while (j < text.size() && is_space_byte(static_cast<unsigned char>(text[j]))) ++j;
    if (j >= text.size()) continue;
    const auto next = static_cast<unsigned char>(text[j]);
    if (!std::isupper(next) && !std::isdigit(next)) continue;
    if (c == '.' && ends_with_abbreviation(text, i, abbreviations)) continue;
    emit(start, i + 1);
    start = j;
  }
  emit(start, text.size());
  return sentences;
}

std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t b = i;
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t e = i;
    // Hyphens only survive inside a token.
    while (b < e && text[b] == '-') ++b;
    while (e > b && text[e - 1] == '-') --e;
    if (e - b < 2) continue;
    std::string token = to_lower_ascii(text.substr(b, e - b));
    if (!stopwords.contains(token)) tokens.push_back(std::move(token));
  }
  return tokens;
}

}  // namespace aspectscope

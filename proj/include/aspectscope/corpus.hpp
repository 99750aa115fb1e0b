#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aspectscope/labels.hpp"
#include "aspectscope/text.hpp"

namespace aspectscope {

// Calendar date with optional month/day precision ("2020", "2020-03",
// "2020-03-14"). Unknown parts are stored as 0 and sort first.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  static std::optional<Date> parse(std::string_view text);
  std::string iso() const;

  friend bool operator==(const Date&, const Date&) = default;
  friend auto operator<=>(const Date&, const Date&) = default;
};

struct PaperRecord {
  std::string paper_id;
  std::string title;
  std::string abstract;
  std::optional<Date> publish_time;
  bool is_covid = false;

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

struct TokenizedDoc {
  std::string paper_id;
  std::vector<std::string> tokens;
};

struct MetadataOptions {
  std::string id_column = "cord_uid";
  char delimiter = ',';
};

struct MetadataReport {
  std::size_t rows = 0;
  std::size_t skipped_rows = 0;   // malformed rows
  std::size_t duplicates = 0;     // repeated ids, first occurrence kept
  std::size_t dropped_empty = 0;  // empty id and empty title
  std::size_t title_fallbacks = 0;
  std::vector<std::string> warnings;
};

struct MetadataTable {
  std::vector<PaperRecord> records;
  // Parallel to records; empty when the file has no language column or the
  // cell is blank.
  std::vector<std::string> languages;
  MetadataReport report;
};

// Reads a delimited table with quoted fields (RFC 4180 style). Requires the
// id column plus title, abstract and publish_time; throws kIngestion naming
// the first missing column. An empty abstract is replaced by the title.
MetadataTable parse_metadata(std::istream& input, const MetadataOptions& options = {});

bool mentions_covid(std::string_view abstract, bool case_insensitive = false);
void mark_covid(std::span<PaperRecord> records, bool case_insensitive = false);

// Sentence labels supplied from outside (e.g. a stronger classifier run
// elsewhere), keyed by sentence index. They take precedence over the
// classifier for those sentences.
using LabelOverrides = std::map<std::string, std::map<std::size_t, AspectLabel>>;

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<PaperRecord> papers);

  const std::vector<PaperRecord>& papers() const noexcept { return papers_; }
  std::size_t size() const noexcept { return papers_.size(); }
  const PaperRecord* find(std::string_view paper_id) const;
  std::optional<std::size_t> index_of(std::string_view paper_id) const;

  const LabelOverrides& label_overrides() const noexcept { return overrides_; }
  void set_label_overrides(LabelOverrides overrides) { overrides_ = std::move(overrides); }

 private:
  std::vector<PaperRecord> papers_;
  std::unordered_map<std::string, std::size_t> index_;
  LabelOverrides overrides_;
};

struct IngestOptions {
  MetadataOptions metadata;
  bool case_insensitive_covid = false;
  LanguageOptions language;
};

struct IngestReport {
  MetadataReport metadata;
  std::size_t kept = 0;
  std::size_t non_english_dropped = 0;
};

struct IngestResult {
  Corpus corpus;
  IngestReport report;
};

// parse_metadata, then the English filter (a language column wins over the
// heuristic when the cell is non-empty), then covid flagging.
IngestResult ingest(std::istream& input, const IngestOptions& options = {});

// Per-paper sentence labels, parallel to the corpus.
using AspectAssignments = std::vector<std::vector<AspectLabel>>;

struct CorpusStats {
  // Indexed by Scope; kWhole is the total paper count.
  std::array<std::size_t, 5> all{};
  std::array<std::size_t, 5> covid{};
  std::size_t total = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

CorpusStats corpus_stats(const Corpus& corpus, const AspectAssignments& assignments);

}  // namespace aspectscope

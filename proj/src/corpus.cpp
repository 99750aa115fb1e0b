#include "aspectscope/corpus.hpp"

#include <charconv>
#include <cstdio>
#include <iterator>
#include <unordered_set>

#include "aspectscope/error.hpp"

namespace aspectscope {

namespace {

constexpr std::size_t kMaxWarnings = 100;

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && ((year % 4 == 0 && year % 100 != 0) || year % 400 == 0)) return 29;
  return kDays[month - 1];
}

// RFC 4180 reader. A record is returned with ok=false when its quoting is
// broken (unterminated quote).
class CsvReader {
 public:
  CsvReader(std::string data, char delimiter) : data_(std::move(data)), delim_(delimiter) {
    if (data_.rfind("\xEF\xBB\xBF", 0) == 0) pos_ = 3;
  }

  bool next(std::vector<std::string>& fields, bool& ok) {
    fields.clear();
    ok = true;
    if (pos_ >= data_.size()) return false;
    std::string field;
    bool in_quotes = false;
    bool was_quoted = false;
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (in_quotes) {
        if (c == '"') {
          if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
            continue;
          }
          in_quotes = false;
          ++pos_;
          continue;
        }
        field.push_back(c);
        ++pos_;
        continue;
      }
      if (c == '"' && field.empty() && !was_quoted) {
        in_quotes = true;
        was_quoted = true;
        ++pos_;
        continue;
      }
      if (c == delim_) {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        ++pos_;
        continue;
      }
      if (c == '\r' || c == '\n') {
        ++pos_;
        if (c == '\r' && pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
        fields.push_back(std::move(field));
        return true;
      }
      field.push_back(c);
      ++pos_;
    }
    if (in_quotes) ok = false;
    fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string data_;
  char delim_;
  std::size_t pos_ = 0;
};

void warn(MetadataReport& report, std::string message) {
  if (report.warnings.size() < kMaxWarnings) report.warnings.push_back(std::move(message));
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
  text = trim(text);
  Date date;
  if (text.size() != 4 && text.size() != 7 && text.size() != 10) return std::nullopt;
  if (!parse_int(text.substr(0, 4), date.year) || date.year < 1) return std::nullopt;
  if (text.size() >= 7) {
    if (text[4] != '-' || !parse_int(text.substr(5, 2), date.month)) return std::nullopt;
    if (date.month < 1 || date.month > 12) return std::nullopt;
  }
  if (text.size() == 10) {
    if (text[7] != '-' || !parse_int(text.substr(8, 2), date.day)) return std::nullopt;
    if (date.day < 1 || date.day > days_in_month(date.year, date.month)) return std::nullopt;
  }
  return date;
}

std::string Date::iso() const {
  char buf[16];
  if (month == 0) {
    std::snprintf(buf, sizeof buf, "%04d", year);
  } else if (day == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  }
  return buf;
}

MetadataTable parse_metadata(std::istream& input, const MetadataOptions& options) {
  MetadataTable table;
  std::string data{std::istreambuf_iterator<char>(input), std::istreambuf_iterator<char>()};
  CsvReader reader(std::move(data), options.delimiter);

  std::vector<std::string> header;
  bool ok = true;
  if (!reader.next(header, ok) || (header.size() == 1 && trim(header[0]).empty())) {
    warn(table.report, "input has no header row");
    return table;
  }
  if (!ok) throw Error(ErrorCode::kIngestion, "malformed header row");

  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  auto required = [&](std::string_view name) {
    auto idx = column(name);
    if (!idx) {
      throw Error(ErrorCode::kIngestion,
                  "missing required column '" + std::string(name) + "'");
    }
    return *idx;
  };
  const std::size_t id_col = required(options.id_column);
  const std::size_t title_col = required("title");
  const std::size_t abstract_col = required("abstract");
  const std::size_t date_col = required("publish_time");
  const auto lang_col = column("language");

  std::unordered_set<std::string> seen;
  std::vector<std::string> fields;
  std::size_t bad_dates = 0;
  while (reader.next(fields, ok)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++table.report.rows;
    const std::size_t row_number = table.report.rows;
    if (!ok || fields.size() != header.size()) {
      ++table.report.skipped_rows;
      warn(table.report, "row " + std::to_string(row_number) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()) + (ok ? "" : " (unterminated quote)"));
      continue;
    }

    PaperRecord record;
    record.paper_id = std::string(trim(fields[id_col]));
    record.title = std::string(trim(fields[title_col]));
    record.abstract = std::string(trim(fields[abstract_col]));
    if (record.paper_id.empty() && record.title.empty()) {
      ++table.report.dropped_empty;
      continue;
    }
    if (record.paper_id.empty()) record.paper_id = "_row" + std::to_string(row_number);
    if (!seen.insert(record.paper_id).second) {
      ++table.report.duplicates;
      continue;
    }
    if (record.abstract.empty()) {
      if (record.title.empty()) {
        ++table.report.dropped_empty;
        continue;
      }
      record.abstract = record.title;
      ++table.report.title_fallbacks;
    }
    const std::string_view date_text = trim(fields[date_col]);
    if (!date_text.empty()) {
      record.publish_time = Date::parse(date_text);
      if (!record.publish_time) ++bad_dates;
    }
    table.languages.push_back(lang_col ? std::string(trim(fields[*lang_col])) : std::string());
    table.records.push_back(std::move(record));
  }
  if (bad_dates > 0) {
    warn(table.report, std::to_string(bad_dates) + " unparseable publish_time values left empty");
  }
  return table;
}

bool mentions_covid(std::string_view abstract, bool case_insensitive) {
  if (!case_insensitive) return abstract.find("COVID") != std::string_view::npos;
  return to_lower_ascii(abstract).find("covid") != std::string::npos;
}

void mark_covid(std::span<PaperRecord> records, bool case_insensitive) {
  for (auto& record : records) record.is_covid = mentions_covid(record.abstract, case_insensitive);
}

Corpus::Corpus(std::vector<PaperRecord> papers) : papers_(std::move(papers)) {
  index_.reserve(papers_.size());
  for (std::size_t i = 0; i < papers_.size(); ++i) {
    if (papers_[i].paper_id.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "paper with empty id");
    }
    if (papers_[i].abstract.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "paper '" + papers_[i].paper_id + "' has an empty abstract");
    }
    if (!index_.emplace(papers_[i].paper_id, i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate paper id '" + papers_[i].paper_id + "'");
    }
  }
}

const PaperRecord* Corpus::find(std::string_view paper_id) const {
  auto idx = index_of(paper_id);
  return idx ? &papers_[*idx] : nullptr;
}

std::optional<std::size_t> Corpus::index_of(std::string_view paper_id) const {
  auto it = index_.find(std::string(paper_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool language_is_english(std::string_view value) {
  const std::string lowered = to_lower_ascii(trim(value));
  return lowered == "en" || lowered == "eng" || lowered == "english" ||
         lowered.rfind("en-", 0) == 0 || lowered.rfind("en_", 0) == 0;
}

}  // namespace

IngestResult ingest(std::istream& input, const IngestOptions& options) {
  MetadataTable table = parse_metadata(input, options.metadata);
  IngestResult result;
  result.report.metadata = std::move(table.report);

  std::vector<PaperRecord> kept;
  kept.reserve(table.records.size());
  for (std::size_t i = 0; i < table.records.size(); ++i) {
    auto& record = table.records[i];
    const std::string& language = table.languages[i];
    const bool english = language.empty() ? is_english(record.abstract, options.language)
                                          : language_is_english(language);
    if (!english) {
      ++result.report.non_english_dropped;
      continue;
    }
    kept.push_back(std::move(record));
  }
  mark_covid(kept, options.case_insensitive_covid);
  result.report.kept = kept.size();
  result.corpus = Corpus(std::move(kept));
  return result;
}

CorpusStats corpus_stats(const Corpus& corpus, const AspectAssignments& assignments) {
  if (assignments.size() != corpus.size()) {
    throw Error(ErrorCode::kInvalidArgument, "aspect assignments do not match corpus size");
  }
  CorpusStats stats;
  stats.total = corpus.size();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const bool covid = corpus.papers()[i].is_covid;
    std::array<bool, kNumAspectLabels> present{};
    for (AspectLabel label : assignments[i]) present[static_cast<std::size_t>(label)] = true;
    for (Scope scope : kAllScopes) {
      const auto label = scope_label(scope);
      const bool has = !label || present[static_cast<std::size_t>(*label)];
      if (!has) continue;
      ++stats.all[static_cast<std::size_t>(scope)];
      if (covid) ++stats.covid[static_cast<std::size_t>(scope)];
    }
  }
  return stats;
}

}  // namespace aspectscope

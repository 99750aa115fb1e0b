#include "aspectscope/vocabulary.hpp"

#include <algorithm>
#include <unordered_set>

#include "aspectscope/error.hpp"
#include "aspectscope/store.hpp"

namespace aspectscope {

void VocabularyConfig::validate() const {
  if (!(min_df >= 0.0 && min_df < max_df && max_df <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary config needs 0 <= min_df < max_df <= 1");
  }
  if (max_features < 1) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary config needs max_features >= 1");
  }
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint32_t> document_frequency,
                       std::size_t num_documents)
    : words_(std::move(words)), df_(std::move(document_frequency)), num_documents_(num_documents) {
  if (words_.size() != df_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary words and frequencies differ in length");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<std::uint32_t>(i)).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate vocabulary word '" + words_[i] + "'");
    }
  }
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::hash() const {
  std::string joined;
  for (const auto& w : words_) {
    joined += w;
    joined += '\n';
  }
  return sha256_hex(joined.data(), joined.size());
}

Vocabulary build_vocabulary(std::span<const TokenizedDoc> docs, const VocabularyConfig& config) {
  config.validate();
  if (docs.empty()) throw Error(ErrorCode::kInvalidArgument, "no documents for vocabulary");

  struct Stats {
    std::uint32_t df = 0;
    std::uint64_t total = 0;
  };
  std::unordered_map<std::string, Stats> stats;
  std::unordered_set<std::string_view> seen;
  for (const auto& doc : docs) {
    seen.clear();
    for (const auto& token : doc.tokens) {
      auto& s = stats[token];
      ++s.total;
      if (seen.insert(token).second) ++s.df;
    }
  }

  const double n = static_cast<double>(docs.size());
  struct Candidate {
    std::string word;
    Stats stats;
  };
  std::vector<Candidate> kept;
  for (auto& [word, s] : stats) {
    const double proportion = static_cast<double>(s.df) / n;
    if (proportion < config.min_df || proportion > config.max_df) continue;
    kept.push_back({word, s});
  }
  if (kept.size() > config.max_features) {
    std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
      if (a.stats.total != b.stats.total) return a.stats.total > b.stats.total;
      return a.word < b.word;
    });
    kept.resize(config.max_features);
  }
  if (kept.empty()) throw Error(ErrorCode::kTraining, "vocabulary empty");
  std::sort(kept.begin(), kept.end(),
            [](const Candidate& a, const Candidate& b) { return a.word < b.word; });

  std::vector<std::string> words;
  std::vector<std::uint32_t> df;
  words.reserve(kept.size());
  df.reserve(kept.size());
  for (auto& c : kept) {
    words.push_back(std::move(c.word));
    df.push_back(c.stats.df);
  }
  return Vocabulary(std::move(words), std::move(df), docs.size());
}

}  // namespace aspectscope

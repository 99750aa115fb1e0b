#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aspectscope/corpus.hpp"

namespace aspectscope {

struct VocabularyConfig {
  double min_df = 0.001;
  double max_df = 0.65;
  std::size_t max_features = 1'000'000;

  void validate() const;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> words, std::vector<std::uint32_t> document_frequency,
             std::size_t num_documents);

  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<std::uint32_t>& document_frequency() const noexcept { return df_; }
  std::size_t num_documents() const noexcept { return num_documents_; }
  const std::string& word(std::size_t index) const { return words_[index]; }
  std::optional<std::uint32_t> find(std::string_view word) const;

  // Hex SHA-256 over the ordered word list.
  std::string hash() const;

 private:
  std::vector<std::string> words_;
  std::vector<std::uint32_t> df_;
  std::size_t num_documents_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Keeps words whose document-frequency proportion lies in [min_df, max_df];
// if more than max_features survive, keeps the most frequent by total count
// (ties lexicographic). Words are indexed in lexicographic order.
Vocabulary build_vocabulary(std::span<const TokenizedDoc> docs,
                            const VocabularyConfig& config = {});

}  // namespace aspectscope

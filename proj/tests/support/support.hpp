#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <map>

#include "aspectscope/corpus.hpp"
#include "aspectscope/gazetteer.hpp"
#include "aspectscope/matrix.hpp"

namespace asc_test {

std::filesystem::path data_dir();
std::filesystem::path schema_dir();
std::filesystem::path cli_path();
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Documents drawn from disjoint word blocks: topic t owns words
// "t<t>w<i>" for i < words_per_topic. Each document uses one topic only.
struct SyntheticCorpus {
  std::vector<aspectscope::TokenizedDoc> docs;
  std::vector<std::size_t> truth;  // generating topic per doc
  std::vector<std::vector<std::string>> topic_words;
};
SyntheticCorpus disjoint_topic_corpus(std::size_t docs, std::size_t topics,
                                      std::size_t words_per_topic, std::size_t length,
                                      std::uint32_t seed);

// Random probability vectors (Dirichlet(1) via normalized exponentials).
aspectscope::Matrix random_distributions(std::size_t rows, std::size_t cols, std::uint32_t seed);

// One-hot cluster centres with uniform +-noise, renormalized.
struct ClusterFixture {
  std::vector<std::string> ids;
  aspectscope::Matrix vectors;
  std::vector<int> labels;
};
ClusterFixture cluster_fixture(std::size_t clusters, std::size_t per_cluster, double noise,
                               std::uint32_t seed);

// Abstracts over a small vocabulary with words glued to punctuation and
// near-miss variants ("spiked", "covid-19", "pre-spike").
std::vector<aspectscope::PaperRecord> search_fixture(std::size_t n, std::uint32_t seed);

// A dictionary of roughly `forms` distinct multi-word surface forms (three per
// concept) and single-spaced sentences mixing those forms with filler words.
struct DictionaryFixture {
  std::vector<aspectscope::Concept> concepts;
  std::map<std::string, std::string> form_to_cui;
  std::vector<std::string> sentences;
};
DictionaryFixture dictionary_fixture(std::size_t forms, std::size_t sentences, std::uint32_t seed);

}  // namespace asc_test

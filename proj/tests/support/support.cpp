#include "support/support.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace asc_test {

namespace fs = std::filesystem;

fs::path data_dir() { return ASC_TEST_DATA_DIR; }
fs::path schema_dir() { return ASC_SCHEMA_DIR; }
fs::path cli_path() { return ASC_CLI_PATH; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("asc-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

SyntheticCorpus disjoint_topic_corpus(std::size_t docs, std::size_t topics,
                                      std::size_t words_per_topic, std::size_t length,
                                      std::uint32_t seed) {
  std::mt19937 rng(seed);
  SyntheticCorpus out;
  out.topic_words.resize(topics);
  for (std::size_t t = 0; t < topics; ++t) {
    for (std::size_t i = 0; i < words_per_topic; ++i) {
      out.topic_words[t].push_back("t" + std::to_string(t) + "w" + std::to_string(i));
    }
  }
  std::uniform_int_distribution<std::size_t> word(0, words_per_topic - 1);
  for (std::size_t d = 0; d < docs; ++d) {
    const std::size_t t = d % topics;
    aspectscope::TokenizedDoc doc;
    doc.paper_id = "doc" + std::to_string(d);
    for (std::size_t i = 0; i < length; ++i) doc.tokens.push_back(out.topic_words[t][word(rng)]);
    out.docs.push_back(std::move(doc));
    out.truth.push_back(t);
  }
  // Shuffle so topics are not interleaved in a fixed pattern.
  std::vector<std::size_t> order(docs);
  for (std::size_t i = 0; i < docs; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  SyntheticCorpus shuffled;
  shuffled.topic_words = out.topic_words;
  for (std::size_t i : order) {
    shuffled.docs.push_back(out.docs[i]);
    shuffled.truth.push_back(out.truth[i]);
  }
  return shuffled;
}

aspectscope::Matrix random_distributions(std::size_t rows, std::size_t cols, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::exponential_distribution<double> e(1.0);
  aspectscope::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += (m(r, c) = e(rng));
    for (std::size_t c = 0; c < cols; ++c) m(r, c) /= total;
  }
  return m;
}

ClusterFixture cluster_fixture(std::size_t clusters, std::size_t per_cluster, double noise,
                               std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, noise);
  ClusterFixture f;
  f.vectors = aspectscope::Matrix(clusters * per_cluster, clusters);
  std::size_t row = 0;
  for (std::size_t c = 0; c < clusters; ++c) {
    for (std::size_t i = 0; i < per_cluster; ++i, ++row) {
      f.ids.push_back("c" + std::to_string(c) + "-" + std::to_string(i));
      f.labels.push_back(static_cast<int>(c));
      double total = 0.0;
      for (std::size_t k = 0; k < clusters; ++k) {
        const double v = (k == c ? 1.0 : 0.0) + u(rng);
        f.vectors(row, k) = v;
        total += v;
      }
      for (std::size_t k = 0; k < clusters; ++k) f.vectors(row, k) /= total;
    }
  }
  return f;
}

std::vector<aspectscope::PaperRecord> search_fixture(std::size_t n, std::uint32_t seed) {
  static const std::vector<std::string> kWords = {
      "spike",    "Spike",   "spiked",  "SPIKE",    "protein",  "proteins", "covid",
      "COVID-19", "covid-19", "pre-spike", "virus",  "viral",    "the",      "of",
      "environmental", "stability", "Stability", "cells", "ACE2", "binding", "2020",
      "mask",     "masks",   "unmasked", "trial",   "trials",   "naïve",    "café"};
  static const std::vector<std::string> kGlue = {" ", " ", " ", " ", ", ", ". ", " (", ") ",
                                                 "; ", "\n", " - ", "/"};
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> word(0, kWords.size() - 1);
  std::uniform_int_distribution<std::size_t> glue(0, kGlue.size() - 1);
  std::uniform_int_distribution<int> len(3, 40);
  std::uniform_int_distribution<int> month(1, 12);
  std::uniform_int_distribution<int> day(1, 28);
  std::vector<aspectscope::PaperRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    aspectscope::PaperRecord p;
    p.paper_id = "s" + std::to_string(i);
    p.title = "t";
    const int words = len(rng);
    for (int w = 0; w < words; ++w) {
      if (w) p.abstract += kGlue[glue(rng)];
      p.abstract += kWords[word(rng)];
    }
    p.abstract += ".";
    if (rng() % 7 != 0) p.publish_time = aspectscope::Date{2020, month(rng), day(rng)};
    out.push_back(std::move(p));
  }
  return out;
}

DictionaryFixture dictionary_fixture(std::size_t forms, std::size_t sentences,
                                     std::uint32_t seed) {
  static const std::vector<std::string> kSyl = {"ka", "ro", "mi", "te", "su", "lo", "van",
                                                "dre", "po", "xi", "nu", "bel", "ta", "gor"};
  std::mt19937 rng(seed);
  auto word = [&] {
    std::string w;
    const int n = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < n; ++i) w += kSyl[rng() % kSyl.size()];
    return w;
  };
  DictionaryFixture f;
  std::vector<std::string> all_forms;
  std::size_t id = 0;
  while (all_forms.size() < forms) {
    aspectscope::Concept c;
    char buf[16];
    std::snprintf(buf, sizeof buf, "C%07zu", ++id);
    c.cui = buf;
    c.semantic_type = "Synthetic";
    std::vector<std::string> mine;
    for (int k = 0; k < 3; ++k) {
      std::string form = word();
      const int extra = static_cast<int>(rng() % 3);
      for (int e = 0; e < extra; ++e) form += " " + word();
      if (f.form_to_cui.count(form)) continue;
      f.form_to_cui[form] = c.cui;
      mine.push_back(form);
      all_forms.push_back(form);
    }
    if (mine.empty()) continue;
    c.canonical_name = mine[0];
    c.synonyms.assign(mine.begin() + 1, mine.end());
    f.concepts.push_back(std::move(c));
  }
  static const std::vector<std::string> kFiller = {"the", "of", "patients", "with", "and",
                                                   "in", "we", "observed", "levels"};
  for (std::size_t s = 0; s < sentences; ++s) {
    std::string text;
    const int parts = 5 + static_cast<int>(rng() % 15);
    for (int p = 0; p < parts; ++p) {
      if (p) text += ' ';
      std::string piece;
      switch (rng() % 4) {
        case 0: piece = all_forms[rng() % all_forms.size()]; break;
        case 1: piece = word(); break;
        default: piece = kFiller[rng() % kFiller.size()]; break;
      }
      if (rng() % 5 == 0) piece[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(piece[0])));
      if (rng() % 6 == 0) piece = "(" + piece + ")";
      else if (rng() % 6 == 0) piece += ",";
      else if (rng() % 9 == 0) piece += "-like";
      text += piece;
    }
    text += '.';
    f.sentences.push_back(std::move(text));
  }
  return f;
}

}  // namespace asc_test

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aspectscope/corpus.hpp"
#include "aspectscope/matrix.hpp"
#include "aspectscope/vocabulary.hpp"

namespace aspectscope {

struct LdaConfig {
  std::size_t num_topics = 1;
  std::size_t iterations = 15;
  double alpha = 0.1;
  double beta = 0.01;
  std::uint64_t seed = 0;

  void validate() const;
};

// min(400, floor(sqrt(n_docs / 2))). Throws for n_docs < 2.
std::size_t heuristic_topic_count(std::size_t n_docs);

struct LdaModel {
  LdaConfig config;
  Vocabulary vocabulary;
  std::vector<std::string> doc_ids;           // rows of theta
  std::vector<std::string> excluded_doc_ids;  // no in-vocabulary tokens
  Matrix phi;    // K x V
  Matrix theta;  // D x K

  std::size_t num_topics() const noexcept { return phi.rows(); }
  std::size_t num_docs() const noexcept { return theta.rows(); }
  std::size_t dominant_topic(std::size_t doc) const { return argmax(theta.row(doc)); }
};

// Complete-data log joint log p(w, z) recorded after every sweep.
struct TrainTrace {
  std::vector<double> log_joint;
};

// Collapsed Gibbs sampling. Deterministic for a given config.seed.
LdaModel train_lda(std::span<const TokenizedDoc> docs, const Vocabulary& vocabulary,
                   const LdaConfig& config, TrainTrace* trace = nullptr);

// Fold-in Gibbs sampling with topic-word distributions held fixed. Returns
// the average of the smoothed doc-topic estimate over the last 10 sweeps.
// A query without in-vocabulary tokens yields the uniform distribution.
std::vector<double> infer_topics(const LdaModel& model, std::span<const std::string> tokens,
                                 std::size_t iterations = 50, std::uint64_t seed = 0);

struct TopicWord {
  std::string word;
  double weight = 0.0;
};

struct TopicSummary {
  std::size_t topic_id = 0;
  std::vector<TopicWord> top_words;
  std::size_t document_count = 0;
};

std::vector<TopicWord> top_words(const LdaModel& model, std::size_t topic, std::size_t n = 10);

// Topics ordered by the number of documents whose theta argmax is the topic
// (descending, ties by id). A non-empty filter keeps topics whose top-10
// words contain every lowercase whitespace-separated filter token.
std::vector<TopicSummary> list_topics(const LdaModel& model, std::string_view keyword_filter = {},
                                      std::size_t num_words = 10);

enum class PaperOrder { kScore, kDate };

struct TopicPaper {
  std::string paper_id;
  double score = 0.0;
  std::optional<Date> publish_time;
};

using DateLookup = std::function<std::optional<Date>(const std::string& paper_id)>;

struct PapersInTopicOptions {
  PaperOrder order = PaperOrder::kScore;
  std::size_t limit = 20;
  std::size_t offset = 0;
  double min_score = 0.25;
};

struct TopicPaperPage {
  std::vector<TopicPaper> papers;  // the [offset, offset + limit) window
  std::size_t total = 0;           // candidates before paging
};

// Candidates are documents whose argmax is the topic plus any document with
// score >= min_score. Score order is descending, date order is newest first
// with undated papers last; ties by paper id.
TopicPaperPage papers_in_topic(const LdaModel& model, std::size_t topic_id,
                                        const PapersInTopicOptions& options,
                                        const DateLookup& dates);

}  // namespace aspectscope

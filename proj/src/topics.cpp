#include <algorithm>
#include <numeric>

#include "aspectscope/error.hpp"
#include "aspectscope/lda.hpp"

namespace aspectscope {

std::vector<TopicWord> top_words(const LdaModel& model, std::size_t topic, std::size_t n) {
  const auto row = model.phi.row(topic);
  std::vector<std::size_t> order(row.size());
  std::iota(order.begin(), order.end(), 0);
  n = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (row[a] != row[b]) return row[a] > row[b];
                      return a < b;
                    });
  std::vector<TopicWord> words;
  words.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    words.push_back({model.vocabulary.word(order[i]), row[order[i]]});
  }
  return words;
}

std::vector<TopicSummary> list_topics(const LdaModel& model, std::string_view keyword_filter,
                                      std::size_t num_words) {
  const std::size_t k_count = model.num_topics();
  std::vector<std::size_t> counts(k_count, 0);
  for (std::size_t d = 0; d < model.num_docs(); ++d) ++counts[model.dominant_topic(d)];

  const std::string lowered = to_lower_ascii(keyword_filter);
  const auto filter = split_whitespace(lowered);
  std::vector<TopicSummary> summaries;
  for (std::size_t k = 0; k < k_count; ++k) {
    TopicSummary summary{k, top_words(model, k, num_words), counts[k]};
    if (!filter.empty()) {
      // Membership is tested against the top-10 list regardless of num_words.
      const auto top10 = num_words == 10 ? summary.top_words : top_words(model, k, 10);
      const bool all = std::all_of(filter.begin(), filter.end(), [&](std::string_view term) {
        return std::any_of(top10.begin(), top10.end(),
                           [&](const TopicWord& w) { return w.word == term; });
      });
      if (!all) continue;
    }
    summaries.push_back(std::move(summary));
  }
  std::stable_sort(summaries.begin(), summaries.end(),
                   [](const TopicSummary& a, const TopicSummary& b) {
                     if (a.document_count != b.document_count) {
                       return a.document_count > b.document_count;
                     }
                     return a.topic_id < b.topic_id;
                   });
  return summaries;
}

TopicPaperPage papers_in_topic(const LdaModel& model, std::size_t topic_id,
                               const PapersInTopicOptions& options, const DateLookup& dates) {
  if (topic_id >= model.num_topics()) {
    throw Error(ErrorCode::kNotFound, "topic " + std::to_string(topic_id) + " does not exist");
  }
  std::vector<TopicPaper> candidates;
  for (std::size_t d = 0; d < model.num_docs(); ++d) {
    const double score = model.theta(d, topic_id);
    if (model.dominant_topic(d) != topic_id && score < options.min_score) continue;
    TopicPaper paper{model.doc_ids[d], score, std::nullopt};
    if (dates) paper.publish_time = dates(paper.paper_id);
    candidates.push_back(std::move(paper));
  }
  if (options.order == PaperOrder::kScore) {
    std::sort(candidates.begin(), candidates.end(), [](const TopicPaper& a, const TopicPaper& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.paper_id < b.paper_id;
    });
  } else {
    std::sort(candidates.begin(), candidates.end(), [](const TopicPaper& a, const TopicPaper& b) {
      if (a.publish_time.has_value() != b.publish_time.has_value()) {
        return a.publish_time.has_value();
      }
      if (a.publish_time && *a.publish_time != *b.publish_time) {
        return *a.publish_time > *b.publish_time;
      }
      return a.paper_id < b.paper_id;
    });
  }
  TopicPaperPage page;
  page.total = candidates.size();
  const std::size_t begin = std::min(options.offset, candidates.size());
  const std::size_t end = std::min(candidates.size(), begin + options.limit);
  page.papers.assign(std::make_move_iterator(candidates.begin() + static_cast<std::ptrdiff_t>(begin)),
                     std::make_move_iterator(candidates.begin() + static_cast<std::ptrdiff_t>(end)));
  return page;
}

}  // namespace aspectscope

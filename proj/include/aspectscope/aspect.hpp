#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "aspectscope/labels.hpp"

namespace aspectscope {

struct LabeledSentence {
  std::vector<std::string> tokens;
  double position = 0.0;  // sentence index / sentence count, in [0, 1]
  AspectLabel label = AspectLabel::kOther;
};

struct AspectDistribution {
  std::array<double, kNumAspectLabels> probability{};
  AspectLabel label = AspectLabel::kBackground;  // argmax, fixed-order tie-break

  double operator[](AspectLabel l) const {
    return probability[static_cast<std::size_t>(l)];
  }
};

struct AspectTrainOptions {
  std::uint64_t seed = 0;
  std::string corpus_id;
  std::string date;
  // Labels the model must cover. Empty means all five. Labels outside the
  // set are never predicted.
  std::vector<AspectLabel> labels;
  double smoothing = 1.0;
};

inline constexpr std::size_t kPositionBins = 10;

// Multinomial naive Bayes over tokens plus a per-bin positional prior
// P(label | position bin), combined in log space.
class AspectModel {
 public:
  struct Metadata {
    std::string corpus_id;
    std::uint64_t seed = 0;
    std::string date;
    std::size_t training_examples = 0;
  };

  using LogWeights = std::array<double, kNumAspectLabels>;

  AspectModel() = default;
  AspectModel(std::array<bool, kNumAspectLabels> active,
              std::unordered_map<std::string, LogWeights> token_weights,
              LogWeights unknown_weight,
              std::array<LogWeights, kPositionBins> position_weights,
              Metadata metadata);

  AspectDistribution classify(std::span<const std::string> tokens, double position) const;

  // Unnormalized log scores; inactive labels are -inf.
  LogWeights scores(std::span<const std::string> tokens, double position) const;

  const std::array<bool, kNumAspectLabels>& active() const noexcept { return active_; }
  const std::unordered_map<std::string, LogWeights>& token_weights() const noexcept {
    return token_weights_;
  }
  const LogWeights& unknown_weight() const noexcept { return unknown_weight_; }
  const std::array<LogWeights, kPositionBins>& position_weights() const noexcept {
    return position_weights_;
  }
  const Metadata& metadata() const noexcept { return metadata_; }

 private:
  std::array<bool, kNumAspectLabels> active_{};
  std::unordered_map<std::string, LogWeights> token_weights_;
  LogWeights unknown_weight_{};
  std::array<LogWeights, kPositionBins> position_weights_{};
  Metadata metadata_;
};

std::size_t position_bin(double position);

// Argmax over scores with ties going to the earlier label.
AspectLabel argmax_label(const AspectModel::LogWeights& scores);

AspectModel train_aspect(std::span<const LabeledSentence> examples,
                         const AspectTrainOptions& options = {});

using ConfusionMatrix = std::array<std::array<std::size_t, kNumAspectLabels>, kNumAspectLabels>;

struct EvaluationReport {
  // confusion[true][predicted]
  ConfusionMatrix confusion{};
  std::array<double, kNumAspectLabels> precision{};
  std::array<double, kNumAspectLabels> recall{};
  std::array<double, kNumAspectLabels> f1{};
  std::array<std::size_t, kNumAspectLabels> support{};
  double accuracy = 0.0;
};

EvaluationReport report_from_confusion(const ConfusionMatrix& confusion);
EvaluationReport evaluate(const AspectModel& model, std::span<const LabeledSentence> test_set);

// One line of the JSON-lines labeled-data format.
struct LabeledRecord {
  std::string paper_id;
  std::size_t sentence_index = 0;
  std::string text;
  AspectLabel label = AspectLabel::kOther;
};

std::vector<LabeledRecord> read_labeled_jsonl(std::istream& input);

// Tokenizes each record; position = sentence_index / (sentences in that
// paper), where the count is the largest index seen for the paper plus one.
std::vector<LabeledSentence> to_training_examples(std::span<const LabeledRecord> records);

}  // namespace aspectscope

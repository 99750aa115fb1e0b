#include "aspectscope/aspect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "aspectscope/error.hpp"
#include "aspectscope/text.hpp"
#include "json.hpp"

namespace aspectscope {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t idx(AspectLabel label) { return static_cast<std::size_t>(label); }

}  // namespace

std::size_t position_bin(double position) {
  if (!(position >= 0.0)) return 0;
  const auto bin = static_cast<std::size_t>(position * static_cast<double>(kPositionBins));
  return std::min(bin, kPositionBins - 1);
}

AspectLabel argmax_label(const AspectModel::LogWeights& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kNumAspectLabels; ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return static_cast<AspectLabel>(best);
}

AspectModel::AspectModel(std::array<bool, kNumAspectLabels> active,
                         std::unordered_map<std::string, LogWeights> token_weights,
                         LogWeights unknown_weight,
                         std::array<LogWeights, kPositionBins> position_weights,
                         Metadata metadata)
    : active_(active),
      token_weights_(std::move(token_weights)),
      unknown_weight_(unknown_weight),
      position_weights_(position_weights),
      metadata_(std::move(metadata)) {
  if (std::none_of(active_.begin(), active_.end(), [](bool a) { return a; })) {
    throw Error(ErrorCode::kInvalidArgument, "aspect model has no active labels");
  }
}

AspectModel::LogWeights AspectModel::scores(std::span<const std::string> tokens,
                                            double position) const {
  LogWeights s = position_weights_[position_bin(position)];
  for (const auto& token : tokens) {
    auto it = token_weights_.find(token);
    const LogWeights& w = it == token_weights_.end() ? unknown_weight_ : it->second;
    for (std::size_t l = 0; l < kNumAspectLabels; ++l) s[l] += w[l];
  }
  for (std::size_t l = 0; l < kNumAspectLabels; ++l) {
    if (!active_[l]) s[l] = kNegInf;
  }
  return s;
}

AspectDistribution AspectModel::classify(std::span<const std::string> tokens,
                                         double position) const {
  const LogWeights s = scores(tokens, position);
  AspectDistribution dist;
  dist.label = argmax_label(s);
  const double top = s[idx(dist.label)];
  double total = 0.0;
  for (std::size_t l = 0; l < kNumAspectLabels; ++l) {
    dist.probability[l] = active_[l] ? std::exp(s[l] - top) : 0.0;
    total += dist.probability[l];
  }
  for (double& p : dist.probability) p /= total;
  return dist;
}

AspectModel train_aspect(std::span<const LabeledSentence> examples,
                         const AspectTrainOptions& options) {
  if (!(options.smoothing > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing constant must be positive");
  }
  std::array<bool, kNumAspectLabels> active{};
  if (options.labels.empty()) {
    active.fill(true);
  } else {
    for (AspectLabel l : options.labels) active[idx(l)] = true;
  }

  std::array<std::size_t, kNumAspectLabels> label_examples{};
  std::array<double, kNumAspectLabels> label_tokens{};
  std::array<std::array<double, kNumAspectLabels>, kPositionBins> bin_counts{};
  std::map<std::string, std::array<double, kNumAspectLabels>> counts;

  for (const auto& ex : examples) {
    if (!(ex.position >= 0.0 && ex.position <= 1.0)) {
      throw Error(ErrorCode::kTraining, "position fraction outside [0, 1]");
    }
    const std::size_t l = idx(ex.label);
    if (!active[l]) {
      throw Error(ErrorCode::kTraining, "example labeled '" +
                                            std::string(aspect_label_name(ex.label)) +
                                            "' is outside the model's label set");
    }
    ++label_examples[l];
    bin_counts[position_bin(ex.position)][l] += 1.0;
    for (const auto& token : ex.tokens) {
      counts[token][l] += 1.0;
      label_tokens[l] += 1.0;
    }
  }
  std::size_t num_active = 0;
  for (AspectLabel label : kAllAspectLabels) {
    if (!active[idx(label)]) continue;
    ++num_active;
    if (label_examples[idx(label)] == 0) {
      throw Error(ErrorCode::kTraining, "no training examples for label '" +
                                            std::string(aspect_label_name(label)) + "'");
    }
  }

  const double s = options.smoothing;
  const double vocab = static_cast<double>(counts.size());
  AspectModel::LogWeights unknown{};
  for (std::size_t l = 0; l < kNumAspectLabels; ++l) {
    unknown[l] = active[l] ? std::log(s / (label_tokens[l] + s * vocab)) : 0.0;
  }
  std::unordered_map<std::string, AspectModel::LogWeights> weights;
  weights.reserve(counts.size());
  for (const auto& [token, c] : counts) {
    AspectModel::LogWeights w{};
    for (std::size_t l = 0; l < kNumAspectLabels; ++l) {
      w[l] = active[l] ? std::log((c[l] + s) / (label_tokens[l] + s * vocab)) : 0.0;
    }
    weights.emplace(token, w);
  }
  std::array<AspectModel::LogWeights, kPositionBins> position{};
  for (std::size_t b = 0; b < kPositionBins; ++b) {
    double bin_total = 0.0;
    for (std::size_t l = 0; l < kNumAspectLabels; ++l) bin_total += bin_counts[b][l];
    for (std::size_t l = 0; l < kNumAspectLabels; ++l) {
      position[b][l] =
          active[l] ? std::log((bin_counts[b][l] + s) / (bin_total + s * num_active)) : kNegInf;
    }
  }

  AspectModel::Metadata meta;
  meta.corpus_id = options.corpus_id;
  meta.seed = options.seed;
  meta.date = options.date;
  meta.training_examples = examples.size();
  return AspectModel(active, std::move(weights), unknown, position, std::move(meta));
}

EvaluationReport report_from_confusion(const ConfusionMatrix& confusion) {
  EvaluationReport report;
  report.confusion = confusion;
  std::size_t total = 0;
  std::size_t correct = 0;
  std::array<std::size_t, kNumAspectLabels> predicted{};
  for (std::size_t t = 0; t < kNumAspectLabels; ++t) {
    for (std::size_t p = 0; p < kNumAspectLabels; ++p) {
      report.support[t] += confusion[t][p];
      predicted[p] += confusion[t][p];
      total += confusion[t][p];
    }
    correct += confusion[t][t];
  }
  if (total == 0) throw Error(ErrorCode::kInvalidArgument, "empty test set");
  for (std::size_t l = 0; l < kNumAspectLabels; ++l) {
    const double tp = static_cast<double>(confusion[l][l]);
    report.precision[l] = predicted[l] ? tp / static_cast<double>(predicted[l]) : 0.0;
    report.recall[l] = report.support[l] ? tp / static_cast<double>(report.support[l]) : 0.0;
    const double pr = report.precision[l] + report.recall[l];
    report.f1[l] = pr > 0.0 ? 2.0 * report.precision[l] * report.recall[l] / pr : 0.0;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  return report;
}

EvaluationReport evaluate(const AspectModel& model, std::span<const LabeledSentence> test_set) {
  if (test_set.empty()) throw Error(ErrorCode::kInvalidArgument, "empty test set");
  ConfusionMatrix confusion{};
  for (const auto& ex : test_set) {
    const AspectLabel predicted = argmax_label(model.scores(ex.tokens, ex.position));
    ++confusion[idx(ex.label)][idx(predicted)];
  }
  return report_from_confusion(confusion);
}

std::vector<LabeledRecord> read_labeled_jsonl(std::istream& input) {
  std::vector<LabeledRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(input, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    auto where = [&] { return "labels line " + std::to_string(line_number) + ": "; };
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, where() + e.what());
    }
    if (!obj.is_object()) throw Error(ErrorCode::kInvalidArgument, where() + "not an object");
    LabeledRecord record;
    try {
      record.paper_id = obj.at("paper_id").get<std::string>();
      record.sentence_index = obj.at("sentence_index").get<std::size_t>();
      record.text = obj.at("text").get<std::string>();
      const auto label_name = obj.at("label").get<std::string>();
      const auto label = parse_aspect_label(label_name);
      if (!label) {
        throw Error(ErrorCode::kInvalidArgument, where() + "unknown label '" + label_name + "'");
      }
      record.label = *label;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, where() + e.what());
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<LabeledSentence> to_training_examples(std::span<const LabeledRecord> records) {
  std::map<std::string, std::size_t> sentence_counts;
  for (const auto& r : records) {
    auto& n = sentence_counts[r.paper_id];
    n = std::max(n, r.sentence_index + 1);
  }
  std::vector<LabeledSentence> examples;
  examples.reserve(records.size());
  for (const auto& r : records) {
    LabeledSentence ex;
    ex.tokens = tokenize(r.text);
    ex.position = static_cast<double>(r.sentence_index) /
                  static_cast<double>(sentence_counts[r.paper_id]);
    ex.label = r.label;
    examples.push_back(std::move(ex));
  }
  return examples;
}

}  // namespace aspectscope

#include "aspectscope/lda.hpp"

#include <algorithm>
#include <cmath>

#include "aspectscope/error.hpp"
#include "random.hpp"

namespace aspectscope {

void LdaConfig::validate() const {
  if (num_topics < 1) throw Error(ErrorCode::kInvalidArgument, "num_topics must be >= 1");
  if (iterations < 1) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha and beta must be positive");
  }
}

std::size_t heuristic_topic_count(std::size_t n_docs) {
  if (n_docs < 2) {
    throw Error(ErrorCode::kInvalidArgument, "topic count needs at least 2 documents");
  }
  // Largest k with 2k^2 <= n, i.e. floor(sqrt(n / 2)) without rounding error.
  auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n_docs) / 2.0));
  while (k > 0 && 2 * k * k > n_docs) --k;
  while (2 * (k + 1) * (k + 1) <= n_docs) ++k;
  return std::max<std::size_t>(1, std::min<std::size_t>(400, k));
}

namespace {

class GibbsSampler {
 public:
  GibbsSampler(std::vector<std::vector<std::uint32_t>> docs, std::size_t vocab_size,
               const LdaConfig& config)
      : docs_(std::move(docs)),
        k_(config.num_topics),
        v_(vocab_size),
        alpha_(config.alpha),
        beta_(config.beta),
        rng_(config.seed),
        ndk_(docs_.size() * k_, 0),
        nwk_(v_ * k_, 0),
        nk_(k_, 0),
        weights_(k_) {
    z_.resize(docs_.size());
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      z_[d].resize(docs_[d].size());
      for (std::size_t i = 0; i < docs_[d].size(); ++i) {
        const auto topic = static_cast<std::uint32_t>(rng_.below(k_));
        z_[d][i] = topic;
        add(d, docs_[d][i], topic, +1);
      }
    }
  }

  void sweep() {
    const double vbeta = static_cast<double>(v_) * beta_;
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      std::uint32_t* nd = &ndk_[d * k_];
      for (std::size_t i = 0; i < docs_[d].size(); ++i) {
        const std::uint32_t w = docs_[d][i];
        add(d, w, z_[d][i], -1);
        const std::uint32_t* nw = &nwk_[static_cast<std::size_t>(w) * k_];
        double total = 0.0;
        for (std::size_t k = 0; k < k_; ++k) {
          total += (nd[k] + alpha_) * (nw[k] + beta_) / (nk_[k] + vbeta);
          weights_[k] = total;
        }
        const double u = rng_.uniform() * total;
        std::size_t topic = 0;
        while (topic + 1 < k_ && weights_[topic] <= u) ++topic;
        z_[d][i] = static_cast<std::uint32_t>(topic);
        add(d, w, static_cast<std::uint32_t>(topic), +1);
      }
    }
  }

  double log_joint() const {
    const double kd = static_cast<double>(k_);
    const double vd = static_cast<double>(v_);
    double lp = 0.0;
    for (std::size_t k = 0; k < k_; ++k) {
      lp += std::lgamma(vd * beta_) - vd * std::lgamma(beta_);
      for (std::size_t w = 0; w < v_; ++w) lp += std::lgamma(nwk_[w * k_ + k] + beta_);
      lp -= std::lgamma(nk_[k] + vd * beta_);
    }
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      lp += std::lgamma(kd * alpha_) - kd * std::lgamma(alpha_);
      for (std::size_t k = 0; k < k_; ++k) lp += std::lgamma(ndk_[d * k_ + k] + alpha_);
      lp -= std::lgamma(static_cast<double>(docs_[d].size()) + kd * alpha_);
    }
    return lp;
  }

  Matrix phi() const {
    Matrix phi(k_, v_);
    const double vbeta = static_cast<double>(v_) * beta_;
    for (std::size_t k = 0; k < k_; ++k) {
      for (std::size_t w = 0; w < v_; ++w) {
        phi(k, w) = (nwk_[w * k_ + k] + beta_) / (nk_[k] + vbeta);
      }
    }
    return phi;
  }

  Matrix theta() const {
    Matrix theta(docs_.size(), k_);
    const double kalpha = static_cast<double>(k_) * alpha_;
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      const double denom = static_cast<double>(docs_[d].size()) + kalpha;
      for (std::size_t k = 0; k < k_; ++k) theta(d, k) = (ndk_[d * k_ + k] + alpha_) / denom;
    }
    return theta;
  }

 private:
  void add(std::size_t d, std::uint32_t w, std::uint32_t k, int delta) {
    ndk_[d * k_ + k] += delta;
    nwk_[static_cast<std::size_t>(w) * k_ + k] += delta;
    nk_[k] += delta;
  }

  std::vector<std::vector<std::uint32_t>> docs_;
  std::vector<std::vector<std::uint32_t>> z_;
  std::size_t k_;
  std::size_t v_;
  double alpha_;
  double beta_;
  Rng rng_;
  std::vector<std::uint32_t> ndk_;
  std::vector<std::uint32_t> nwk_;  // word-major
  std::vector<std::uint32_t> nk_;
  std::vector<double> weights_;
};

}  // namespace

LdaModel train_lda(std::span<const TokenizedDoc> docs, const Vocabulary& vocabulary,
                   const LdaConfig& config, TrainTrace* trace) {
  config.validate();
  if (vocabulary.size() == 0) throw Error(ErrorCode::kTraining, "vocabulary empty");

  LdaModel model;
  model.config = config;
  model.vocabulary = vocabulary;
  std::vector<std::vector<std::uint32_t>> word_ids;
  for (const auto& doc : docs) {
    std::vector<std::uint32_t> ids;
    ids.reserve(doc.tokens.size());
    for (const auto& token : doc.tokens) {
      if (auto id = vocabulary.find(token)) ids.push_back(*id);
    }
    if (ids.empty()) {
      model.excluded_doc_ids.push_back(doc.paper_id);
      continue;
    }
    model.doc_ids.push_back(doc.paper_id);
    word_ids.push_back(std::move(ids));
  }
  if (word_ids.empty()) throw Error(ErrorCode::kTraining, "no trainable documents");

  GibbsSampler sampler(std::move(word_ids), vocabulary.size(), config);
  if (trace) trace->log_joint.clear();
  for (std::size_t it = 0; it < config.iterations; ++it) {
    sampler.sweep();
    if (trace) trace->log_joint.push_back(sampler.log_joint());
  }
  model.phi = sampler.phi();
  model.theta = sampler.theta();
  return model;
}

std::vector<double> infer_topics(const LdaModel& model, std::span<const std::string> tokens,
                                 std::size_t iterations, std::uint64_t seed) {
  const std::size_t k_count = model.num_topics();
  std::vector<double> result(k_count, 1.0 / static_cast<double>(k_count));
  std::vector<std::uint32_t> words;
  for (const auto& token : tokens) {
    if (auto id = model.vocabulary.find(token)) words.push_back(*id);
  }
  if (words.empty() || k_count == 1) return result;
  iterations = std::max<std::size_t>(iterations, 1);

  const double alpha = model.config.alpha;
  Rng rng(seed);
  std::vector<std::uint32_t> z(words.size());
  std::vector<std::uint32_t> ndk(k_count, 0);
  for (auto& topic : z) {
    topic = static_cast<std::uint32_t>(rng.below(k_count));
    ++ndk[topic];
  }
  std::vector<double> weights(k_count);
  std::vector<double> sum(k_count, 0.0);
  const std::size_t averaged = std::min<std::size_t>(10, iterations);
  const double denom = static_cast<double>(words.size()) + static_cast<double>(k_count) * alpha;
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --ndk[z[i]];
      double total = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) {
        total += (ndk[k] + alpha) * model.phi(k, words[i]);
        weights[k] = total;
      }
      const double u = rng.uniform() * total;
      std::size_t topic = 0;
      while (topic + 1 < k_count && weights[topic] <= u) ++topic;
      z[i] = static_cast<std::uint32_t>(topic);
      ++ndk[topic];
    }
    if (it + averaged >= iterations) {
      for (std::size_t k = 0; k < k_count; ++k) sum[k] += (ndk[k] + alpha) / denom;
    }
  }
  double total = 0.0;
  for (double s : sum) total += s;
  for (std::size_t k = 0; k < k_count; ++k) result[k] = sum[k] / total;
  return result;
}

}  // namespace aspectscope

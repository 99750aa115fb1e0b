#include "aspectscope/knn.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "aspectscope/error.hpp"
#include "aspectscope/text.hpp"

namespace aspectscope {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_distribution(std::span<const double> v, const std::string& what) {
  double sum = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) throw Error(ErrorCode::kInvalidArgument, what + " has a negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::kInvalidArgument, what + " does not sum to 1");
  }
}

}  // namespace

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument, "dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

KnnIndex::KnnIndex(std::vector<std::string> paper_ids, Matrix vectors, std::string slot)
    : ids_(std::move(paper_ids)), vectors_(std::move(vectors)), slot_(std::move(slot)) {
  if (ids_.size() != vectors_.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "index ids and vectors differ in count");
  }
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!seen.insert(ids_[i]).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate paper id '" + ids_[i] + "' in index");
    }
    check_distribution(vectors_.row(i), "vector for '" + ids_[i] + "'");
  }
}

KnnIndex KnnIndex::build(const LdaModel& model, std::string slot) {
  if (model.num_docs() == 0) throw Error(ErrorCode::kInvalidArgument, "model has no documents");
  return KnnIndex(model.doc_ids, model.theta, std::move(slot));
}

std::vector<Neighbor> KnnIndex::nearest(std::span<const double> query, std::size_t k) const {
  if (query.size() != dimension()) {
    throw Error(ErrorCode::kInvalidArgument,
                "dimension mismatch: query has " + std::to_string(query.size()) +
                    " entries, index has " + std::to_string(dimension()));
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    scored.emplace_back(euclidean_distance(query, vectors_.row(i)), i);
  }
  k = std::min(k, scored.size());
  auto less = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return ids_[a.second] < ids_[b.second];
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    less);
  std::vector<Neighbor> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({ids_[scored[i].second], scored[i].first});
  return out;
}

std::vector<Neighbor> recommend(const LdaModel& model, const KnnIndex& index,
                                std::string_view query_text, const RecommendOptions& options) {
  if (options.k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const auto tokens = tokenize(query_text);
  if (tokens.empty()) throw Error(ErrorCode::kInvalidArgument, "query has no content words");
  const auto theta = infer_topics(model, tokens, options.infer_iterations, options.seed);
  return index.nearest(theta, options.k);
}

}  // namespace aspectscope

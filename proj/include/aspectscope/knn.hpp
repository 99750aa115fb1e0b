#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aspectscope/lda.hpp"
#include "aspectscope/matrix.hpp"

namespace aspectscope {

struct Neighbor {
  std::string paper_id;
  double distance = 0.0;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Immutable exact nearest-neighbour index over topic distributions.
class KnnIndex {
 public:
  KnnIndex() = default;
  // Validates: equal lengths, entries >= 0, rows summing to 1 within 1e-9,
  // unique ids.
  KnnIndex(std::vector<std::string> paper_ids, Matrix vectors, std::string slot = {});

  static KnnIndex build(const LdaModel& model, std::string slot = {});

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dimension() const noexcept { return vectors_.cols(); }
  const std::string& slot() const noexcept { return slot_; }
  const std::vector<std::string>& paper_ids() const noexcept { return ids_; }
  const Matrix& vectors() const noexcept { return vectors_; }

  // The k smallest Euclidean distances, ascending, ties by paper id.
  std::vector<Neighbor> nearest(std::span<const double> query, std::size_t k) const;

 private:
  std::vector<std::string> ids_;
  Matrix vectors_;
  std::string slot_;
};

struct RecommendOptions {
  std::size_t k = 10;
  std::size_t infer_iterations = 50;
  std::uint64_t seed = 0;
};

// tokenize -> infer_topics -> nearest. Throws kInvalidArgument
// "query has no content words" when the text has no tokens.
std::vector<Neighbor> recommend(const LdaModel& model, const KnnIndex& index,
                                std::string_view query_text, const RecommendOptions& options = {});

}  // namespace aspectscope

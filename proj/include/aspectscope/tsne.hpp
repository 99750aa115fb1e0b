#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aspectscope/matrix.hpp"

namespace aspectscope {

struct ProjectionConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double learning_rate = 200.0;
  std::uint64_t seed = 0;
  std::size_t max_points = 20'000;
  // Above max_points, project a seeded random sample instead of failing.
  bool sample_if_too_large = false;

  void validate() const;
};

struct ProjectedPoint {
  std::string paper_id;
  double x = 0.0;
  double y = 0.0;
  std::size_t dominant_topic = 0;
  std::string title;
};

struct ProjectionResult {
  std::vector<ProjectedPoint> points;  // input order (or sample order)
  // (iteration, KL divergence) every 50 iterations and at the last one.
  std::vector<std::pair<std::size_t, double>> kl_trace;
};

// Exact t-SNE to two dimensions. The result does not depend on row order:
// initial coordinates are drawn from (seed, paper id).
ProjectionResult project(std::span<const std::string> paper_ids, const Matrix& vectors,
                         const ProjectionConfig& config = {});

}  // namespace aspectscope

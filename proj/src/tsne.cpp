#include "aspectscope/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aspectscope/error.hpp"
#include "random.hpp"

namespace aspectscope {

void ProjectionConfig::validate() const {
  if (!(perplexity >= 2.0)) throw Error(ErrorCode::kInvalidArgument, "perplexity must be >= 2");
  if (iterations < 250) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 250");
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive");
  }
  if (!(early_exaggeration >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "early exaggeration must be >= 1");
  }
  if (max_points < 5) throw Error(ErrorCode::kInvalidArgument, "max_points must be >= 5");
}

namespace {

constexpr double kMinProbability = 1e-12;

// Row i of the conditional affinities, with the Gaussian bandwidth found by
// bisection so the row's entropy matches log(perplexity).
void conditional_row(const std::vector<double>& sq_dist, std::size_t n, std::size_t i,
                     double target_entropy, std::vector<double>& row) {
  double beta = 1.0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  const double* d = &sq_dist[i * n];
  for (int step = 0; step < 200; ++step) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = j == i ? 0.0 : std::exp(-d[j] * beta);
      sum += row[j];
    }
    if (sum <= 0.0) sum = std::numeric_limits<double>::min();
    double weighted = 0.0;
    for (std::size_t j = 0; j < n; ++j) weighted += d[j] * row[j];
    const double entropy = std::log(sum) + beta * weighted / sum;
    for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
    const double diff = entropy - target_entropy;
    if (std::abs(diff) < 1e-5) break;
    if (diff > 0.0) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
    } else {
      hi = beta;
      beta = (beta + lo) / 2.0;
    }
  }
}

double gaussian(std::uint64_t& state) {
  // Box-Muller from two splitmix draws.
  state = splitmix64(state);
  const double u1 = (static_cast<double>(state >> 11) + 1.0) * 0x1.0p-53;
  state = splitmix64(state);
  const double u2 = static_cast<double>(state >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

ProjectionResult project(std::span<const std::string> paper_ids, const Matrix& vectors,
                         const ProjectionConfig& config) {
  config.validate();
  if (paper_ids.size() != vectors.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "ids and vectors differ in count");
  }
  if (paper_ids.size() < 5) {
    throw Error(ErrorCode::kInvalidArgument, "too few documents to project");
  }
  for (std::size_t r = 0; r < vectors.rows(); ++r) {
    double sum = 0.0;
    for (double x : vectors.row(r)) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw Error(ErrorCode::kInvalidArgument, "projection input is not a distribution");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw Error(ErrorCode::kInvalidArgument, "projection input is not a distribution");
    }
  }

  // Work in paper-id order so the output does not depend on row order.
  std::vector<std::size_t> order(paper_ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return paper_ids[a] < paper_ids[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (paper_ids[order[i]] == paper_ids[order[i - 1]]) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate paper id '" + paper_ids[order[i]] + "'");
    }
  }
  if (order.size() > config.max_points) {
    if (!config.sample_if_too_large) {
      throw Error(ErrorCode::kInvalidArgument,
                  "too many documents to project (" + std::to_string(order.size()) + " > " +
                      std::to_string(config.max_points) + ")");
    }
    Rng rng(config.seed);
    for (std::size_t i = 0; i < config.max_points; ++i) {
      const std::size_t j = i + rng.below(order.size() - i);
      std::swap(order[i], order[j]);
    }
    order.resize(config.max_points);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return paper_ids[a] < paper_ids[b]; });
  }

  const std::size_t n = order.size();
  const std::size_t dim = vectors.cols();
  std::vector<double> sq_dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = vectors.row(order[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = vectors.row(order[j]);
      double s = 0.0;
      for (std::size_t c = 0; c < dim; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
      sq_dist[i * n + j] = s;
      sq_dist[j * n + i] = s;
    }
  }

  const double perplexity = std::min(config.perplexity, static_cast<double>(n - 1) / 3.0);
  const double target_entropy = std::log(perplexity);
  std::vector<double> p(n * n, 0.0);
  {
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
      conditional_row(sq_dist, n, i, target_entropy, row);
      std::copy(row.begin(), row.end(), p.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::max((p[i * n + j] + p[j * n + i]) / (2.0 * n), kMinProbability);
      p[i * n + j] = v;
      p[j * n + i] = v;
    }
    p[i * n + i] = 0.0;
  }

  std::vector<double> y(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& id = paper_ids[order[i]];
    std::uint64_t state = config.seed ^ fnv1a64(id.data(), id.size());
    y[2 * i] = 1e-4 * gaussian(state);
    y[2 * i + 1] = 1e-4 * gaussian(state);
  }

  std::vector<double> update(n * 2, 0.0);
  std::vector<double> gains(n * 2, 1.0);
  std::vector<double> grad(n * 2);
  std::vector<double> num(n * n);
  ProjectionResult result;

  auto center = [&] {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += y[2 * i];
      my += y[2 * i + 1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[2 * i] -= mx;
      y[2 * i + 1] -= my;
    }
  };

  for (std::size_t it = 0; it < config.iterations; ++it) {
    const bool exaggerate = it < config.exaggeration_iterations;
    const double exaggeration = exaggerate ? config.early_exaggeration : 1.0;
    const double momentum = it < 250 ? 0.5 : 0.8;

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num[i * n + i] = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y[2 * i] - y[2 * j];
        const double dy = y[2 * i + 1] - y[2 * j + 1];
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * n + j] = q;
        num[j * n + i] = q;
        z += 2.0 * q;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double gx = 0.0, gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double q = num[i * n + j];
        const double mult = (exaggeration * p[i * n + j] - q / z) * q;
        gx += mult * (y[2 * i] - y[2 * j]);
        gy += mult * (y[2 * i + 1] - y[2 * j + 1]);
      }
      grad[2 * i] = 4.0 * gx;
      grad[2 * i + 1] = 4.0 * gy;
    }
    for (std::size_t c = 0; c < 2 * n; ++c) {
      const bool same_sign = (grad[c] > 0.0) == (update[c] > 0.0);
      gains[c] = same_sign ? std::max(gains[c] * 0.8, 0.01) : gains[c] + 0.2;
      update[c] = momentum * update[c] - config.learning_rate * gains[c] * grad[c];
      y[c] += update[c];
    }
    center();

    const bool last = it + 1 == config.iterations;
    if ((it + 1) % 50 == 0 || last) {
      // KL(P || Q) on the un-exaggerated P, at the positions after this step.
      double zq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double dx = y[2 * i] - y[2 * j];
          const double dy = y[2 * i + 1] - y[2 * j + 1];
          zq += 2.0 / (1.0 + dx * dx + dy * dy);
        }
      }
      double kl = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          const double dx = y[2 * i] - y[2 * j];
          const double dy = y[2 * i + 1] - y[2 * j + 1];
          const double q = std::max(1.0 / (1.0 + dx * dx + dy * dy) / zq, kMinProbability);
          kl += p[i * n + j] * std::log(p[i * n + j] / q);
        }
      }
      result.kl_trace.emplace_back(it + 1, kl);
    }
  }
  center();

  // Back to input order (sampled runs keep id order).
  std::vector<std::size_t> position(paper_ids.size(), n);
  for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;
  result.points.reserve(n);
  for (std::size_t r = 0; r < paper_ids.size(); ++r) {
    const std::size_t i = position[r];
    if (i == n) continue;
    ProjectedPoint point;
    point.paper_id = paper_ids[r];
    point.x = y[2 * i];
    point.y = y[2 * i + 1];
    point.dominant_topic = argmax(vectors.row(r));
    result.points.push_back(std::move(point));
  }
  return result;
}

}  // namespace aspectscope

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "lcbal/dataset.hpp"
#include "lcbal/hypothesis.hpp"
#include "lcbal/loss.hpp"
#include "lcbal/rng.hpp"

namespace lcbal {

// Per-round sampling distribution over the pool. Entries sum to 1 and each
// sits at or above the p_min floor it was built with.
struct QueryDistribution {
  std::vector<double> probabilities;
  std::size_t size() const { return probabilities.size(); }
};

namespace detail {

inline void require_feasible_floor(std::size_t n, double p_min) {
  if (n == 0) throw std::invalid_argument("empty pool");
  if (p_min < 0.0) throw std::invalid_argument("p_min must be >= 0");
  // n * p_min == 1 is allowed and pins the distribution at exactly uniform
  if (static_cast<double>(n) * p_min > 1.0)
    throw std::invalid_argument("infeasible floor: n * p_min > 1");
}

inline QueryDistribution floor_and_normalize(std::vector<double> weights, double p_min) {
  const std::size_t n = weights.size();
  double sum = 0.0;
  for (double w : weights) sum += w;
  QueryDistribution dist;
  dist.probabilities.resize(n);
  if (sum <= 1e-15) {
    for (auto& p : dist.probabilities) p = 1.0 / static_cast<double>(n);
    return dist;
  }
  const double slack = 1.0 - static_cast<double>(n) * p_min;
  for (std::size_t i = 0; i < n; ++i)
    dist.probabilities[i] = p_min + slack * weights[i] / sum;
  return dist;
}

}  // namespace detail

// Variance-minimizing query weights: the loss at the stored label for a
// queried point, and at the pseudo-label sgn(h(x)) otherwise (so the weight
// of an unqueried point is L(|h(x)|)). Floored at p_min and normalized;
// falls back to uniform when the loss mass vanishes.
inline QueryDistribution query_distribution(const PoolView& pool, const Hypothesis& h,
                                            const std::map<std::size_t, int>& known_labels,
                                            double p_min, const MarginLoss& loss) {
  const std::size_t n = pool.size();
  detail::require_feasible_floor(n, p_min);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = h.predict(pool.point(i));
    const auto it = known_labels.find(i);
    const int ybar = it != known_labels.end() ? it->second : sign_label(pred);
    weights[i] = loss.value(ybar * pred);
  }
  return detail::floor_and_normalize(std::move(weights), p_min);
}

// Prediction-entropy weights: e_i = H(sigma(h(x_i))), floored and
// normalized the same way.
inline QueryDistribution upal_distribution(const PoolView& pool, const Hypothesis& h,
                                           double p_min) {
  const std::size_t n = pool.size();
  detail::require_feasible_floor(n, p_min);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = h.predict(pool.point(i));
    const double q = pred >= 0.0 ? 1.0 / (1.0 + std::exp(-pred))
                                 : std::exp(pred) / (1.0 + std::exp(pred));
    double e = 0.0;  // 0 log 0 := 0
    if (q > 0.0 && q < 1.0) e = -q * std::log(q) - (1.0 - q) * std::log(1.0 - q);
    weights[i] = e;
  }
  return detail::floor_and_normalize(std::move(weights), p_min);
}

// Inverse-CDF draw; index i comes out with probability p_i and the
// generator advances deterministically.
inline std::size_t draw_index(const QueryDistribution& dist, Rng& rng) {
  if (dist.size() == 0) throw std::invalid_argument("empty distribution");
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    cum += dist.probabilities[i];
    if (u < cum) return i;
  }
  return dist.size() - 1;
}

}  // namespace lcbal

#pragma once

// Test-only generators and brute-force oracles. Everything here computes
// expectations the slow, obviously-correct way, independently of the
// library's own code paths.

#include <cmath>
#include <cstddef>
#include <vector>

#include "lcbal/dataset.hpp"
#include "lcbal/estimator.hpp"
#include "lcbal/hypothesis.hpp"
#include "lcbal/loss.hpp"
#include "lcbal/rng.hpp"

namespace testsup {

inline lcbal::Matrix random_features(lcbal::Rng& rng, std::size_t n, std::size_t d) {
  lcbal::Matrix m(n, d);
  for (auto& v : m.data) v = 2.0 * rng.uniform() - 1.0;
  return m;
}

inline std::vector<int> random_labels(lcbal::Rng& rng, std::size_t n) {
  std::vector<int> y(n);
  for (auto& v : y) v = rng.uniform() < 0.5 ? -1 : +1;
  return y;
}

// probabilities >= floor, summing to exactly 1
inline std::vector<double> random_prob_vector(lcbal::Rng& rng, std::size_t n,
                                              double floor) {
  std::vector<double> p(n);
  double sum = 0.0;
  for (auto& v : p) {
    v = 0.05 + rng.uniform();
    sum += v;
  }
  const double slack = 1.0 - static_cast<double>(n) * floor;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    p[i] = floor + slack * p[i] / sum;
    total += p[i];
  }
  p[n - 1] = 1.0 - total;
  return p;
}

inline lcbal::Hypothesis random_in_ball(lcbal::Rng& rng, std::size_t d, double radius) {
  lcbal::Hypothesis h(d);
  double norm2 = 0.0;
  for (auto& w : h.weights) {
    w = 2.0 * rng.uniform() - 1.0;
    norm2 += w * w;
  }
  const double scale = radius * rng.uniform() / std::max(1e-12, std::sqrt(norm2));
  for (auto& w : h.weights) w *= scale;
  return h;
}

inline double pool_mean_loss(const lcbal::Matrix& features, const std::vector<int>& labels,
                             const lcbal::Hypothesis& h, const lcbal::MarginLoss& loss) {
  double sum = 0.0;
  for (std::size_t i = 0; i < features.rows; ++i)
    sum += loss.value(labels[i] * h.predict(features.row(i)));
  return sum / static_cast<double>(features.rows);
}

// Exact expectation of the importance-weighted risk over every one of the
// n^t outcome paths, for fixed per-round probability vectors.
inline double enumerate_expected_risk(const lcbal::Matrix& features,
                                      const std::vector<int>& labels,
                                      const lcbal::Hypothesis& h,
                                      const lcbal::MarginLoss& loss,
                                      const std::vector<std::vector<double>>& round_probs) {
  const std::size_t n = features.rows;
  const std::size_t t = round_probs.size();
  double floor = 1.0;
  for (const auto& p : round_probs)
    for (double v : p) floor = std::min(floor, v);

  std::vector<std::size_t> path(t, 0);
  double expectation = 0.0;
  while (true) {
    lcbal::PoolView pool(features);
    lcbal::QueryLog log(pool, floor);
    double prob = 1.0;
    for (std::size_t tau = 0; tau < t; ++tau) {
      const std::size_t i = path[tau];
      prob *= round_probs[tau][i];
      log.append(i, round_probs[tau][i], labels[i]);
    }
    expectation += prob * lcbal::importance_weighted_risk(log, h, loss, n);

    std::size_t pos = 0;  // odometer over [n]^t
    while (pos < t && ++path[pos] == n) path[pos++] = 0;
    if (pos == t) break;
  }
  return expectation;
}

}  // namespace testsup

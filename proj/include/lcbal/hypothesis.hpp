#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace lcbal {

// Linear hypothesis h(x) = <weights, x>. Solvers running a barrier
// objective keep ||weights|| strictly inside the configured radius.
struct Hypothesis {
  std::vector<double> weights;

  Hypothesis() = default;
  explicit Hypothesis(std::size_t dims) : weights(dims, 0.0) {}
  explicit Hypothesis(std::vector<double> w) : weights(std::move(w)) {}

  std::size_t dims() const { return weights.size(); }

  double predict(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * x[j];
    return s;
  }

  double squared_norm() const {
    double s = 0.0;
    for (double w : weights) s += w * w;
    return s;
  }

  double norm() const { return std::sqrt(squared_norm()); }
};

// Prediction-to-label rule used throughout: sgn(0) := +1.
inline int sign_label(double value) { return value >= 0.0 ? +1 : -1; }

}  // namespace lcbal

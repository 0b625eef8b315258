#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lcbal/dataset.hpp"
#include "lcbal/hypothesis.hpp"

namespace lcbal {

// Fraction of test points with sgn(h(x)) != y.
inline double evaluate_error(const Hypothesis& h, const Dataset& test) {
  if (test.size() == 0) throw std::invalid_argument("empty test set");
  std::size_t mistakes = 0;
  for (std::size_t i = 0; i < test.size(); ++i)
    if (sign_label(h.predict(test.features.row(i))) != test.labels[i]) ++mistakes;
  return static_cast<double>(mistakes) / static_cast<double>(test.size());
}

struct CurvePoint {
  std::size_t unique_queries;
  double test_error;
};

// Cumulative error rate: the error curve summed over unique queries with
// unit spacing. Not an ROC area.
inline double auc(const std::vector<CurvePoint>& curve) {
  if (curve.empty()) throw std::invalid_argument("empty error curve");
  double sum = 0.0;
  for (const auto& p : curve) sum += p.test_error;
  return sum;
}

}  // namespace lcbal

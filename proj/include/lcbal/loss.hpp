#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace lcbal {

enum class LossKind { logistic, squared, exponential };

inline LossKind parse_loss_kind(const std::string& name) {
  if (name == "logistic") return LossKind::logistic;
  if (name == "squared") return LossKind::squared;
  if (name == "exponential") return LossKind::exponential;
  throw std::invalid_argument("unknown loss kind: \"" + name +
                              "\" (expected logistic|squared|exponential)");
}

inline const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::logistic: return "logistic";
    case LossKind::squared: return "squared";
    case LossKind::exponential: return "exponential";
  }
  return "?";
}

// Convex loss of the margin m = y * h(x), with its exact derivative and a
// finite upper bound over the feasible margin range.
struct MarginLoss {
  LossKind kind = LossKind::logistic;

  double value(double margin) const {
    switch (kind) {
      case LossKind::logistic:
        // ln(1 + e^-m), rearranged so the exponent never overflows
        return margin >= 0.0 ? std::log1p(std::exp(-margin))
                             : -margin + std::log1p(std::exp(margin));
      case LossKind::squared: {
        const double r = 1.0 - margin;
        return r * r;
      }
      case LossKind::exponential:
        return std::exp(-margin);
    }
    return 0.0;
  }

  double derivative(double margin) const {
    switch (kind) {
      case LossKind::logistic: {
        // -sigma(-m)
        if (margin >= 0.0) {
          const double e = std::exp(-margin);
          return -e / (1.0 + e);
        }
        return -1.0 / (1.0 + std::exp(margin));
      }
      case LossKind::squared:
        return -2.0 * (1.0 - margin);
      case LossKind::exponential:
        return -std::exp(-margin);
    }
    return 0.0;
  }

  // Largest loss value reachable with ||h|| <= radius and x in [-1,1]^dims.
  // Margins then satisfy |m| <= radius * sqrt(dims), and for all three
  // kinds the maximum over that interval sits at the most negative margin.
  double max_on_ball(double radius, std::size_t dims) const {
    if (radius < 0.0) throw std::invalid_argument("negative radius");
    if (dims < 1) throw std::invalid_argument("dims must be >= 1");
    return value(-radius * std::sqrt(static_cast<double>(dims)));
  }
};

}  // namespace lcbal

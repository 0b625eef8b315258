#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcbal/dataset.hpp"
#include "lcbal/hypothesis.hpp"
#include "lcbal/loss.hpp"

namespace lcbal {

// One sampled round: which pool point, the probability it was drawn with,
// and the label in force for it.
struct QueryRecord {
  std::size_t round;        // 1-based
  std::size_t point_index;  // 0-based into the pool
  double probability;
  int label;  // -1 or +1
};

// Ordered sampling history plus the set of uniquely queried points. A
// re-queried point gets a fresh record per round but keeps the label it was
// first answered with; the unique set counts it once.
class QueryLog {
 public:
  QueryLog(PoolView pool, double p_min) : pool_(pool), p_min_(p_min) {
    if (!(p_min > 0.0) || p_min > 1.0)
      throw std::invalid_argument("p_min must be in (0, 1]");
  }

  void append(std::size_t point_index, double probability, int label) {
    if (point_index >= pool_.size())
      throw std::invalid_argument("point index out of range");
    if (!(probability > 0.0) || probability > 1.0 + 1e-12)
      throw std::invalid_argument("probability must be in (0, 1]");
    if (probability < p_min_ - 1e-12)
      throw std::invalid_argument("probability below the p_min floor");
    if (label != -1 && label != +1)
      throw std::invalid_argument("label must be -1 or +1");
    auto it = queried_.find(point_index);
    if (it != queried_.end() && it->second != label)
      throw std::invalid_argument("re-query label disagrees with stored label for point " +
                                  std::to_string(point_index));
    records_.push_back({records_.size() + 1, point_index, probability, label});
    queried_.emplace(point_index, label);
  }

  const std::vector<QueryRecord>& records() const { return records_; }
  const std::map<std::size_t, int>& queried() const { return queried_; }
  std::size_t rounds() const { return records_.size(); }
  double p_min() const { return p_min_; }
  PoolView pool() const { return pool_; }

  bool has_label(std::size_t point_index) const {
    return queried_.count(point_index) > 0;
  }
  int label_of(std::size_t point_index) const { return queried_.at(point_index); }

 private:
  PoolView pool_;
  double p_min_;
  std::vector<QueryRecord> records_;
  std::map<std::size_t, int> queried_;
};

// Knobs of the confidence-bound formulas and their schedules:
//   C_t      = ct_scale * sqrt(log t)
//   lambda_t = lambda_scale * n * t / cbrt(sum over rounds 1..t-1 of 1/p)
// with the empty sum at t=1 clamped to 1, so lambda_1 = lambda_scale * n.
//
// The formulas evaluate for any delta in (0,1); the high-probability
// guarantee behind lcb/risk_lower_bound additionally needs delta < 1/e.
struct BoundConfig {
  double delta = 0.01;
  double radius = 10.0;
  double ct_scale = 0.1;
  double lambda_scale = 100.0;
};

namespace detail {

inline void require_delta(const BoundConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw std::invalid_argument("delta must be in (0, 1)");
}

inline void require_nonempty(const QueryLog& log) {
  if (log.rounds() == 0) throw std::invalid_argument("empty query log");
}

}  // namespace detail

// Unbiased importance-weighted estimate of the pool risk:
// (1/(n t)) * sum over records of L(y h(x)) / p.
inline double importance_weighted_risk(const QueryLog& log, const Hypothesis& h,
                                       const MarginLoss& loss, std::size_t n) {
  detail::require_nonempty(log);
  double sum = 0.0;
  for (const auto& r : log.records()) {
    const double m = r.label * h.predict(log.pool().point(r.point_index));
    sum += loss.value(m) / r.probability;
  }
  return sum / (static_cast<double>(n) * static_cast<double>(log.rounds()));
}

inline std::vector<double> importance_weighted_risk_gradient(
    const QueryLog& log, const Hypothesis& h, const MarginLoss& loss, std::size_t n) {
  detail::require_nonempty(log);
  std::vector<double> g(h.dims(), 0.0);
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(log.rounds()));
  for (const auto& r : log.records()) {
    const auto x = log.pool().point(r.point_index);
    const double m = r.label * h.predict(x);
    const double c = scale * loss.derivative(m) * r.label / r.probability;
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += c * x[j];
  }
  return g;
}

// h-dependent part of the variance estimate:
// [ sum over records of L^2/p^2  -  (sum over unique queried points of L)^2 ]+
// The first sum carries re-query multiplicity, the second does not.
inline double variance_statistic(const QueryLog& log, const Hypothesis& h,
                                 const MarginLoss& loss) {
  detail::require_nonempty(log);
  double weighted = 0.0;
  for (const auto& r : log.records()) {
    const double l = loss.value(r.label * h.predict(log.pool().point(r.point_index)));
    weighted += l * l / (r.probability * r.probability);
  }
  double unique = 0.0;
  for (const auto& [i, y] : log.queried())
    unique += loss.value(y * h.predict(log.pool().point(i)));
  return std::max(0.0, weighted - unique * unique);
}

// variance_statistic plus the martingale correction
// L_max^2 * sqrt(2 t log(1/delta) (n-1)) / sqrt(p_min), truncated at zero.
inline double variance_bound(const QueryLog& log, const Hypothesis& h,
                             const MarginLoss& loss, const BoundConfig& cfg,
                             std::size_t n, std::size_t d) {
  detail::require_delta(cfg);
  const double lmax = loss.max_on_ball(cfg.radius, d);
  const double t = static_cast<double>(log.rounds());
  double correction = 0.0;
  if (n > 1) {
    correction = lmax * lmax *
                 std::sqrt(2.0 * t * std::log(1.0 / cfg.delta) * static_cast<double>(n - 1)) /
                 std::sqrt(log.p_min());
  }
  return std::max(0.0, variance_statistic(log, h, loss) + correction);
}

// Lower confidence bound used for analysis:
// L_hat - (4/(n t)) * sqrt(log(1/delta) * variance_bound).
// The concentration argument behind it needs t >= 4; smaller t is accepted
// and simply yields a heuristic value.
inline double lcb(const QueryLog& log, const Hypothesis& h, const MarginLoss& loss,
                  const BoundConfig& cfg, std::size_t n, std::size_t d) {
  const double vb = variance_bound(log, h, loss, cfg, n, d);
  const double t = static_cast<double>(log.rounds());
  return importance_weighted_risk(log, h, loss, n) -
         (4.0 / (static_cast<double>(n) * t)) * std::sqrt(std::log(1.0 / cfg.delta) * vb);
}

// Full high-probability lower bound on the pool risk, constant terms
// included and truncated at zero. This is the form whose coverage the
// bound-validity tests exercise; the learner itself optimizes the
// barrier-regularized objective below.
inline double risk_lower_bound(const QueryLog& log, const Hypothesis& h,
                               const MarginLoss& loss, const BoundConfig& cfg,
                               std::size_t n, std::size_t d) {
  detail::require_delta(cfg);
  const double lmax = loss.max_on_ball(cfg.radius, d);
  const double t = static_cast<double>(log.rounds());
  const double nn = static_cast<double>(n);
  const double ld = std::log(1.0 / cfg.delta);
  const double vb = variance_bound(log, h, loss, cfg, n, d);
  const double value = importance_weighted_risk(log, h, loss, n) -
                       (2.0 / t) * ld * lmax * (1.0 + 1.0 / (nn * log.p_min())) -
                       (4.0 / (nn * t)) * std::sqrt(vb * ld) -
                       std::sqrt(lmax * lmax * ld / (2.0 * nn));
  return std::max(0.0, value);
}

inline double ct_schedule(std::size_t t, const BoundConfig& cfg) {
  return cfg.ct_scale * std::sqrt(std::log(static_cast<double>(t)));
}

inline double lambda_schedule(const QueryLog& log, std::size_t n, const BoundConfig& cfg) {
  detail::require_nonempty(log);
  const std::size_t t = log.rounds();
  double sum = 0.0;
  for (const auto& r : log.records())
    if (r.round <= t - 1) sum += 1.0 / r.probability;
  return cfg.lambda_scale * static_cast<double>(n) * static_cast<double>(t) /
         std::cbrt(std::max(sum, 1.0));
}

namespace detail {

inline double barrier_gap(const Hypothesis& h, double radius) {
  const double gap = radius * radius - h.squared_norm();
  if (!(gap > 0.0))
    throw std::domain_error("hypothesis outside the open ball ||h|| < R");
  return gap;
}

}  // namespace detail

namespace detail {

// Shared evaluation of L_hat - s * C_t * sqrt(V') - s * lambda_t * log(gap)
// for a term scale s on the uncertainty and barrier parts.
inline double lcb_expression_value(const QueryLog& log, const Hypothesis& h,
                             const MarginLoss& loss, const BoundConfig& cfg,
                             std::size_t n, double term_scale) {
  require_nonempty(log);
  const double gap = barrier_gap(h, cfg.radius);
  return importance_weighted_risk(log, h, loss, n) -
         term_scale * ct_schedule(log.rounds(), cfg) *
             std::sqrt(variance_statistic(log, h, loss)) -
         term_scale * lambda_schedule(log, n, cfg) * std::log(gap);
}

inline std::vector<double> lcb_expression_gradient(const QueryLog& log, const Hypothesis& h,
                                         const MarginLoss& loss, const BoundConfig& cfg,
                                         std::size_t n, double term_scale,
                                         double variance_epsilon) {
  require_nonempty(log);
  const double gap = barrier_gap(h, cfg.radius);
  const std::size_t d = h.dims();

  std::vector<double> grad = importance_weighted_risk_gradient(log, h, loss, n);

  // d/dh of the untruncated variance statistic
  double weighted = 0.0;
  std::vector<double> grad_weighted(d, 0.0);
  for (const auto& r : log.records()) {
    const auto x = log.pool().point(r.point_index);
    const double m = r.label * h.predict(x);
    const double l = loss.value(m);
    const double inv_p2 = 1.0 / (r.probability * r.probability);
    weighted += l * l * inv_p2;
    const double c = 2.0 * l * loss.derivative(m) * r.label * inv_p2;
    for (std::size_t j = 0; j < d; ++j) grad_weighted[j] += c * x[j];
  }
  double unique = 0.0;
  std::vector<double> grad_unique(d, 0.0);
  for (const auto& [i, y] : log.queried()) {
    const auto x = log.pool().point(i);
    const double m = y * h.predict(x);
    unique += loss.value(m);
    const double c = loss.derivative(m) * y;
    for (std::size_t j = 0; j < d; ++j) grad_unique[j] += c * x[j];
  }
  const double v = std::max(0.0, weighted - unique * unique);
  if (v > variance_epsilon) {
    const double ct = term_scale * ct_schedule(log.rounds(), cfg);
    const double scale = ct / (2.0 * std::sqrt(v));
    for (std::size_t j = 0; j < d; ++j)
      grad[j] -= scale * (grad_weighted[j] - 2.0 * unique * grad_unique[j]);
  }

  const double barrier = 2.0 * term_scale * lambda_schedule(log, n, cfg) / gap;
  for (std::size_t j = 0; j < d; ++j) grad[j] += barrier * h.weights[j];
  return grad;
}

}  // namespace detail

// Barrier-regularized lower-confidence expression:
// L_hat(h) - C_t * sqrt(variance_statistic) - lambda_t * log(R^2 - ||h||^2).
// Defined on the open ball only; blows up at the boundary.
inline double lcb_prime_objective(const QueryLog& log, const Hypothesis& h,
                                  const MarginLoss& loss, const BoundConfig& cfg,
                                  std::size_t n) {
  return detail::lcb_expression_value(log, h, loss, cfg, n, 1.0);
}

// Exact gradient of lcb_prime_objective. At the truncation kink of the
// variance statistic (V' <= eps) the middle term's subgradient is taken as
// the zero vector, matching the flat truncated branch.
inline std::vector<double> lcb_prime_gradient(const QueryLog& log, const Hypothesis& h,
                                              const MarginLoss& loss,
                                              const BoundConfig& cfg, std::size_t n,
                                              double variance_epsilon = 1e-12) {
  return detail::lcb_expression_gradient(log, h, loss, cfg, n, 1.0, variance_epsilon);
}

// The target of the learner's per-round solve. Same expression, with the
// uncertainty and barrier terms carried at the 1/(n t) scale the risk
// bound puts on its variance term. At scale 1 the exploration bonus
// exceeds the risk term by a factor of order n * sqrt(t), and the argmin
// degenerates to the variance maximizer; this form keeps the three terms
// commensurate, and the n t inside lambda_t then cancels into an annealed
// barrier weight.
inline double lcb_al_round_objective(const QueryLog& log, const Hypothesis& h,
                                     const MarginLoss& loss, const BoundConfig& cfg,
                                     std::size_t n) {
  detail::require_nonempty(log);
  const double scale =
      1.0 / (static_cast<double>(n) * static_cast<double>(log.rounds()));
  return detail::lcb_expression_value(log, h, loss, cfg, n, scale);
}

inline std::vector<double> lcb_al_round_gradient(const QueryLog& log, const Hypothesis& h,
                                                 const MarginLoss& loss,
                                                 const BoundConfig& cfg, std::size_t n,
                                                 double variance_epsilon = 1e-12) {
  detail::require_nonempty(log);
  const double scale =
      1.0 / (static_cast<double>(n) * static_cast<double>(log.rounds()));
  return detail::lcb_expression_gradient(log, h, loss, cfg, n, scale, variance_epsilon);
}

// Exact per-round variance of the centred importance-weighted increment,
// computed by enumerating the n possible draws. Test support for the
// closed form (1/n^2) sum L^2/p - (1/n^2) (sum L)^2.
inline double enumerate_round_variance(const Dataset& data, const Hypothesis& h,
                                       const std::vector<double>& p,
                                       const MarginLoss& loss) {
  const std::size_t n = data.size();
  if (p.size() != n) throw std::invalid_argument("probability vector size mismatch");
  double total = 0.0;
  for (double pi : p) {
    if (!(pi > 0.0)) throw std::invalid_argument("probabilities must be positive");
    total += pi;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("probabilities must sum to 1");

  std::vector<double> losses(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    losses[i] = loss.value(data.labels[i] * h.predict(data.features.row(i)));
    mean += losses[i];
  }
  mean /= static_cast<double>(n);

  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = losses[i] / (static_cast<double>(n) * p[i]) - mean;
    var += p[i] * m * m;
  }
  return var;
}

}  // namespace lcbal

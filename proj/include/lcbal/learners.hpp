#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lcbal/dataset.hpp"
#include "lcbal/estimator.hpp"
#include "lcbal/metrics.hpp"
#include "lcbal/optimizer.hpp"
#include "lcbal/sampler.hpp"

namespace lcbal {

// Raised when an interactive oracle's input stream closes mid-run.
struct OracleClosed : std::runtime_error {
  OracleClosed() : std::runtime_error("oracle input closed") {}
};

// Label source. Simulated mode answers from hidden ground-truth labels;
// interactive mode prompts a human. Either way an index always resolves to
// the same label, and only first-time queries count against the budget.
class Oracle {
 public:
  static Oracle simulated(std::vector<int> labels) {
    Oracle o;
    o.hidden_labels_ = std::move(labels);
    for (int y : o.hidden_labels_)
      if (y != -1 && y != +1)
        throw std::invalid_argument("oracle labels must be -1 or +1");
    return o;
  }

  static Oracle interactive(PoolView pool, std::istream& in = std::cin,
                            std::ostream& out = std::cout) {
    Oracle o;
    o.pool_ = pool;
    o.in_ = &in;
    o.out_ = &out;
    return o;
  }

  bool answered(std::size_t index) const { return cache_.count(index) > 0; }
  std::size_t query_count() const { return cache_.size(); }

  std::size_t size() const {
    return pool_ ? pool_->size() : hidden_labels_.size();
  }

  int query(std::size_t index) {
    if (auto it = cache_.find(index); it != cache_.end()) return it->second;
    int label;
    if (pool_) {
      label = prompt(index);
    } else {
      if (index >= hidden_labels_.size())
        throw std::invalid_argument("oracle index out of range");
      label = hidden_labels_[index];
    }
    cache_.emplace(index, label);
    return label;
  }

 private:
  Oracle() = default;

  int prompt(std::size_t index) {
    const auto x = pool_->point(index);
    while (true) {
      (*out_) << "query #" << (cache_.size() + 1) << " point " << index << ": [";
      for (std::size_t j = 0; j < x.size(); ++j) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", x[j]);
        (*out_) << (j ? ", " : "") << buf;
      }
      (*out_) << "] label? [+/-] " << std::flush;
      std::string token;
      if (!((*in_) >> token)) throw OracleClosed();
      if (token == "+" || token == "+1") return +1;
      if (token == "-" || token == "-1") return -1;
      (*out_) << "unrecognized input \"" << token << "\"; enter + or -\n";
    }
  }

  std::vector<int> hidden_labels_;
  std::optional<PoolView> pool_;
  std::istream* in_ = nullptr;
  std::ostream* out_ = nullptr;
  std::map<std::size_t, int> cache_;
};

struct LearnerConfig {
  std::size_t budget = 300;
  double p_min = 0.0;  // <= 0 selects the default floor 1/(10n)
  double radius = 10.0;
  double delta = 0.01;
  MarginLoss loss{};
  std::uint64_t seed = 1;
  std::size_t round_cap = 0;  // 0 selects 20 * budget
  double mu = 1e-2;           // ridge weight for upal / passive objectives
  std::size_t refit_every = 1;
  double tolerance = 1e-6;
  std::size_t max_iterations = 500;
};

struct TraceEntry {
  std::size_t round;
  std::size_t index;
  double probability;
  bool was_new;
};

struct RunResult {
  std::vector<CurvePoint> error_curve;  // one entry per unique-query count
  Hypothesis final_hypothesis;
  std::size_t rounds_used = 0;
  double auc = 0.0;
  std::vector<TraceEntry> query_trace;
  bool budget_exhausted = false;  // false when the round cap stopped the run
};

// Optional per-round hook; receives the hypothesis accepted in that round.
using RoundObserver = std::function<void(std::size_t round, const Hypothesis&)>;

namespace detail {

inline double effective_p_min(const LearnerConfig& cfg, std::size_t n) {
  return cfg.p_min > 0.0 ? cfg.p_min : 1.0 / (10.0 * static_cast<double>(n));
}

inline std::size_t effective_round_cap(const LearnerConfig& cfg) {
  const std::size_t cap = cfg.round_cap > 0 ? cfg.round_cap : 20 * cfg.budget;
  if (cap < cfg.budget)
    throw std::invalid_argument("round_cap must be at least the budget");
  return cap;
}

inline void validate_learner_inputs(const PoolView& pool, const Oracle& oracle,
                                    const Dataset& test, const LearnerConfig& cfg) {
  if (cfg.budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (oracle.size() != pool.size())
    throw std::invalid_argument("oracle does not cover the pool");
  if (test.size() == 0) throw std::invalid_argument("empty test set");
  if (test.dims() != pool.dims())
    throw std::invalid_argument("test dimensionality differs from the pool");
}

}  // namespace detail

// Active learner: per round, sample from the variance-minimizing
// distribution, query (or reuse) the drawn point's label, and refit by
// minimizing the barrier-regularized lower-confidence-bound objective,
// warm-started from the previous round. Unique queries are capped by the
// budget; total rounds by the round cap.
inline RunResult run_lcb_al(const PoolView& pool, Oracle& oracle, const Dataset& test,
                            const LearnerConfig& cfg, Rng& rng,
                            const RoundObserver& observer = {}) {
  detail::validate_learner_inputs(pool, oracle, test, cfg);
  const std::size_t n = pool.size();
  const double p_min = detail::effective_p_min(cfg, n);
  const std::size_t round_cap = detail::effective_round_cap(cfg);

  QueryLog log(pool, p_min);
  Hypothesis h(pool.dims());
  BoundConfig bound;
  bound.delta = cfg.delta;
  bound.radius = cfg.radius;

  RunResult result;
  std::size_t unique = 0;
  std::size_t round = 0;
  while (unique < cfg.budget && round < round_cap) {
    ++round;
    const QueryDistribution dist =
        query_distribution(pool, h, log.queried(), p_min, cfg.loss);
    const std::size_t idx = draw_index(dist, rng);
    const bool fresh = !log.has_label(idx);
    const int label = fresh ? oracle.query(idx) : log.label_of(idx);
    log.append(idx, dist.probabilities[idx], label);
    result.query_trace.push_back({round, idx, dist.probabilities[idx], fresh});
    if (fresh) ++unique;

    auto objective = [&](const std::vector<double>& w, std::vector<double>& grad) {
      const Hypothesis hh(w);
      grad = lcb_al_round_gradient(log, hh, cfg.loss, bound, n);
      return lcb_al_round_objective(log, hh, cfg.loss, bound, n);
    };
    SolveReport report;
    try {
      report = minimize_barrier_objective(objective, h, cfg.radius, cfg.tolerance,
                                          cfg.max_iterations);
    } catch (const std::exception& e) {
      throw std::runtime_error("lcb-al solve diverged at round " +
                               std::to_string(round) + ": " + e.what());
    }
    h = report.solution;
    if (observer) observer(round, h);
    if (fresh) result.error_curve.push_back({unique, evaluate_error(h, test)});
  }

  result.final_hypothesis = h;
  result.rounds_used = round;
  result.budget_exhausted = unique == cfg.budget;
  result.auc = auc(result.error_curve);
  return result;
}

// Entropy-driven baseline: samples from the prediction-entropy
// distribution and refits the plain importance-weighted risk plus a ridge
// term each round; no ball constraint.
inline RunResult run_upal(const PoolView& pool, Oracle& oracle, const Dataset& test,
                          const LearnerConfig& cfg, Rng& rng,
                          const RoundObserver& observer = {}) {
  detail::validate_learner_inputs(pool, oracle, test, cfg);
  const std::size_t n = pool.size();
  const double p_min = detail::effective_p_min(cfg, n);
  const std::size_t round_cap = detail::effective_round_cap(cfg);

  QueryLog log(pool, p_min);
  Hypothesis h(pool.dims());
  const double inf = std::numeric_limits<double>::infinity();

  RunResult result;
  std::size_t unique = 0;
  std::size_t round = 0;
  while (unique < cfg.budget && round < round_cap) {
    ++round;
    const QueryDistribution dist = upal_distribution(pool, h, p_min);
    const std::size_t idx = draw_index(dist, rng);
    const bool fresh = !log.has_label(idx);
    const int label = fresh ? oracle.query(idx) : log.label_of(idx);
    log.append(idx, dist.probabilities[idx], label);
    result.query_trace.push_back({round, idx, dist.probabilities[idx], fresh});
    if (fresh) ++unique;

    auto objective = [&](const std::vector<double>& w, std::vector<double>& grad) {
      const Hypothesis hh(w);
      grad = importance_weighted_risk_gradient(log, hh, cfg.loss, n);
      double sq = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        grad[j] += 2.0 * cfg.mu * w[j];
        sq += w[j] * w[j];
      }
      return importance_weighted_risk(log, hh, cfg.loss, n) + cfg.mu * sq;
    };
    SolveReport report;
    try {
      report = minimize_barrier_objective(objective, h, inf, cfg.tolerance,
                                          cfg.max_iterations);
    } catch (const std::exception& e) {
      throw std::runtime_error("upal solve diverged at round " +
                               std::to_string(round) + ": " + e.what());
    }
    h = report.solution;
    if (observer) observer(round, h);
    if (fresh) result.error_curve.push_back({unique, evaluate_error(h, test)});
  }

  result.final_hypothesis = h;
  result.rounds_used = round;
  result.budget_exhausted = unique == cfg.budget;
  result.auc = auc(result.error_curve);
  return result;
}

// Passive baseline: budget-many distinct points drawn uniformly without
// replacement, regularized logistic fit, error recorded after every label
// with a refit every `refit_every` labels.
inline RunResult run_passive(const PoolView& pool, Oracle& oracle, const Dataset& test,
                             const LearnerConfig& cfg, Rng& rng,
                             const RoundObserver& observer = {}) {
  detail::validate_learner_inputs(pool, oracle, test, cfg);
  const std::size_t n = pool.size();
  if (cfg.budget > n)
    throw std::invalid_argument("passive budget exceeds the pool size");
  const std::size_t refit_every = std::max<std::size_t>(1, cfg.refit_every);
  const MarginLoss logistic{LossKind::logistic};
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < cfg.budget; ++i)
    std::swap(order[i], order[i + rng.uniform_int(n - i)]);

  Hypothesis h(pool.dims());
  RunResult result;
  std::vector<std::size_t> seen;
  std::vector<int> labels;
  for (std::size_t j = 1; j <= cfg.budget; ++j) {
    const std::size_t idx = order[j - 1];
    seen.push_back(idx);
    labels.push_back(oracle.query(idx));
    // chance the uniform without-replacement draw picked this point
    result.query_trace.push_back(
        {j, idx, 1.0 / static_cast<double>(n - (j - 1)), true});

    if (j % refit_every == 0 || j == cfg.budget) {
      auto objective = [&](const std::vector<double>& w, std::vector<double>& grad) {
        const Hypothesis hh(w);
        grad.assign(w.size(), 0.0);
        double value = 0.0;
        for (std::size_t k = 0; k < seen.size(); ++k) {
          const auto x = pool.point(seen[k]);
          const double m = labels[k] * hh.predict(x);
          value += logistic.value(m);
          const double c = logistic.derivative(m) * labels[k];
          for (std::size_t q = 0; q < w.size(); ++q) grad[q] += c * x[q];
        }
        const double scale = 1.0 / static_cast<double>(seen.size());
        double sq = 0.0;
        for (std::size_t q = 0; q < w.size(); ++q) {
          grad[q] = grad[q] * scale + 2.0 * cfg.mu * w[q];
          sq += w[q] * w[q];
        }
        return value * scale + cfg.mu * sq;
      };
      SolveReport report;
      try {
        report = minimize_barrier_objective(objective, h, inf, cfg.tolerance,
                                            cfg.max_iterations);
      } catch (const std::exception& e) {
        throw std::runtime_error("passive solve diverged at label " +
                                 std::to_string(j) + ": " + e.what());
      }
      h = report.solution;
    }
    if (observer) observer(j, h);
    result.error_curve.push_back({j, evaluate_error(h, test)});
  }

  result.final_hypothesis = h;
  result.rounds_used = cfg.budget;
  result.budget_exhausted = true;
  result.auc = auc(result.error_curve);
  return result;
}

}  // namespace lcbal

#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lcbal/hypothesis.hpp"

namespace lcbal {

struct SolveReport {
  Hypothesis solution;
  std::size_t iterations = 0;
  double final_gradient_norm = 0.0;
  bool converged = false;  // gradient norm reached the tolerance
  std::vector<double> objective_values;  // start value, then each accepted iterate
};

namespace detail {

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Two-loop recursion over the stored (s, y) pairs; returns the
// quasi-Newton descent direction -H*g. Empty memory degrades to -g.
inline std::vector<double> lbfgs_direction(const std::vector<double>& g,
                                           const std::deque<std::vector<double>>& s_hist,
                                           const std::deque<std::vector<double>>& y_hist) {
  std::vector<double> q = g;
  const std::size_t m = s_hist.size();
  std::vector<double> alpha(m, 0.0), rho(m, 0.0);
  for (std::size_t k = m; k-- > 0;) {
    rho[k] = 1.0 / dot(y_hist[k], s_hist[k]);
    alpha[k] = rho[k] * dot(s_hist[k], q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alpha[k] * y_hist[k][j];
  }
  if (m > 0) {
    const double gamma = dot(s_hist[m - 1], y_hist[m - 1]) / dot(y_hist[m - 1], y_hist[m - 1]);
    for (auto& qi : q) qi *= gamma;
  }
  for (std::size_t k = 0; k < m; ++k) {
    const double beta = rho[k] * dot(y_hist[k], q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] += (alpha[k] - beta) * s_hist[k][j];
  }
  for (auto& qi : q) qi = -qi;
  return q;
}

}  // namespace detail

// Minimizes a smooth objective over the open ball ||h|| < radius (pass
// radius = +inf for an unconstrained solve). Limited-memory quasi-Newton
// directions with Armijo backtracking; a trial step is first shrunk until
// it lands strictly inside the ball, so the objective is never evaluated
// at an infeasible point. Stops when the gradient norm reaches the
// tolerance or the iteration cap.
//
// Objective must be callable as double(const std::vector<double>& h,
// std::vector<double>& grad) and fill grad on every call. A +inf value at
// a trial point rejects the step (barrier blow-up); NaN anywhere, or a
// non-finite value at the start, is an error.
template <typename Objective>
SolveReport minimize_barrier_objective(Objective&& objective, const Hypothesis& start,
                                       double radius, double tolerance = 1e-6,
                                       std::size_t max_iterations = 500) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  const bool bounded = std::isfinite(radius);
  if (bounded && !(start.norm() < radius))
    throw std::invalid_argument("infeasible start: ||h|| >= radius");

  constexpr double kArmijo = 1e-4;
  constexpr double kShrink = 0.5;
  constexpr std::size_t kMemory = 8;

  std::vector<double> x = start.weights;
  const std::size_t d = x.size();
  std::vector<double> g(d, 0.0);
  double f = objective(x, g);
  if (!std::isfinite(f))
    throw std::runtime_error("objective not finite at the start point");

  SolveReport report;
  report.objective_values.push_back(f);

  std::deque<std::vector<double>> s_hist, y_hist;
  std::vector<double> xt(d), gt(d);

  std::size_t iter = 0;
  for (; iter < max_iterations; ++iter) {
    const double gnorm = detail::norm2(g);
    if (gnorm <= tolerance) {
      report.converged = true;
      break;
    }

    std::vector<double> dir = detail::lbfgs_direction(g, s_hist, y_hist);
    double gd = detail::dot(g, dir);
    bool dir_ok = gd < 0.0;
    for (double v : dir)
      if (!std::isfinite(v)) dir_ok = false;
    if (!dir_ok) {
      for (std::size_t j = 0; j < d; ++j) dir[j] = -g[j];
      gd = -gnorm * gnorm;
    }

    double alpha = 1.0;
    if (bounded) {
      // feasibility first: shrink until the trial point is inside the ball
      while (alpha > 1e-30) {
        double nrm2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double v = x[j] + alpha * dir[j];
          nrm2 += v * v;
        }
        if (nrm2 < radius * radius) break;
        alpha *= kShrink;
      }
    }

    bool accepted = false;
    double ft = 0.0;
    while (alpha > 1e-30) {
      for (std::size_t j = 0; j < d; ++j) xt[j] = x[j] + alpha * dir[j];
      ft = objective(xt, gt);
      if (std::isnan(ft)) throw std::runtime_error("objective returned NaN");
      if (std::isfinite(ft) && ft <= f + kArmijo * alpha * gd) {
        accepted = true;
        break;
      }
      alpha *= kShrink;
    }
    if (!accepted) break;  // no acceptable step left; treat as stationary

    std::vector<double> s(d), y(d);
    for (std::size_t j = 0; j < d; ++j) {
      s[j] = xt[j] - x[j];
      y[j] = gt[j] - g[j];
    }
    const double sy = detail::dot(s, y);
    if (sy > 1e-10 * detail::norm2(s) * detail::norm2(y)) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      if (s_hist.size() > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    x = xt;
    g = gt;
    f = ft;
    report.objective_values.push_back(f);
  }

  report.solution = Hypothesis(std::move(x));
  report.iterations = iter;
  report.final_gradient_norm = detail::norm2(g);
  if (report.final_gradient_norm <= tolerance) report.converged = true;
  return report;
}

// Central finite differences of a value-only objective; the caller keeps
// point +/- step inside the objective's domain.
template <typename ValueFn>
std::vector<double> finite_difference_gradient(ValueFn&& value, const Hypothesis& point,
                                               double step = 1e-6) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  std::vector<double> x = point.weights;
  std::vector<double> g(x.size(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double saved = x[j];
    x[j] = saved + step;
    const double fp = value(x);
    x[j] = saved - step;
    const double fm = value(x);
    x[j] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::runtime_error("objective not finite during finite differencing");
    g[j] = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace lcbal

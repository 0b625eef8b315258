#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "lcbal/sampler.hpp"
#include "support.hpp"

using namespace lcbal;

TEST_CASE("equal losses collapse to uniform after flooring") {
  // h = 0: every margin is 0, logistic loss ln 2 everywhere
  Matrix features(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    features(i, 0) = 0.2 * static_cast<double>(i);
    features(i, 1) = -0.1;
  }
  const PoolView pool(features);
  const auto dist = query_distribution(pool, Hypothesis(2), {}, 0.05,
                                       MarginLoss{LossKind::logistic});
  for (double p : dist.probabilities) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("two-point arithmetic with known labels") {
  // squared-loss values 1 and 3 at the two points, p_min = 0.1
  Matrix features(2, 1);
  features(0, 0) = 0.0;                  // margin 0 -> loss 1
  features(1, 0) = 1.0 - std::sqrt(3.0); // loss 3
  const PoolView pool(features);
  const Hypothesis h(std::vector<double>{1.0});
  const std::map<std::size_t, int> known = {{0, +1}, {1, +1}};
  const auto dist =
      query_distribution(pool, h, known, 0.1, MarginLoss{LossKind::squared});
  CHECK(dist.probabilities[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(dist.probabilities[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("vanishing loss mass falls back to uniform") {
  // squared loss with every point at margin exactly 1
  Matrix features(3, 1);
  for (std::size_t i = 0; i < 3; ++i) features(i, 0) = 1.0;
  const PoolView pool(features);
  const Hypothesis h(std::vector<double>{1.0});
  const std::map<std::size_t, int> known = {{0, +1}, {1, +1}, {2, +1}};
  const auto dist =
      query_distribution(pool, h, known, 0.1, MarginLoss{LossKind::squared});
  for (double p : dist.probabilities)
    CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("unqueried points use the pseudo-label sgn(h(x))") {
  Matrix features(2, 1);
  features(0, 0) = 0.5;
  features(1, 0) = -0.5;
  const PoolView pool(features);
  const Hypothesis h(std::vector<double>{1.0});
  const MarginLoss loss{LossKind::logistic};
  const auto dist = query_distribution(pool, h, {}, 0.0, loss);
  // both see |margin| = 0.5, so the weights are equal
  CHECK(dist.probabilities[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dist.probabilities[1] == doctest::Approx(0.5).epsilon(1e-12));

  // flipping the known label of point 1 to disagree raises its weight
  const auto dist2 = query_distribution(pool, h, {{1, +1}}, 0.0, loss);
  CHECK(dist2.probabilities[1] > dist2.probabilities[0]);
}

TEST_CASE("distribution invariants hold for random inputs") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_int(20);
    const std::size_t d = 1 + rng.uniform_int(4);
    const Matrix features = testsup::random_features(rng, n, d);
    const PoolView pool(features);
    const Hypothesis h = testsup::random_in_ball(rng, d, 2.0);
    const double p_min = rng.uniform() / static_cast<double>(n);
    std::map<std::size_t, int> known;
    for (std::size_t i = 0; i < n; ++i)
      if (rng.uniform() < 0.3) known[i] = rng.uniform() < 0.5 ? -1 : +1;
    const MarginLoss loss{LossKind::logistic};

    for (const auto& dist : {query_distribution(pool, h, known, p_min, loss),
                             upal_distribution(pool, h, p_min)}) {
      double sum = 0.0;
      for (double p : dist.probabilities) {
        CHECK(p >= p_min - 1e-12);
        sum += p;
      }
      CHECK(std::fabs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("floor saturation: p_min = 1/n pins the distribution at uniform") {
  Matrix features(5, 1);
  for (std::size_t i = 0; i < 5; ++i) features(i, 0) = 0.4 * static_cast<double>(i) - 1.0;
  const PoolView pool(features);
  const Hypothesis h(std::vector<double>{3.0});  // wildly uneven losses
  const auto dist =
      query_distribution(pool, h, {}, 0.2, MarginLoss{LossKind::exponential});
  for (double p : dist.probabilities) CHECK(p == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("an infeasible floor is rejected") {
  Matrix features(4, 1);
  const PoolView pool(features);
  CHECK_THROWS_AS(
      (void)query_distribution(pool, Hypothesis(1), {}, 0.3, MarginLoss{}),
      std::invalid_argument);
  CHECK_THROWS_AS((void)upal_distribution(pool, Hypothesis(1), 0.3),
                  std::invalid_argument);
}

TEST_CASE("entropy distribution is uniform at h = 0") {
  Rng rng(3);
  const Matrix features = testsup::random_features(rng, 6, 2);
  const PoolView pool(features);
  const auto dist = upal_distribution(pool, Hypothesis(2), 0.05);
  for (double p : dist.probabilities)
    CHECK(p == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("extreme-margin points get almost no entropy mass") {
  Matrix features(3, 1);
  features(0, 0) = 1.0;   // |h(x)| = 50
  features(1, 0) = 0.002; // near the boundary
  features(2, 0) = -0.004;
  const PoolView pool(features);
  const Hypothesis h(std::vector<double>{50.0});
  const auto dist = upal_distribution(pool, h, 0.0);
  CHECK(dist.probabilities[0] <= 1e-12);
  CHECK(dist.probabilities[1] + dist.probabilities[2] ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entropy distribution matches a scalar re-evaluation") {
  Matrix features(3, 1);
  features(0, 0) = 0.1;
  features(1, 0) = -0.7;
  features(2, 0) = 0.4;
  const PoolView pool(features);
  const Hypothesis h(std::vector<double>{2.0});
  const double p_min = 0.05;
  const auto dist = upal_distribution(pool, h, p_min);

  double e[3], sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double q = 1.0 / (1.0 + std::exp(-2.0 * features(i, 0)));
    e[i] = -q * std::log(q) - (1.0 - q) * std::log(1.0 - q);
    sum += e[i];
  }
  for (int i = 0; i < 3; ++i)
    CHECK(dist.probabilities[i] ==
          doctest::Approx(p_min + (1.0 - 3.0 * p_min) * e[i] / sum).epsilon(1e-12));
}

TEST_CASE("draw_index: point mass and determinism") {
  QueryDistribution mass{{1.0, 0.0, 0.0}};
  Rng rng(5);
  for (int i = 0; i < 100; ++i) CHECK(draw_index(mass, rng) == 0);

  QueryDistribution dist{{0.2, 0.5, 0.3}};
  Rng a(9), b(9);
  for (int i = 0; i < 1000; ++i) CHECK(draw_index(dist, a) == draw_index(dist, b));
}

TEST_CASE("draw_index frequencies concentrate around the probabilities") {
  const QueryDistribution dist{{0.3, 0.7}};
  Rng rng(123);
  const int draws = 100000;
  int count0 = 0;
  for (int i = 0; i < draws; ++i)
    if (draw_index(dist, rng) == 0) ++count0;
  const double freq = static_cast<double>(count0) / draws;
  const double sigma = std::sqrt(0.3 * 0.7 / draws);
  CHECK(std::fabs(freq - 0.3) <= 3.0 * sigma);
}

TEST_CASE("loss-proportional weights minimize the labeled-pool variance objective") {
  // on a fully labeled pool the optimal unfloored weights are p_i ~ L_i;
  // checked against a dense simplex grid at n = 3
  Matrix features(3, 1);
  features(0, 0) = 0.0;
  features(1, 0) = 1.0 - std::sqrt(2.0);
  features(2, 0) = 1.0 - std::sqrt(3.0);
  const PoolView pool(features);
  const Hypothesis h(std::vector<double>{1.0});
  const MarginLoss loss{LossKind::squared};
  const std::map<std::size_t, int> known = {{0, +1}, {1, +1}, {2, +1}};

  double l[3];
  for (int i = 0; i < 3; ++i) l[i] = loss.value(h.predict(pool.point(i)));

  auto objective = [&](double p0, double p1, double p2) {
    return l[0] * l[0] / p0 + l[1] * l[1] / p1 + l[2] * l[2] / p2;
  };

  double best = 1e300, best0 = 0.0, best1 = 0.0;
  const int steps = 400;
  for (int i = 1; i < steps; ++i) {
    for (int j = 1; j < steps - i; ++j) {
      const double p0 = static_cast<double>(i) / steps;
      const double p1 = static_cast<double>(j) / steps;
      const double value = objective(p0, p1, 1.0 - p0 - p1);
      if (value < best) {
        best = value;
        best0 = p0;
        best1 = p1;
      }
    }
  }

  const auto dist = query_distribution(pool, h, known, 0.0, loss);
  const double grid_step = 1.0 / steps;
  CHECK(std::fabs(dist.probabilities[0] - best0) <= grid_step);
  CHECK(std::fabs(dist.probabilities[1] - best1) <= grid_step);
  // and the implied value is no worse than the grid optimum
  CHECK(objective(dist.probabilities[0], dist.probabilities[1], dist.probabilities[2]) <=
        best + 1e-9);
}

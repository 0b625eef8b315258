#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "lcbal/dataset.hpp"
#include "lcbal/learners.hpp"
#include "lcbal/metrics.hpp"
#include "lcbal/optimizer.hpp"

using namespace lcbal;

namespace {

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("load_csv remaps zero-one labels") {
  const std::string path = temp_file("lcbal_zero_one.csv");
  write_file(path, "a,b,label\n0.5,1.0,1\n0.25,2.0,0\n0.75,3.0,1\n");
  CsvOptions opts;
  opts.encoding = LabelEncoding::zero_one;
  const Dataset d = load_csv(path, opts);
  REQUIRE(d.size() == 3);
  CHECK(d.dims() == 2);
  CHECK(d.labels == std::vector<int>{+1, -1, +1});
}

TEST_CASE("load_csv rejects out-of-encoding labels, naming the row") {
  const std::string path = temp_file("lcbal_bad_label.csv");
  write_file(path, "a,label\n0.5,1\n0.25,2\n0.75,-1\n");
  try {
    (void)load_csv(path, {});
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
}

TEST_CASE("load_csv reports unparseable cells") {
  const std::string path = temp_file("lcbal_bad_cell.csv");
  write_file(path, "a,label\n0.5,1\nxyz,-1\n");
  CHECK_THROWS_AS((void)load_csv(path, {}), std::runtime_error);
}

TEST_CASE("load_csv needs at least two rows") {
  const std::string path = temp_file("lcbal_tiny.csv");
  write_file(path, "a,label\n0.5,1\n");
  CHECK_THROWS_AS((void)load_csv(path, {}), std::runtime_error);
}

TEST_CASE("headerless files use a column index") {
  const std::string path = temp_file("lcbal_noheader.csv");
  write_file(path, "0.5,1\n0.25,-1\n");
  CsvOptions opts;
  opts.has_header = false;
  opts.label_column = "1";
  const Dataset d = load_csv(path, opts);
  REQUIRE(d.size() == 2);
  CHECK(d.labels == std::vector<int>{+1, -1});
}

TEST_CASE("save then load round-trips bit-exact") {
  Dataset d;
  d.features = Matrix(4, 2);
  d.labels = {+1, -1, +1, -1};
  double vals[] = {0.1, 1.0 / 3.0, -2.5e-17, 7.25, std::nextafter(1.0, 2.0),
                   -0.0625, 3.141592653589793, 1e300};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) d.features(i, j) = vals[i * 2 + j];

  const std::string path = temp_file("lcbal_roundtrip.csv");
  save_csv(d, path);
  const Dataset back = load_csv(path, {});
  REQUIRE(back.size() == 4);
  REQUIRE(back.dims() == 2);
  CHECK(back.labels == d.labels);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(back.features(i, j) == d.features(i, j));  // exact
}

TEST_CASE("scaling maps a column onto [-1, 1] endpoints") {
  Dataset d;
  d.features = Matrix(3, 1);
  d.features(0, 0) = 0.0;
  d.features(1, 0) = 5.0;
  d.features(2, 0) = 10.0;
  d.labels = {+1, -1, +1};
  const Dataset s = scale_to_unit_box(d);
  CHECK(s.features(0, 0) == -1.0);
  CHECK(s.features(1, 0) == 0.0);
  CHECK(s.features(2, 0) == 1.0);
  CHECK(s.labels == d.labels);
}

TEST_CASE("constant columns scale to zero") {
  Dataset d;
  d.features = Matrix(3, 1);
  for (std::size_t i = 0; i < 3; ++i) d.features(i, 0) = 7.0;
  d.labels = {+1, -1, +1};
  const Dataset s = scale_to_unit_box(d);
  for (std::size_t i = 0; i < 3; ++i) CHECK(s.features(i, 0) == 0.0);
}

TEST_CASE("already-scaled extremes are unchanged") {
  Dataset d;
  d.features = Matrix(2, 1);
  d.features(0, 0) = -1.0;
  d.features(1, 0) = 1.0;
  d.labels = {-1, +1};
  const Dataset s = scale_to_unit_box(d);
  CHECK(s.features(0, 0) == -1.0);
  CHECK(s.features(1, 0) == 1.0);
}

TEST_CASE("scaling is idempotent and lands in the box") {
  const Dataset d = make_synthetic(SyntheticKind::noisy_margin, 60, 3, 0.1, 0.2, 5);
  Dataset stretched = d;
  for (std::size_t i = 0; i < d.size(); ++i) {
    stretched.features(i, 0) = 10.0 * d.features(i, 0) + 3.0;
    stretched.features(i, 1) = -2.0 * d.features(i, 1);
  }
  const Dataset once = scale_to_unit_box(stretched);
  for (double v : once.features.data) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  const Dataset twice = scale_to_unit_box(once);
  for (std::size_t k = 0; k < once.features.data.size(); ++k)
    CHECK(std::fabs(once.features.data[k] - twice.features.data[k]) <= 1e-12);
}

TEST_CASE("split sizes, disjointness, and determinism") {
  Dataset d;
  d.features = Matrix(10, 1);
  d.labels.assign(10, +1);
  for (std::size_t i = 0; i < 10; ++i) d.features(i, 0) = static_cast<double>(i);

  const auto [train, test] = split(d, 0.3, 99);
  CHECK(train.size() == 7);
  CHECK(test.size() == 3);

  std::set<double> seen;
  for (std::size_t i = 0; i < train.size(); ++i) seen.insert(train.features(i, 0));
  for (std::size_t i = 0; i < test.size(); ++i) {
    CHECK(seen.count(test.features(i, 0)) == 0);
    seen.insert(test.features(i, 0));
  }
  CHECK(seen.size() == 10);  // partition covers every row exactly once

  const auto [train2, test2] = split(d, 0.3, 99);
  CHECK(train2.features.data == train.features.data);
  CHECK(test2.features.data == test.features.data);
}

TEST_CASE("split rejects bad fractions and too-small partitions") {
  Dataset d;
  d.features = Matrix(4, 1);
  d.labels.assign(4, +1);
  CHECK_THROWS_AS((void)split(d, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)split(d, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)split(d, 0.9, 1), std::invalid_argument);  // train < 2
}

TEST_CASE("split preserves rows as a multiset") {
  const Dataset d = make_synthetic(SyntheticKind::separable, 41, 2, 0.05, 0.0, 12);
  const auto [train, test] = split(d, 0.4, 3);
  std::vector<std::pair<std::vector<double>, int>> all;
  auto add = [&](const Dataset& part) {
    for (std::size_t i = 0; i < part.size(); ++i) {
      const auto row = part.features.row(i);
      all.push_back({{row.begin(), row.end()}, part.labels[i]});
    }
  };
  add(train);
  add(test);
  std::vector<std::pair<std::vector<double>, int>> orig;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto row = d.features.row(i);
    orig.push_back({{row.begin(), row.end()}, d.labels[i]});
  }
  std::sort(all.begin(), all.end());
  std::sort(orig.begin(), orig.end());
  CHECK(all == orig);
}

TEST_CASE("separable synthetic data admits a zero-error linear fit") {
  const Dataset d = make_synthetic(SyntheticKind::separable, 200, 2, 0.2, 0.0, 21);
  for (double v : d.features.data) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  // solve the regularized logistic fit and check it separates
  const MarginLoss logistic{LossKind::logistic};
  auto objective = [&](const std::vector<double>& w, std::vector<double>& grad) {
    const Hypothesis h(w);
    grad.assign(w.size(), 0.0);
    double value = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto x = d.features.row(i);
      const double m = d.labels[i] * h.predict(x);
      value += logistic.value(m);
      const double c = logistic.derivative(m) * d.labels[i];
      for (std::size_t j = 0; j < w.size(); ++j) grad[j] += c * x[j];
    }
    const double scale = 1.0 / static_cast<double>(d.size());
    double sq = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      grad[j] = grad[j] * scale + 2e-6 * w[j];
      sq += w[j] * w[j];
    }
    return value * scale + 1e-6 * sq;
  };
  const SolveReport report = minimize_barrier_objective(
      objective, Hypothesis(2), std::numeric_limits<double>::infinity(), 1e-8, 2000);
  CHECK(evaluate_error(report.solution, d) == 0.0);
}

TEST_CASE("separable synthetic at d=2 has a zero-error direction on an angle grid") {
  const Dataset d = make_synthetic(SyntheticKind::separable, 150, 2, 0.2, 0.0, 33);
  double best = 1.0;
  for (int k = 0; k < 720; ++k) {
    const double theta = 2.0 * 3.14159265358979323846 * k / 720.0;
    const Hypothesis h(std::vector<double>{std::cos(theta), std::sin(theta)});
    best = std::min(best, evaluate_error(h, d));
  }
  CHECK(best == 0.0);
}

TEST_CASE("noisy-margin flip fraction tracks the requested probability") {
  const double flip = 0.45;
  const std::size_t n = 5000;
  const Dataset clean = make_synthetic(SyntheticKind::separable, n, 3, 0.1, 0.0, 8);
  const Dataset noisy = make_synthetic(SyntheticKind::noisy_margin, n, 3, 0.1, flip, 8);
  CHECK(clean.features.data == noisy.features.data);  // same seed, same points
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (clean.labels[i] != noisy.labels[i]) ++flipped;
  const double frac = static_cast<double>(flipped) / static_cast<double>(n);
  const double sigma = std::sqrt(flip * (1.0 - flip) / static_cast<double>(n));
  CHECK(std::fabs(frac - flip) <= 3.0 * sigma);
}

TEST_CASE("synthetic generation is deterministic in the seed") {
  const Dataset a = make_synthetic(SyntheticKind::noisy_margin, 50, 4, 0.15, 0.1, 77);
  const Dataset b = make_synthetic(SyntheticKind::noisy_margin, 50, 4, 0.15, 0.1, 77);
  CHECK(a.features.data == b.features.data);
  CHECK(a.labels == b.labels);
}

TEST_CASE("synthetic preconditions") {
  CHECK_THROWS_AS((void)make_synthetic(SyntheticKind::separable, 3, 2, 0.1, 0.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_synthetic(SyntheticKind::separable, 10, 2, 0.0, 0.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_synthetic(SyntheticKind::noisy_margin, 10, 2, 0.1, 0.5, 1),
                  std::invalid_argument);
}

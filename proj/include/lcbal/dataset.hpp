#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lcbal/hypothesis.hpp"
#include "lcbal/rng.hpp"

namespace lcbal {

// Dense row-major matrix; just enough for feature tables.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  std::span<double> row(std::size_t r) {
    return {data.data() + r * cols, cols};
  }
};

// Feature matrix plus hidden binary labels in {-1, +1}.
struct Dataset {
  Matrix features;
  std::vector<int> labels;

  std::size_t size() const { return features.rows; }
  std::size_t dims() const { return features.cols; }
};

// Label-free view of a dataset's feature side; what the learners see.
class PoolView {
 public:
  explicit PoolView(const Matrix& features) : features_(&features) {}

  std::size_t size() const { return features_->rows; }
  std::size_t dims() const { return features_->cols; }
  std::span<const double> point(std::size_t i) const { return features_->row(i); }

 private:
  const Matrix* features_;
};

enum class LabelEncoding { pm1, zero_one };

inline LabelEncoding parse_label_encoding(const std::string& name) {
  if (name == "pm1") return LabelEncoding::pm1;
  if (name == "zero-one" || name == "zero_one") return LabelEncoding::zero_one;
  throw std::invalid_argument("unknown label encoding: \"" + name +
                              "\" (expected pm1|zero-one)");
}

struct CsvOptions {
  bool has_header = true;
  // Column name when a header is present; otherwise (or as fallback) a
  // 0-based column index written as digits.
  std::string label_column = "label";
  LabelEncoding encoding = LabelEncoding::pm1;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  // allow surrounding spaces, nothing else
  while (end && *end == ' ') ++end;
  const char* p = begin;
  while (*p == ' ') ++p;
  if (end == p || (end && *end != '\0') || !std::isfinite(v)) {
    throw std::runtime_error("csv parse failure at row " + std::to_string(row) +
                             ", column " + std::to_string(col + 1) + ": \"" +
                             cell + "\"");
  }
  return v;
}

inline int decode_label(double v, LabelEncoding enc, std::size_t row) {
  if (enc == LabelEncoding::pm1) {
    if (v == 1.0) return +1;
    if (v == -1.0) return -1;
    throw std::runtime_error("label at row " + std::to_string(row) +
                             " is not in {-1,+1}: " + std::to_string(v));
  }
  if (v == 1.0) return +1;
  if (v == 0.0) return -1;
  throw std::runtime_error("label at row " + std::to_string(row) +
                           " is not in {0,1}: " + std::to_string(v));
}

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline Dataset load_csv(const std::string& path, const CsvOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
      lines.push_back(line);
  }
  if (lines.empty()) throw std::runtime_error("empty file: " + path);

  std::size_t first_data = 0;
  std::size_t label_col = std::string::npos;
  std::vector<std::string> header;
  if (opts.has_header) {
    header = detail::split_csv_line(lines[0]);
    first_data = 1;
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == opts.label_column) label_col = c;
  }
  if (label_col == std::string::npos) {
    // accept a plain 0-based index, with or without a header
    if (!opts.label_column.empty() &&
        opts.label_column.find_first_not_of("0123456789") == std::string::npos) {
      label_col = std::stoul(opts.label_column);
    } else {
      throw std::runtime_error("label column \"" + opts.label_column +
                               "\" not found in " + path);
    }
  }

  const std::size_t n = lines.size() - first_data;
  if (n < 2) throw std::runtime_error("need at least 2 data rows, got " +
                                      std::to_string(n));
  const std::size_t width = detail::split_csv_line(lines[first_data]).size();
  if (label_col >= width)
    throw std::runtime_error("label column index " + std::to_string(label_col) +
                             " out of range (row width " + std::to_string(width) + ")");

  Dataset out;
  out.features = Matrix(n, width - 1);
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t file_row = first_data + i + 1;  // 1-based, header included
    const auto cells = detail::split_csv_line(lines[first_data + i]);
    if (cells.size() != width)
      throw std::runtime_error("row " + std::to_string(file_row) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(width));
    std::size_t f = 0;
    for (std::size_t c = 0; c < width; ++c) {
      const double v = detail::parse_cell(cells[c], file_row, c);
      if (c == label_col)
        out.labels[i] = detail::decode_label(v, opts.encoding, file_row);
      else
        out.features(i, f++) = v;
    }
  }
  return out;
}

// Full-precision emission ("%.17g"); reloading reproduces values bit-exact.
inline void save_csv(const Dataset& d, const std::string& path,
                     bool header = true, const std::string& label_name = "label") {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  if (header) {
    for (std::size_t c = 0; c < d.dims(); ++c) out << 'f' << c << ',';
    out << label_name << '\n';
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t c = 0; c < d.dims(); ++c)
      out << detail::format_full(d.features(i, c)) << ',';
    out << d.labels[i] << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Per-feature affine map onto [-1, 1]; constant columns map to 0.
inline Dataset scale_to_unit_box(const Dataset& d) {
  Dataset out = d;
  for (std::size_t c = 0; c < d.dims(); ++c) {
    double lo = d.features(0, c), hi = lo;
    for (std::size_t i = 1; i < d.size(); ++i) {
      lo = std::min(lo, d.features(i, c));
      hi = std::max(hi, d.features(i, c));
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < d.size(); ++i) {
      out.features(i, c) =
          range > 0.0 ? 2.0 * (d.features(i, c) - lo) / range - 1.0 : 0.0;
    }
  }
  return out;
}

// Disjoint train/test partition by seeded uniform shuffle.
inline std::pair<Dataset, Dataset> split(const Dataset& d, double test_fraction,
                                         std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test_fraction must be in (0,1)");
  const std::size_t n = d.size();
  const std::size_t n_test =
      static_cast<std::size_t>(std::lround(static_cast<double>(n) * test_fraction));
  const std::size_t n_train = n - n_test;
  if (n_train < 2 || n_test < 1)
    throw std::invalid_argument("split too small: train=" + std::to_string(n_train) +
                                " test=" + std::to_string(n_test));

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(idx[i], idx[rng.uniform_int(i + 1)]);

  auto take = [&](std::size_t begin, std::size_t count) {
    Dataset part;
    part.features = Matrix(count, d.dims());
    part.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t src = idx[begin + i];
      std::copy(d.features.row(src).begin(), d.features.row(src).end(),
                part.features.row(i).begin());
      part.labels[i] = d.labels[src];
    }
    return part;
  };
  return {take(0, n_train), take(n_train, n_test)};
}

enum class SyntheticKind { separable, noisy_margin };

inline SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "separable") return SyntheticKind::separable;
  if (name == "noisy-margin" || name == "noisy_margin") return SyntheticKind::noisy_margin;
  throw std::invalid_argument("unknown synthetic kind: \"" + name +
                              "\" (expected separable|noisy-margin)");
}

// Points uniform in [-1,1]^d, labelled by a seeded unit direction; points
// closer than `margin` to the decision plane are resampled. noisy_margin
// then flips each label independently with probability flip_prob, in a
// second pass so an equal seed produces the same points for both kinds.
inline Dataset make_synthetic(SyntheticKind kind, std::size_t n, std::size_t d,
                              double margin, double flip_prob, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("synthetic pool needs n >= 4");
  if (d < 1) throw std::invalid_argument("synthetic pool needs d >= 1");
  if (!(margin > 0.0)) throw std::invalid_argument("margin must be > 0");
  if (!(flip_prob >= 0.0 && flip_prob < 0.5))
    throw std::invalid_argument("flip_prob must be in [0, 0.5)");

  Rng rng(seed);
  std::vector<double> w(d);
  double wn = 0.0;
  do {
    wn = 0.0;
    for (auto& wi : w) {
      wi = rng.gaussian();
      wn += wi * wi;
    }
  } while (wn == 0.0);
  wn = std::sqrt(wn);
  for (auto& wi : w) wi /= wn;

  Dataset out;
  out.features = Matrix(n, d);
  out.labels.resize(n);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    double proj = 0.0;
    do {
      proj = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        x[j] = 2.0 * rng.uniform() - 1.0;
        proj += w[j] * x[j];
      }
    } while (std::fabs(proj) < margin);
    std::copy(x.begin(), x.end(), out.features.row(i).begin());
    out.labels[i] = sign_label(proj);
  }

  if (kind == SyntheticKind::noisy_margin) {
    for (std::size_t i = 0; i < n; ++i)
      if (rng.uniform() < flip_prob) out.labels[i] = -out.labels[i];
  }
  return out;
}

}  // namespace lcbal

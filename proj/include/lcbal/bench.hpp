#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lcbal/dataset.hpp"
#include "lcbal/learners.hpp"
#include "lcbal/metrics.hpp"

namespace lcbal {

// A malformed or inconsistent experiment configuration; the CLI maps this
// to exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::separable;
  std::size_t n = 500;
  std::size_t d = 2;
  double margin = 0.2;
  double flip_prob = 0.0;
};

struct ExperimentConfig {
  // CSV path, or an inline synthetic spec of the form
  // "synth:kind=separable,n=500,d=2,margin=0.2,flip_prob=0".
  std::string dataset;
  std::string label_column = "label";
  bool csv_has_header = true;
  LabelEncoding label_encoding = LabelEncoding::pm1;
  double test_fraction = 0.3;
  std::vector<std::string> algorithms = {"lcb-al", "upal", "passive"};
  std::size_t repeats = 10;
  std::string oracle = "simulated";  // simulated | interactive
  std::string out_dir = "out";
  LearnerConfig learner;  // seed doubles as the base seed; run r uses seed + r
};

struct AlgorithmSummary {
  double final_error_mean = 0.0;
  double final_error_std = 0.0;
  double auc_mean = 0.0;
  double auc_std = 0.0;
  std::size_t runs = 0;
};

struct Summary {
  std::map<std::string, AlgorithmSummary> per_algorithm;
};

struct RunRecord {
  std::size_t run_id;
  std::string algorithm;
  RunResult result;
};

namespace detail {

inline bool is_synthetic_spec(const std::string& dataset) {
  return dataset.rfind("synth:", 0) == 0;
}

inline SyntheticSpec parse_synthetic_spec(const std::string& dataset) {
  SyntheticSpec spec;
  std::stringstream body(dataset.substr(6));
  std::string item;
  while (std::getline(body, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("bad synthetic spec item \"" + item +
                        "\" (expected key=value)");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "kind") spec.kind = parse_synthetic_kind(value);
      else if (key == "n") spec.n = std::stoul(value);
      else if (key == "d") spec.d = std::stoul(value);
      else if (key == "margin") spec.margin = std::stod(value);
      else if (key == "flip_prob" || key == "flip") spec.flip_prob = std::stod(value);
      else throw ConfigError("unknown synthetic spec key \"" + key + "\"");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad synthetic spec value \"" + item + "\"");
    }
  }
  return spec;
}

inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void sample_stats(const std::vector<double>& xs, double& mean, double& std_dev) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  std_dev = 0.0;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    std_dev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  static const std::vector<std::string> known = {
      "dataset", "label_column", "test_fraction", "algorithms", "loss",
      "budget", "p_min", "radius", "delta", "repeats", "seed", "oracle",
      "out_dir", "round_cap", "mu", "refit_every"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config key \"" + key + "\"");
  }
  try {
    if (j.contains("dataset")) cfg.dataset = j.at("dataset").get<std::string>();
    if (j.contains("label_column")) cfg.label_column = j.at("label_column").get<std::string>();
    if (j.contains("test_fraction")) cfg.test_fraction = j.at("test_fraction").get<double>();
    if (j.contains("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(a.get<std::string>());
    }
    if (j.contains("loss")) cfg.learner.loss.kind = parse_loss_kind(j.at("loss").get<std::string>());
    if (j.contains("budget")) cfg.learner.budget = j.at("budget").get<std::size_t>();
    if (j.contains("p_min")) cfg.learner.p_min = j.at("p_min").get<double>();
    if (j.contains("radius")) cfg.learner.radius = j.at("radius").get<double>();
    if (j.contains("delta")) cfg.learner.delta = j.at("delta").get<double>();
    if (j.contains("repeats")) cfg.repeats = j.at("repeats").get<std::size_t>();
    if (j.contains("seed")) cfg.learner.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("oracle")) cfg.oracle = j.at("oracle").get<std::string>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("round_cap")) cfg.learner.round_cap = j.at("round_cap").get<std::size_t>();
    if (j.contains("mu")) cfg.learner.mu = j.at("mu").get<double>();
    if (j.contains("refit_every")) cfg.learner.refit_every = j.at("refit_every").get<std::size_t>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
  return parse_experiment_config(j);
}

inline void validate_experiment_config(const ExperimentConfig& cfg) {
  if (cfg.dataset.empty()) throw ConfigError("no dataset given");
  if (cfg.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw ConfigError("test_fraction must be in (0,1)");
  if (cfg.algorithms.empty()) throw ConfigError("no algorithms selected");
  for (const auto& a : cfg.algorithms)
    if (a != "lcb-al" && a != "upal" && a != "passive")
      throw ConfigError("unknown algorithm \"" + a +
                        "\" (expected lcb-al|upal|passive)");
  if (cfg.oracle != "simulated" && cfg.oracle != "interactive")
    throw ConfigError("unknown oracle mode \"" + cfg.oracle + "\"");
}

// Loads (or synthesizes), scales to the unit box, and splits.
inline std::pair<Dataset, Dataset> prepare_data(const ExperimentConfig& cfg) {
  Dataset full;
  if (detail::is_synthetic_spec(cfg.dataset)) {
    const SyntheticSpec s = detail::parse_synthetic_spec(cfg.dataset);
    full = make_synthetic(s.kind, s.n, s.d, s.margin, s.flip_prob, cfg.learner.seed);
  } else {
    CsvOptions opts;
    opts.has_header = cfg.csv_has_header;
    opts.label_column = cfg.label_column;
    opts.encoding = cfg.label_encoding;
    try {
      full = load_csv(cfg.dataset, opts);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());  // a dataset that cannot load is a config problem
    }
  }
  full = scale_to_unit_box(full);
  return split(full, cfg.test_fraction, cfg.learner.seed);
}

inline Summary summarize_runs(const std::vector<RunRecord>& runs) {
  Summary summary;
  std::map<std::string, std::vector<const RunRecord*>> by_algorithm;
  for (const auto& r : runs) by_algorithm[r.algorithm].push_back(&r);
  for (const auto& [name, group] : by_algorithm) {
    std::vector<double> finals, aucs;
    for (const auto* r : group) {
      finals.push_back(r->result.error_curve.back().test_error);
      aucs.push_back(r->result.auc);
    }
    AlgorithmSummary s;
    s.runs = group.size();
    detail::sample_stats(finals, s.final_error_mean, s.final_error_std);
    detail::sample_stats(aucs, s.auc_mean, s.auc_std);
    summary.per_algorithm[name] = s;
  }
  return summary;
}

// Writes results.csv (one row per round, with the latest measured test
// error), curves.csv (one row per unique query), and summary.json.
inline void emit_results(const Summary& summary, const std::vector<RunRecord>& runs,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir +
                                   ": " + ec.message());

  const std::string results_path = (fs::path(out_dir) / "results.csv").string();
  std::ofstream results(results_path);
  if (!results) throw std::runtime_error("cannot write " + results_path);
  results << "run_id,algorithm,round,unique_queries,queried_index,probability,"
             "was_new,test_error\n";
  for (const auto& run : runs) {
    std::size_t unique = 0;
    std::size_t curve_pos = 0;
    double last_error = 0.0;
    for (const auto& t : run.result.query_trace) {
      if (t.was_new) {
        ++unique;
        last_error = run.result.error_curve[curve_pos++].test_error;
      }
      results << run.run_id << ',' << run.algorithm << ',' << t.round << ','
              << unique << ',' << t.index << ',' << detail::csv_double(t.probability)
              << ',' << (t.was_new ? 1 : 0) << ',' << detail::csv_double(last_error)
              << '\n';
    }
  }
  if (!results) throw std::runtime_error("write failed: " + results_path);

  const std::string curves_path = (fs::path(out_dir) / "curves.csv").string();
  std::ofstream curves(curves_path);
  if (!curves) throw std::runtime_error("cannot write " + curves_path);
  curves << "run_id,algorithm,unique_queries,test_error\n";
  for (const auto& run : runs)
    for (const auto& p : run.result.error_curve)
      curves << run.run_id << ',' << run.algorithm << ',' << p.unique_queries << ','
             << detail::csv_double(p.test_error) << '\n';
  if (!curves) throw std::runtime_error("write failed: " + curves_path);

  nlohmann::ordered_json j;
  for (const auto& [name, s] : summary.per_algorithm) {
    j[name] = {{"final_error_mean", s.final_error_mean},
               {"final_error_std", s.final_error_std},
               {"auc_mean", s.auc_mean},
               {"auc_std", s.auc_std},
               {"runs", s.runs}};
  }
  if (summary.per_algorithm.empty()) j = nlohmann::ordered_json::object();
  const std::string summary_path = (fs::path(out_dir) / "summary.json").string();
  std::ofstream summary_out(summary_path);
  if (!summary_out) throw std::runtime_error("cannot write " + summary_path);
  summary_out << j.dump(2) << '\n';
  if (!summary_out) throw std::runtime_error("write failed: " + summary_path);
}

// Runs every algorithm `repeats` times with seeds base_seed + run_index,
// writes the result files, and returns the summary. Deterministic for a
// fixed config. On a run abort, everything collected so far is flushed
// before the error propagates with the run identity attached.
inline Summary run_experiment(const ExperimentConfig& cfg,
                              std::vector<RunRecord>* collected = nullptr) {
  validate_experiment_config(cfg);
  const auto [train, test] = prepare_data(cfg);
  const PoolView pool(train.features);

  std::vector<RunRecord> runs;
  for (const auto& algorithm : cfg.algorithms) {
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      LearnerConfig lc = cfg.learner;
      lc.seed = cfg.learner.seed + r;
      Rng rng(lc.seed);
      Oracle oracle = cfg.oracle == "interactive"
                          ? Oracle::interactive(pool)
                          : Oracle::simulated(train.labels);
      try {
        RunResult result;
        if (algorithm == "lcb-al") result = run_lcb_al(pool, oracle, test, lc, rng);
        else if (algorithm == "upal") result = run_upal(pool, oracle, test, lc, rng);
        else result = run_passive(pool, oracle, test, lc, rng);
        runs.push_back({r, algorithm, std::move(result)});
      } catch (const std::exception& e) {
        emit_results(summarize_runs(runs), runs, cfg.out_dir);
        throw std::runtime_error("run " + algorithm + "#" + std::to_string(r) +
                                 " aborted: " + e.what());
      }
    }
  }

  Summary summary = summarize_runs(runs);
  emit_results(summary, runs, cfg.out_dir);
  if (collected) *collected = std::move(runs);
  return summary;
}

// Summarizes an externally produced curves.csv
// (run_id,algorithm,unique_queries,test_error); lets curves from other
// tools sit in the same tables.
inline Summary summarize_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty curves file: " + path);
  std::map<std::pair<std::string, std::size_t>, std::vector<CurvePoint>> curves;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 4)
      throw std::runtime_error("curves row " + std::to_string(row) +
                               " has " + std::to_string(cells.size()) + " cells, expected 4");
    const std::size_t run_id = std::stoul(cells[0]);
    const std::size_t uq = std::stoul(cells[2]);
    curves[{cells[1], run_id}].push_back({uq, detail::parse_cell(cells[3], row, 3)});
  }
  std::vector<RunRecord> runs;
  for (auto& [key, curve] : curves) {
    RunRecord r;
    r.run_id = key.second;
    r.algorithm = key.first;
    r.result.error_curve = std::move(curve);
    r.result.auc = auc(r.result.error_curve);
    runs.push_back(std::move(r));
  }
  return summarize_runs(runs);
}

}  // namespace lcbal

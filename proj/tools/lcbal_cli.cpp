// Command-line front end: experiment runner, synthetic pool generator,
// gradient self-check, and curve summarizer.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcbal/lcbal.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct RunFlags {
  std::string config_path;
  std::string dataset;
  std::string label_column;
  std::string label_encoding;
  std::string loss;
  std::string oracle;
  std::string out_dir;
  std::vector<std::string> algorithms;
  double test_fraction = 0.0;
  double p_min = 0.0;
  double radius = 0.0;
  double delta = 0.0;
  double mu = 0.0;
  double tolerance = 0.0;
  std::size_t budget = 0;
  std::size_t repeats = 0;
  std::size_t round_cap = 0;
  std::size_t refit_every = 0;
  std::size_t max_iterations = 0;
  std::uint64_t seed = 0;
  bool no_header = false;
};

void print_summary(const lcbal::Summary& summary) {
  for (const auto& [name, s] : summary.per_algorithm) {
    std::printf("%-8s final_error %.4f +- %.4f   auc %.4f +- %.4f   (%zu runs)\n",
                name.c_str(), s.final_error_mean, s.final_error_std, s.auc_mean,
                s.auc_std, s.runs);
  }
}

int cmd_run(const RunFlags& flags, const CLI::App& sub) {
  lcbal::ExperimentConfig cfg;
  if (!flags.config_path.empty())
    cfg = lcbal::load_experiment_config(flags.config_path);

  auto given = [&](const std::string& name) { return sub.count(name) > 0; };
  if (given("--dataset")) cfg.dataset = flags.dataset;
  if (given("--label-column")) cfg.label_column = flags.label_column;
  if (given("--label-encoding"))
    cfg.label_encoding = lcbal::parse_label_encoding(flags.label_encoding);
  if (given("--no-header")) cfg.csv_has_header = false;
  if (given("--test-fraction")) cfg.test_fraction = flags.test_fraction;
  if (given("--algorithm")) cfg.algorithms = flags.algorithms;
  if (given("--loss")) cfg.learner.loss.kind = lcbal::parse_loss_kind(flags.loss);
  if (given("--budget")) cfg.learner.budget = flags.budget;
  if (given("--pmin")) cfg.learner.p_min = flags.p_min;
  if (given("--radius")) cfg.learner.radius = flags.radius;
  if (given("--delta")) cfg.learner.delta = flags.delta;
  if (given("--repeats")) cfg.repeats = flags.repeats;
  if (given("--seed")) cfg.learner.seed = flags.seed;
  if (given("--oracle")) cfg.oracle = flags.oracle;
  if (given("--out-dir")) cfg.out_dir = flags.out_dir;
  if (given("--round-cap")) cfg.learner.round_cap = flags.round_cap;
  if (given("--mu")) cfg.learner.mu = flags.mu;
  if (given("--refit-every")) cfg.learner.refit_every = flags.refit_every;
  if (given("--tol")) cfg.learner.tolerance = flags.tolerance;
  if (given("--max-iter")) cfg.learner.max_iterations = flags.max_iterations;

  const lcbal::Summary summary = lcbal::run_experiment(cfg);
  print_summary(summary);
  std::printf("results written to %s\n", cfg.out_dir.c_str());
  return kExitOk;
}

int cmd_synth(const std::string& kind, std::size_t n, std::size_t d, double margin,
              double flip_prob, std::uint64_t seed, const std::string& out) {
  const lcbal::Dataset data = lcbal::make_synthetic(lcbal::parse_synthetic_kind(kind),
                                                    n, d, margin, flip_prob, seed);
  lcbal::save_csv(data, out);
  std::printf("wrote %zu x %zu pool to %s\n", data.size(), data.dims(), out.c_str());
  return kExitOk;
}

int cmd_gradcheck(std::uint64_t seed, std::size_t trials) {
  using namespace lcbal;
  Rng rng(seed);
  double worst = 0.0;

  // loss derivatives against central differences
  for (LossKind kind : {LossKind::logistic, LossKind::squared, LossKind::exponential}) {
    const MarginLoss loss{kind};
    double kind_worst = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
      const double m = 20.0 * rng.uniform() - 10.0;
      const double step = 1e-6;
      const double fd = (loss.value(m + step) - loss.value(m - step)) / (2.0 * step);
      const double an = loss.derivative(m);
      const double rel = std::fabs(fd - an) / std::max(1.0, std::fabs(an));
      kind_worst = std::max(kind_worst, rel);
    }
    std::printf("loss %-12s max relative derivative error %.3e\n", to_string(kind),
                kind_worst);
    worst = std::max(worst, kind_worst);
  }

  // objective gradient on a random query log
  const std::size_t n = 8, d = 3;
  Matrix features(n, d);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) features(i, j) = 2.0 * rng.uniform() - 1.0;
    labels[i] = rng.uniform() < 0.5 ? -1 : +1;
  }
  const PoolView pool(features);
  const double p_min = 0.05;
  QueryLog log(pool, p_min);
  for (std::size_t t = 0; t < 6; ++t) {
    const std::size_t idx = rng.uniform_int(n);
    const double p = p_min + (1.0 - p_min) * rng.uniform();
    log.append(idx, p, labels[idx]);
  }
  const BoundConfig cfg{0.01, 1.0, 0.1, 100.0};
  const MarginLoss loss{LossKind::logistic};

  double obj_worst = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Hypothesis h(d);
    double norm2 = 0.0;
    for (auto& w : h.weights) {
      w = 2.0 * rng.uniform() - 1.0;
      norm2 += w * w;
    }
    const double scale = 0.7 * rng.uniform() / std::max(1e-12, std::sqrt(norm2));
    for (auto& w : h.weights) w *= scale;

    const auto analytic = lcb_prime_gradient(log, h, loss, cfg, n);
    const auto numeric = finite_difference_gradient(
        [&](const std::vector<double>& w) {
          return lcb_prime_objective(log, Hypothesis(w), loss, cfg, n);
        },
        h);
    double diff = 0.0, base = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      diff += (analytic[j] - numeric[j]) * (analytic[j] - numeric[j]);
      base += analytic[j] * analytic[j];
    }
    const double rel = std::sqrt(diff) / std::max(1.0, std::sqrt(base));
    obj_worst = std::max(obj_worst, rel);
  }
  std::printf("objective gradient max relative error %.3e over %zu points\n",
              obj_worst, trials);
  worst = std::max(worst, obj_worst);

  std::printf("max relative error %.3e -> %s\n", worst,
              worst <= 1e-5 ? "ok" : "FAILED");
  return worst <= 1e-5 ? kExitOk : kExitRuntime;
}

int cmd_summarize(const std::string& curves, const std::string& out_dir) {
  const lcbal::Summary summary = lcbal::summarize_curves_csv(curves);
  print_summary(summary);
  if (!out_dir.empty()) lcbal::emit_results(summary, {}, out_dir);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pool-based active learning benchmark (lcb-al, upal, passive)"};
  app.require_subcommand(1);

  RunFlags flags;
  auto* run = app.add_subcommand("run", "run an experiment from a config and/or flags");
  run->add_option("--config", flags.config_path, "JSON config file");
  run->add_option("--dataset", flags.dataset,
                  "CSV path or synth:kind=...,n=...,d=...,margin=...,flip_prob=...");
  run->add_option("--label-column", flags.label_column, "label column name or index");
  run->add_option("--label-encoding", flags.label_encoding, "pm1 | zero-one");
  run->add_flag("--no-header", flags.no_header, "CSV has no header row");
  run->add_option("--test-fraction", flags.test_fraction, "held-out fraction in (0,1)");
  run->add_option("--algorithm", flags.algorithms, "lcb-al | upal | passive (repeatable)");
  run->add_option("--loss", flags.loss, "logistic | squared | exponential");
  run->add_option("--budget", flags.budget, "unique-query budget");
  run->add_option("--pmin", flags.p_min, "sampling floor (default 1/(10n))");
  run->add_option("--radius", flags.radius, "hypothesis ball radius (default 10)");
  run->add_option("--delta", flags.delta, "confidence parameter in (0, 1/e)");
  run->add_option("--repeats", flags.repeats, "repeated seeded runs (default 10)");
  run->add_option("--seed", flags.seed, "base seed; run r uses seed + r");
  run->add_option("--oracle", flags.oracle, "simulated | interactive");
  run->add_option("--out-dir", flags.out_dir, "output directory");
  run->add_option("--round-cap", flags.round_cap, "max rounds (default 20 * budget)");
  run->add_option("--mu", flags.mu, "ridge weight for upal/passive");
  run->add_option("--refit-every", flags.refit_every, "passive refit cadence");
  run->add_option("--tol", flags.tolerance, "solver gradient tolerance");
  run->add_option("--max-iter", flags.max_iterations, "solver iteration cap");

  std::string synth_kind = "separable", synth_out = "pool.csv";
  std::size_t synth_n = 500, synth_d = 2;
  double synth_margin = 0.2, synth_flip = 0.0;
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled pool CSV");
  synth->add_option("--kind", synth_kind, "separable | noisy-margin");
  synth->add_option("--n", synth_n, "number of points");
  synth->add_option("--d", synth_d, "dimensions");
  synth->add_option("--margin", synth_margin, "separation margin");
  synth->add_option("--flip-prob", synth_flip, "label flip probability");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output CSV path");

  std::uint64_t check_seed = 7;
  std::size_t check_trials = 20;
  auto* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference gradient self-check");
  gradcheck->add_option("--seed", check_seed, "generator seed");
  gradcheck->add_option("--trials", check_trials, "points per check");

  std::string summarize_curves, summarize_out;
  auto* summarize =
      app.add_subcommand("summarize", "summarize a curves.csv (own or external)");
  summarize->add_option("--curves", summarize_curves, "curves CSV path")->required();
  summarize->add_option("--out-dir", summarize_out, "also write summary files here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(flags, *run);
    if (synth->parsed())
      return cmd_synth(synth_kind, synth_n, synth_d, synth_margin, synth_flip,
                       synth_seed, synth_out);
    if (gradcheck->parsed()) return cmd_gradcheck(check_seed, check_trials);
    if (summarize->parsed()) return cmd_summarize(summarize_curves, summarize_out);
  } catch (const lcbal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

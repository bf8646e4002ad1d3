// Repeated random-split benchmark: train each method per split, score on the
// held-out rows, report mean and sample standard deviation.
#pragma once

#include "scmv/baselines.hpp"
#include "scmv/dataset.hpp"
#include "scmv/model.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace scmv {

struct BenchConfig {
  int runs = 10;
  std::uint64_t master_seed = 0;
  Index test_count = 50;
  Index target_labeled = 0;  // 0 keeps the dataset's own origin tags
  std::vector<std::string> methods = {"scmv", "tb", "tsb"};
  Hyperparams hp;
  OptimizerConfig opt;
  double ridge_alpha = 0.1;
};

struct MethodStats {
  std::string method;
  std::vector<double> accuracies;  // one per run, in [0,1]
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1); 0 for a single run
};

struct BenchmarkReport {
  BenchConfig config;
  std::vector<MethodStats> methods;
};

namespace detail {

inline void finalize_stats(MethodStats& s) {
  double sum = 0.0;
  for (double a : s.accuracies) sum += a;
  const double n = static_cast<double>(s.accuracies.size());
  s.mean = sum / n;
  if (s.accuracies.size() < 2) {
    s.stddev = 0.0;
    return;
  }
  double ss = 0.0;
  for (double a : s.accuracies) ss += (a - s.mean) * (a - s.mean);
  s.stddev = std::sqrt(ss / (n - 1.0));
}

inline void validate_bench_config(const BenchConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("bench: runs must be at least 1");
  if (cfg.test_count < 1)
    throw std::invalid_argument("bench: test_count must be at least 1");
  if (cfg.methods.empty()) throw std::invalid_argument("bench: no methods selected");
  for (const std::string& m : cfg.methods)
    if (m != "scmv" && m != "tb" && m != "tsb")
      throw std::invalid_argument("bench: unknown method '" + m +
                                  "' (expected scmv, tb or tsb)");
}

}  // namespace detail

/// Per-run seed is master_seed + run index, so runs are reproducible yet use
/// distinct splits. With target_labeled > 0 each run's training set is
/// re-tagged after the split: exactly that many labeled rows stay original.
inline BenchmarkReport run_benchmark(const TwoViewDataset& ds, const BenchConfig& cfg) {
  detail::validate_bench_config(cfg);
  validate_dataset(ds);

  BenchmarkReport report;
  report.config = cfg;
  for (const std::string& name : cfg.methods)
    report.methods.push_back(MethodStats{name, {}, 0.0, 0.0});

  for (int run = 0; run < cfg.runs; ++run) {
    std::uint64_t seed = cfg.master_seed + static_cast<std::uint64_t>(run);
    SplitResult split = split_train_test(ds, cfg.test_count, seed);
    TwoViewDataset train_ds =
        cfg.target_labeled > 0 ? retag_target_labeled(split.train, cfg.target_labeled)
                               : split.train;

    for (MethodStats& stats : report.methods) {
      double acc = 0.0;
      if (stats.method == "scmv") {
        TrainResult tr = train(train_ds, cfg.hp, cfg.opt, seed);
        acc = accuracy(tr.model, split.test);
      } else if (stats.method == "tb") {
        RidgeModel rm = train_tb(train_ds, original_labeled_rows(train_ds), cfg.ridge_alpha);
        acc = ridge_accuracy(rm, split.test);
      } else {
        RidgeModel rm = train_tsb(train_ds, original_labeled_rows(train_ds),
                                  translated_labeled_rows(train_ds), cfg.ridge_alpha);
        acc = ridge_accuracy(rm, split.test);
      }
      stats.accuracies.push_back(acc);
    }
  }
  for (MethodStats& stats : report.methods) detail::finalize_stats(stats);
  return report;
}

/// Repeats the benchmark across subspace dimensions.
inline std::vector<BenchmarkReport> run_sweep(const TwoViewDataset& ds, BenchConfig cfg,
                                              const std::vector<Index>& m_values) {
  if (m_values.empty()) throw std::invalid_argument("bench: empty m sweep list");
  std::vector<BenchmarkReport> reports;
  for (Index m : m_values) {
    cfg.hp.m = m;
    reports.push_back(run_benchmark(ds, cfg));
  }
  return reports;
}

/// `86.10±0.42`-style: percent, two decimals.
inline std::string format_percent(double mean, double stddev) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f±%.2f", mean * 100.0, stddev * 100.0);
  return buf;
}

inline std::string format_report_text(const BenchmarkReport& r) {
  std::string out = "runs=" + std::to_string(r.config.runs) +
                    " test_count=" + std::to_string(r.config.test_count) +
                    " target_labeled=" + std::to_string(r.config.target_labeled) +
                    " master_seed=" + std::to_string(r.config.master_seed) +
                    " m=" + std::to_string(r.config.hp.m) + "\n";
  for (const MethodStats& s : r.methods)
    out += s.method + (s.method.size() < 4 ? std::string(5 - s.method.size(), ' ') : " ") +
           format_percent(s.mean, s.stddev) + "\n";
  return out;
}

inline std::string format_sweep_text(const std::vector<BenchmarkReport>& reports) {
  std::string out;
  for (const BenchmarkReport& r : reports) {
    if (!out.empty()) out += "\n";
    out += format_report_text(r);
  }
  return out;
}

inline nlohmann::json report_to_json(const BenchmarkReport& r) {
  nlohmann::json j;
  j["config"] = {{"runs", r.config.runs},
                 {"master_seed", r.config.master_seed},
                 {"test_count", r.config.test_count},
                 {"target_labeled", r.config.target_labeled},
                 {"alpha1", r.config.hp.alpha1},
                 {"alpha2", r.config.hp.alpha2},
                 {"gamma", r.config.hp.gamma},
                 {"m", r.config.hp.m},
                 {"ridge_alpha", r.config.ridge_alpha},
                 {"epsilon", r.config.opt.epsilon},
                 {"maxiters", r.config.opt.maxiters}};
  j["methods"] = nlohmann::json::array();
  for (const MethodStats& s : r.methods)
    j["methods"].push_back({{"method", s.method},
                            {"accuracies", s.accuracies},
                            {"mean", s.mean},
                            {"stddev", s.stddev},
                            {"runs", s.accuracies.size()}});
  return j;
}

inline nlohmann::json sweep_to_json(const std::vector<BenchmarkReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BenchmarkReport& r : reports) arr.push_back(report_to_json(r));
  return nlohmann::json{{"sweep", arr}};
}

}  // namespace scmv

// Command-line surface: train, predict, eval, synth, bench.
#include "scmv/scmv.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

std::vector<scmv::Index> parse_index_list(const std::string& csv) {
  std::vector<scmv::Index> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    scmv::Index value = 0;
    if (!scmv::parse_index(std::string_view(csv).substr(pos, comma - pos), value))
      throw std::invalid_argument("bad integer list '" + csv + "'");
    out.push_back(value);
    pos = comma + 1;
  }
  return out;
}

std::vector<std::string> parse_string_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    out.push_back(csv.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open file for writing");
  f << content;
  if (!f) throw std::runtime_error(path + ": write failed");
}

struct CommonTrainFlags {
  scmv::Hyperparams hp;
  scmv::OptimizerConfig opt;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha1", hp.alpha1, "view-1 ridge weight (default 0.1)");
    cmd->add_option("--alpha2", hp.alpha2, "view-2 ridge weight (default 0.1)");
    cmd->add_option("--gamma", hp.gamma, "co-regularization weight (default 1/6)");
    cmd->add_option("--m", hp.m, "subspace dimension (default 10)");
    cmd->add_option("--epsilon", opt.epsilon, "stationarity threshold (default 1e-6)");
    cmd->add_option("--mu", opt.mu, "step shrink factor (default 0.5)");
    cmd->add_option("--rho1", opt.rho1, "sufficient-decrease constant (default 1e-4)");
    cmd->add_option("--rho2", opt.rho2, "curvature constant (default 0.9)");
    cmd->add_option("--maxiters", opt.maxiters, "iteration cap (default 500)");
    cmd->add_option("--maxsteps", opt.maxsteps, "line-search trial cap (default 30)");
    cmd->add_option("--seed", seed, "random seed (default 0)");
  }
};

struct SynthFlags {
  scmv::SynthConfig cfg;

  void attach(CLI::App* cmd, bool with_seed) {
    cmd->add_option("--n", cfg.n, "total rows (default 200)");
    cmd->add_option("--l", cfg.l, "labeled rows (default 50)");
    cmd->add_option("--d1", cfg.d1, "view-1 dimension (default 20)");
    cmd->add_option("--d2", cfg.d2, "view-2 dimension (default 20)");
    cmd->add_option("--m-true", cfg.m_true, "latent dimension (default 5)");
    cmd->add_option("--noise-sigma", cfg.noise_sigma, "noise level (default 0.5)");
    if (with_seed) cmd->add_option("--seed", cfg.seed, "generation seed (default 0)");
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Subspace co-regularized two-view learning"};
  app.require_subcommand(1);

  auto* train_cmd = app.add_subcommand("train", "train a two-view model");
  std::string train_dataset, train_out, train_trace;
  CommonTrainFlags train_flags;
  train_cmd->add_option("dataset", train_dataset, "two-view TSV file")->required();
  train_cmd->add_option("-o,--out", train_out, "model output path")->required();
  train_cmd->add_option("--trace", train_trace, "write per-iteration JSONL trace here");
  train_flags.attach(train_cmd);

  auto* predict_cmd = app.add_subcommand("predict", "score every row of a dataset");
  std::string predict_model, predict_dataset, predict_out;
  bool predict_strict = false;
  predict_cmd->add_option("model", predict_model, "model file")->required();
  predict_cmd->add_option("dataset", predict_dataset, "two-view TSV file")->required();
  predict_cmd->add_option("-o,--out", predict_out, "output path (default stdout)");
  predict_cmd->add_flag("--strict-load", predict_strict, "reject models with drifted subspaces");

  auto* eval_cmd = app.add_subcommand("eval", "accuracy on the labeled rows");
  std::string eval_model, eval_dataset;
  bool eval_strict = false;
  eval_cmd->add_option("model", eval_model, "model file")->required();
  eval_cmd->add_option("dataset", eval_dataset, "two-view TSV file")->required();
  eval_cmd->add_flag("--strict-load", eval_strict, "reject models with drifted subspaces");

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic two-view dataset");
  std::string synth_out;
  SynthFlags synth_flags;
  synth_cmd->add_option("-o,--out", synth_out, "dataset output path")->required();
  synth_flags.attach(synth_cmd, true);

  auto* bench_cmd = app.add_subcommand("bench", "repeated-split benchmark");
  std::string bench_dataset, bench_methods = "scmv,tb,tsb", bench_sweep, bench_report;
  CommonTrainFlags bench_flags;
  SynthFlags bench_synth;
  scmv::BenchConfig bench_cfg;
  std::uint64_t bench_synth_seed = 0;
  bench_cmd->add_option("dataset", bench_dataset,
                        "two-view TSV file (omit to use a generated dataset)");
  bench_cmd->add_option("--runs", bench_cfg.runs, "number of repeated splits (default 10)");
  bench_cmd->add_option("--test-count", bench_cfg.test_count,
                        "held-out labeled rows per run (default 50)");
  bench_cmd->add_option("--target-labeled", bench_cfg.target_labeled,
                        "re-tag each run's training set to this many original rows");
  bench_cmd->add_option("--methods", bench_methods, "comma list from scmv,tb,tsb");
  bench_cmd->add_option("--ridge-alpha", bench_cfg.ridge_alpha,
                        "baseline ridge weight (default 0.1)");
  bench_cmd->add_option("--sweep-m", bench_sweep, "comma list of subspace dimensions");
  bench_cmd->add_option("--report", bench_report, "write the JSON report here");
  bench_cmd->add_option("--synth-seed", bench_synth_seed,
                        "generation seed for the synthetic dataset (default 0)");
  bench_flags.attach(bench_cmd);
  bench_synth.attach(bench_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (app.got_subcommand(train_cmd)) {
    scmv::TwoViewDataset ds = scmv::load_dataset(train_dataset);
    scmv::TrainResult tr = scmv::train(ds, train_flags.hp, train_flags.opt, train_flags.seed);
    scmv::save_model(tr.model, train_out);
    if (!train_trace.empty()) scmv::write_trace(tr.trace, train_trace);
    if (train_flags.hp.gamma == 0.0)
      std::cout << "decoupled training: gamma=0, the views were fit independently\n";
    std::cout << "final objective: " << scmv::format_double(tr.final_objective) << "\n"
              << "iterations: " << tr.iterations << "\n"
              << "stop reason: " << scmv::to_string(tr.reason) << "\n"
              << "model written to " << train_out << "\n";
    return 0;
  }

  if (app.got_subcommand(predict_cmd)) {
    scmv::ScmvModel model = scmv::load_model(predict_model, predict_strict);
    scmv::TwoViewDataset ds = scmv::load_dataset(predict_dataset);
    auto [f1, f2] = scmv::predict_scores(model, ds.x1, ds.x2);
    std::string out = "#label\tf1\tf2\tview\n";
    for (scmv::Index i = 0; i < ds.n; ++i) {
      bool view1 = std::abs(f1(i)) > std::abs(f2(i));
      double label = scmv::sign_or_positive(view1 ? f1(i) : f2(i));
      out += (label < 0 ? "-1" : "1");
      out += '\t';
      out += scmv::format_double(f1(i));
      out += '\t';
      out += scmv::format_double(f2(i));
      out += '\t';
      out += (view1 ? '1' : '2');
      out += '\n';
    }
    if (predict_out.empty())
      std::cout << out;
    else
      write_text_file(predict_out, out);
    return 0;
  }

  if (app.got_subcommand(eval_cmd)) {
    scmv::ScmvModel model = scmv::load_model(eval_model, eval_strict);
    scmv::TwoViewDataset ds = scmv::load_dataset(eval_dataset);
    std::printf("%.4f\n", scmv::accuracy(model, ds));
    return 0;
  }

  if (app.got_subcommand(synth_cmd)) {
    scmv::TwoViewDataset ds = scmv::synth_generate(synth_flags.cfg);
    scmv::save_dataset(ds, synth_out);
    std::cout << "wrote " << synth_out << " (n=" << ds.n << ", l=" << ds.l
              << ", d1=" << ds.x1.cols() << ", d2=" << ds.x2.cols() << ")\n";
    return 0;
  }

  // bench
  scmv::TwoViewDataset ds;
  if (!bench_dataset.empty()) {
    ds = scmv::load_dataset(bench_dataset);
  } else {
    bench_synth.cfg.seed = bench_synth_seed;
    ds = scmv::synth_generate(bench_synth.cfg);
  }
  bench_cfg.master_seed = bench_flags.seed;
  bench_cfg.methods = parse_string_list(bench_methods);
  bench_cfg.hp = bench_flags.hp;
  bench_cfg.opt = bench_flags.opt;
  if (bench_sweep.empty()) {
    scmv::BenchmarkReport report = scmv::run_benchmark(ds, bench_cfg);
    std::cout << scmv::format_report_text(report);
    if (!bench_report.empty())
      write_text_file(bench_report, scmv::report_to_json(report).dump(2) + "\n");
  } else {
    auto reports = scmv::run_sweep(ds, bench_cfg, parse_index_list(bench_sweep));
    std::cout << scmv::format_sweep_text(reports);
    if (!bench_report.empty())
      write_text_file(bench_report, scmv::sweep_to_json(reports).dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const scmv::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

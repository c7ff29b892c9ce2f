// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

// Command line front end: `otafl run <config>` executes an experiment,
// `otafl plotdata <mode> <csv...>` reduces result CSVs to plot tables, and
// `otafl selftest` runs quick built-in sanity checks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otafl/experiment.hpp"
#include "otafl/plotdata.hpp"

namespace {

int cmd_run(const std::string& config_path) {
  const otafl::ExperimentConfig cfg = otafl::load_config(config_path);
  for (const auto& warning : otafl::validate_config(cfg)) {
    std::cerr << "warning: " << warning << "\n";
  }
  const auto runs = otafl::run_experiment(cfg);
  for (const auto& run : runs) {
    const double final_acc = run.rounds.empty() ? 0.0 : run.rounds.back().accuracy;
    std::printf("seed %llu: %d rounds, final accuracy %.4f\n",
                static_cast<unsigned long long>(run.seed), static_cast<int>(run.rounds.size()),
                final_acc);
  }
  std::printf("wrote %s\n", cfg.output.c_str());
  return 0;
}

int cmd_plotdata(const std::string& mode, const std::vector<std::string>& paths) {
  std::cout << otafl::emit_plotdata(mode, paths);
  return 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_selftest() {
  int failures = 0;
  const auto check = [&failures](const char* name, bool ok) {
    std::printf("%-34s %s\n", name, ok ? "ok" : "FAILED");
    if (!ok) ++failures;
  };

  {
    otafl::RngStream rng(1, "selftest:baseband");
    otafl::RealVector v(7);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    const auto s = otafl::to_baseband(v);
    check("baseband roundtrip", (otafl::from_baseband(s, 7) - v).norm() == 0.0);
  }

  {
    otafl::StreamFactory streams{2};
    auto sig_rng = streams.make("selftest:signals");
    const std::size_t k = 10;
    const Eigen::Index n = 1000;
    std::vector<otafl::BasebandVector> signals(k);
    std::vector<double> weights(k, 1.0 / static_cast<double>(k));
    otafl::BasebandVector want = otafl::BasebandVector::Zero(n);
    for (auto& s : signals) {
      s.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) s[i] = sig_rng.normal_complex(1.0);
    }
    for (std::size_t i = 0; i < k; ++i) want += weights[i] * signals[i];
    auto gain_rng = streams.make("selftest:gains");
    const auto gains = otafl::draw_channels(gain_rng, k);
    std::vector<double> norms;
    for (const auto& s : signals) norms.push_back(s.norm());
    const double eta = otafl::compute_eta(100.0, weights, gains, norms);
    auto noise_rng = streams.make("selftest:noise");
    const auto [y, report] =
        otafl::ota_round(signals, weights, gains, eta, 0.0, 100.0, noise_rng);
    const auto estimate = otafl::ota_estimate(y, eta);
    check("noiseless ota exactness",
          (estimate - want).squaredNorm() / want.squaredNorm() < 1e-20);
  }

  {
    otafl::StreamFactory streams{3};
    auto matrix_rng = streams.make("selftest:matrix");
    const auto a = otafl::generate_matrix(matrix_rng, 128, 256, 1.01);
    otafl::BasebandVector s = otafl::BasebandVector::Zero(256);
    s[3] = {1.0, -2.0};
    s[17] = {-0.5, 0.0};
    s[140] = {0.0, 3.0};
    s[209] = {2.0, 2.0};
    otafl::IhtConfig cfg;
    cfg.sparsity_l = 4;
    const otafl::BasebandVector y = otafl::compress(a, s);
    cfg.epsilon = otafl::default_iht_epsilon(y, 1e-14);
    cfg.max_iters = 2000;
    const auto res = otafl::iht_reconstruct(a, y, cfg);
    check("iht sparse recovery",
          res.converged && (res.estimate.dense - s).squaredNorm() / s.squaredNorm() < 1e-10);
  }

  {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path();
    otafl::ExperimentConfig cfg;
    cfg.design.kind = otafl::DesignKind::case3_sparse_compressed;
    cfg.design.sparsity_l = 8;
    cfg.design.compressed_m = 40;
    cfg.k_total = 4;
    cfg.k_per_round = 2;
    cfg.channel.sigma2 = 0.1;
    cfg.rounds = 3;
    cfg.seeds = {7};
    cfg.model = otafl::MlpSpec{16, {}, 10};
    cfg.train_samples = 64;
    cfg.test_samples = 32;
    cfg.sgd.batch = 8;
    cfg.output = (dir / "otafl_selftest_a.csv").string();
    const auto first = otafl::run_experiment(cfg);
    const std::string out_a = read_file(cfg.output);
    cfg.output = (dir / "otafl_selftest_b.csv").string();
    const auto second = otafl::run_experiment(cfg);
    const std::string out_b = read_file(cfg.output);
    fs::remove(dir / "otafl_selftest_a.csv");
    fs::remove(dir / "otafl_selftest_b.csv");
    check("experiment determinism", !out_a.empty() && out_a == out_b);
  }

  if (failures == 0) {
    std::printf("all selftests passed\n");
    return 0;
  }
  std::printf("%d selftest(s) failed\n", failures);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Over-the-air federated learning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  run->add_option("config", config_path, "path to a key = value config file")
      ->required()
      ->check(CLI::ExistingFile);

  std::string mode;
  std::vector<std::string> paths;
  auto* plot = app.add_subcommand("plotdata", "Reduce experiment CSVs to plot-ready tables");
  plot->add_option("mode", mode, "vs_round, vs_channel_uses, or histogram")->required();
  plot->add_option("files", paths, "input files")->required()->expected(-1);

  auto* self = app.add_subcommand("selftest", "Run quick built-in sanity checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (plot->parsed()) return cmd_plotdata(mode, paths);
    if (self->parsed()) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

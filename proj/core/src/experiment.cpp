// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "otafl/measurement.hpp"

namespace otafl {

namespace {

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string seed_suffixed(const std::string& path, std::uint64_t seed, bool multi_seed) {
  if (!multi_seed) return path;
  return path + ".s" + std::to_string(seed);
}

void write_histogram_file(const std::string& path, const RealVector& values, int bins) {
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    max_abs = std::max(max_abs, std::abs(values[i]));
  }
  if (max_abs == 0.0) max_abs = 1.0;
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = -max_abs + 2.0 * max_abs * static_cast<double>(i) / bins;
  }
  const Histogram h = update_histogram(values, edges);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("histogram: cannot open " + path);
  out << "# zero_mass " << fmt_real(h.zero_fraction()) << " (" << h.zero_count << " of "
      << h.total << " entries exactly zero)\n";
  out << "# bin_center density\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double width = h.edges[b + 1] - h.edges[b];
    const double center = 0.5 * (h.edges[b] + h.edges[b + 1]);
    const double density =
        h.total == 0 ? 0.0
                     : static_cast<double>(h.counts[b]) / (static_cast<double>(h.total) * width);
    out << fmt_real(center) << " " << fmt_real(density) << "\n";
  }
}

}  // namespace

std::string metrics_csv_header() {
  return "round,channel_uses,cum_channel_uses,accuracy,agg_nmse,eta,iht_iters,converged,"
         "skipped,seed";
}

std::string metrics_csv_row(const RoundMetrics& m, std::uint64_t cum_channel_uses,
                            std::uint64_t seed) {
  std::ostringstream row;
  row << m.round << "," << m.channel_uses << "," << cum_channel_uses << ","
      << fmt_real(m.accuracy) << ",";
  if (m.agg_nmse) row << fmt_real(*m.agg_nmse);
  row << ",";
  if (m.eta) row << fmt_real(*m.eta);
  row << ",";
  if (m.iht_iterations) row << *m.iht_iterations;
  row << ",";
  if (m.iht_converged) row << (*m.iht_converged ? 1 : 0);
  row << "," << (m.skipped ? 1 : 0) << "," << seed;
  return row.str();
}

std::pair<Dataset, Dataset> load_experiment_data(const ExperimentConfig& cfg) {
  if (cfg.dataset == DatasetKind::synthetic) {
    // Train and test must come from one draw so they share the class means.
    RngStream data_rng(cfg.synthetic_seed, "synthetic:data");
    const Dataset pooled = make_synthetic(data_rng, cfg.train_samples + cfg.test_samples,
                                          cfg.model.input_dim, cfg.model.num_classes,
                                          cfg.synthetic_noise);
    return {pooled.head(cfg.train_samples), pooled.tail(cfg.test_samples)};
  }

  std::string dir = cfg.mnist_dir;
  if (dir.empty()) {
    const char* env = std::getenv("OTAFL_DATA_DIR");
    if (env != nullptr) dir = env;
  }
  if (dir.empty()) {
    throw std::runtime_error(
        "mnist dataset requested but neither mnist_dir nor OTAFL_DATA_DIR is set");
  }
  Dataset train = load_idx(dir + "/train-images-idx3-ubyte", dir + "/train-labels-idx1-ubyte");
  Dataset test = load_idx(dir + "/t10k-images-idx3-ubyte", dir + "/t10k-labels-idx1-ubyte");
  if (train.dim() != cfg.model.input_dim) {
    throw std::runtime_error("mnist feature dim does not match model_input_dim");
  }
  if (train.size() < cfg.train_samples || test.size() < cfg.test_samples) {
    throw std::runtime_error("mnist files hold fewer samples than requested");
  }
  return {train.head(cfg.train_samples), test.head(cfg.test_samples)};
}

std::vector<SeedRun> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto [train, test] = load_experiment_data(cfg);
  const MlpModel model(cfg.model);
  const Eigen::Index n = baseband_length(model.param_count());
  const bool needs_matrix = design_needs_matrix(cfg.design.kind);
  const bool multi_seed = cfg.seeds.size() > 1;

  std::ofstream csv(cfg.output, std::ios::trunc);
  if (!csv) throw std::runtime_error("run_experiment: cannot open " + cfg.output);
  csv << metrics_csv_header() << "\n";
  csv.flush();

  std::ofstream energy;
  if (!cfg.energy_log.empty()) {
    energy.open(cfg.energy_log, std::ios::trunc);
    if (!energy) throw std::runtime_error("run_experiment: cannot open " + cfg.energy_log);
    energy << "seed,round,slot,energy,budget\n";
    energy.flush();
  }

  std::vector<SeedRun> result;
  result.reserve(cfg.seeds.size());
  for (const std::uint64_t seed : cfg.seeds) {
    StreamFactory streams{seed};
    auto partition_rng = streams.make("partition");
    const auto parts = partition_noniid(train, cfg.k_total, cfg.shards_per_device, partition_rng);
    auto init_rng = streams.make("init");
    RealVector theta = model.init_params(init_rng);

    MeasurementMatrix matrix_storage;
    SimState state{model,       train,   test,            parts, nullptr,
                   cfg.channel, cfg.sgd, cfg.k_per_round, streams};
    if (needs_matrix && !cfg.matrix_per_round) {
      auto matrix_rng = streams.make("matrix");
      matrix_storage = generate_matrix(matrix_rng, cfg.design.compressed_m, n, cfg.matrix_c);
      state.matrix = &matrix_storage;
      if (!cfg.matrix_dump.empty()) {
        write_matrix_file(matrix_storage, seed_suffixed(cfg.matrix_dump, seed, multi_seed));
      }
    }

    SeedRun run;
    run.seed = seed;
    run.rounds.reserve(static_cast<std::size_t>(cfg.rounds));
    std::uint64_t cum_uses = 0;
    bool histogram_done = cfg.histogram_out.empty();
    for (int t = 0; t < cfg.rounds; ++t) {
      if (needs_matrix && cfg.matrix_per_round) {
        auto matrix_rng = streams.make("matrix:r" + std::to_string(t));
        matrix_storage = generate_matrix(matrix_rng, cfg.design.compressed_m, n, cfg.matrix_c);
        state.matrix = &matrix_storage;
      }
      auto [next_theta, metrics] = run_round(cfg.design, state, theta, t);
      cum_uses += static_cast<std::uint64_t>(metrics.channel_uses);

      csv << metrics_csv_row(metrics, cum_uses, seed) << "\n";
      csv.flush();
      if (energy.is_open() && !metrics.skipped) {
        for (std::size_t slot = 0; slot < metrics.report.per_device_energy.size(); ++slot) {
          energy << seed << "," << t << "," << slot << ","
                 << fmt_real(metrics.report.per_device_energy[slot]) << ","
                 << fmt_real(metrics.report.budget) << "\n";
        }
        energy.flush();
      }
      if (!histogram_done && !metrics.skipped && metrics.accuracy >= cfg.histogram_accuracy) {
        const RealVector delta = next_theta - theta;
        write_histogram_file(seed_suffixed(cfg.histogram_out, seed, multi_seed), delta,
                             cfg.histogram_bins);
        histogram_done = true;
      }

      theta = std::move(next_theta);
      run.rounds.push_back(std::move(metrics));
    }
    run.final_params = std::move(theta);
    result.push_back(std::move(run));
  }
  return result;
}

}  // namespace otafl

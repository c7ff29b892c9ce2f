// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "otafl/config.hpp"
#include "otafl/pipeline.hpp"

namespace otafl {

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<RoundMetrics> rounds;
  RealVector final_params;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const RoundMetrics& m, std::uint64_t cum_channel_uses,
                            std::uint64_t seed);

/// Training and validation sets for the config's dataset choice.  MNIST
/// reads IDX files from mnist_dir, falling back to the OTAFL_DATA_DIR
/// environment variable; synthetic data is generated from synthetic_seed
/// independently of the experiment seeds.
std::pair<Dataset, Dataset> load_experiment_data(const ExperimentConfig& cfg);

/// Runs cfg.rounds rounds for every seed in cfg.seeds, appending one CSV row
/// per round to cfg.output (flushed after every row, so an interrupted run
/// leaves a valid prefix).  Optional side outputs: per-device energy log,
/// aggregate-update histogram at the accuracy threshold, measurement-matrix
/// dump.  Returns the per-seed metrics for in-process consumers.
std::vector<SeedRun> run_experiment(const ExperimentConfig& cfg);

}  // namespace otafl

// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "otafl/federated.hpp"
#include "otafl/mlp.hpp"
#include "otafl/pipeline.hpp"

namespace otafl {

enum class DatasetKind { synthetic, mnist };

std::string dataset_kind_name(DatasetKind kind);
DatasetKind parse_dataset_kind(const std::string& name);

/// Full description of one experiment.  Loads from and saves to a flat
/// key = value text file (one key per line, full-line # comments), so
/// figure configurations stay diffable.
struct ExperimentConfig {
  DesignSpec design;
  int k_total = 100;
  int k_per_round = 10;
  ChannelConfig channel;
  int rounds = 400;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  double matrix_c = 1.01;
  bool matrix_per_round = false;
  MlpSpec model = MlpSpec{784, {26}, 10};
  DatasetKind dataset = DatasetKind::synthetic;
  std::string mnist_dir;
  Eigen::Index train_samples = 6000;
  Eigen::Index test_samples = 1000;
  double synthetic_noise = 0.3;
  std::uint64_t synthetic_seed = 9000;
  int shards_per_device = 2;
  SgdConfig sgd;
  std::string output;
  std::string energy_log;
  std::string histogram_out;
  double histogram_accuracy = 0.5;
  int histogram_bins = 60;
  std::string matrix_dump;

  bool operator==(const ExperimentConfig& other) const = default;
};

ExperimentConfig parse_config(std::istream& in, const std::string& origin);
ExperimentConfig load_config(const std::string& path);

std::string config_to_string(const ExperimentConfig& cfg);
void save_config(const ExperimentConfig& cfg, const std::string& path);

/// Checks every cross-field invariant; throws on violations and returns
/// human-readable warnings for legal but suspicious settings.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

}  // namespace otafl

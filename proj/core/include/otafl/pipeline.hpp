// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "otafl/baseband.hpp"
#include "otafl/dataset.hpp"
#include "otafl/federated.hpp"
#include "otafl/iht.hpp"
#include "otafl/measurement.hpp"
#include "otafl/mlp.hpp"
#include "otafl/ota_channel.hpp"
#include "otafl/rng.hpp"

namespace otafl {

enum class DesignKind {
  case1_uncompressed,
  case2_sparse_reduced,
  case3_sparse_compressed,
  case4_compressed_only,
};

enum class MaskMode { top_l, uniform_identical };

std::string design_name(DesignKind kind);
DesignKind parse_design_kind(const std::string& name);
std::string mask_mode_name(MaskMode mode);
MaskMode parse_mask_mode(const std::string& name);

struct DesignSpec {
  DesignKind kind = DesignKind::case1_uncompressed;
  Eigen::Index sparsity_l = 500;
  Eigen::Index compressed_m = 1000;
  MaskMode mask_mode = MaskMode::top_l;
  double iht_epsilon_rel = 1e-8;
  int iht_max_iters = 500;
  bool debias_uniform = false;

  bool operator==(const DesignSpec& other) const = default;
};

struct ChannelConfig {
  double p_tot = 1000.0;
  double sigma2 = 1.0;
  double h_th = 0.01;
  bool threshold_on_power = false;
  bool renormalize_truncated = false;

  bool operator==(const ChannelConfig& other) const = default;
};

struct RoundMetrics {
  int round = 0;
  Eigen::Index channel_uses = 0;
  double accuracy = 0.0;
  std::optional<double> agg_nmse;
  std::optional<double> eta;
  std::optional<int> iht_iterations;
  std::optional<bool> iht_converged;
  bool skipped = false;
  TransmitReport report;
};

struct SimState {
  const MlpModel& model;
  const Dataset& train;
  const Dataset& test;
  const std::vector<DevicePartition>& parts;
  const MeasurementMatrix* matrix = nullptr;
  ChannelConfig channel;
  SgdConfig sgd;
  int k_per_round = 1;
  StreamFactory streams;
};

// Channel uses one round of the design consumes: N, L, M, M for cases 1-4.
Eigen::Index design_channel_uses(const DesignSpec& design, Eigen::Index n_baseband);

// Throws when the design's dimensions are inconsistent with the baseband
// length (needs_matrix cases additionally require a matrix in SimState).
void validate_design(const DesignSpec& design, Eigen::Index n_baseband);

bool design_needs_matrix(DesignKind kind);

// One communication round: device selection, local updates, the design's
// uplink, reconstruction, and the global model update.  Returns the new
// parameters and the round's metrics; the model is unchanged on a skipped
// round.
std::pair<RealVector, RoundMetrics> run_round(const DesignSpec& design, const SimState& state,
                                              const RealVector& theta, int round);

double agg_nmse(const RealVector& truth, const RealVector& estimate);

struct Histogram {
  std::vector<double> edges;
  std::vector<Eigen::Index> counts;
  Eigen::Index zero_count = 0;
  Eigen::Index total = 0;

  double zero_fraction() const;
};

// Bins the values against monotone edges; exact zeros are tallied separately
// so the point mass at zero stays visible regardless of binning.
Histogram update_histogram(const RealVector& values, const std::vector<double>& edges);

}  // namespace otafl

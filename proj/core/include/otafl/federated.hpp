// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "otafl/baseband.hpp"
#include "otafl/dataset.hpp"
#include "otafl/rng.hpp"

namespace otafl {

struct DevicePartition {
  int device_id = 0;
  std::vector<Eigen::Index> sample_indices;
  double weight = 0.0;
};

struct SgdConfig {
  double lr = 0.01;
  Eigen::Index batch = 100;
  int local_epochs = 1;

  bool operator==(const SgdConfig& other) const = default;
};

// Label-sorted shard partition: the dataset is sorted by class, cut into
// k_total * shards_per_device equally sized shards, and each device is dealt
// shards_per_device of them at random.
std::vector<DevicePartition> partition_noniid(const Dataset& data, int k_total,
                                              int shards_per_device, RngStream& rng);

std::vector<int> select_devices(RngStream& rng, int k_total, int k);

// Weights of the selected devices rescaled to sum to one, aligned with the
// order of `selected`.
std::vector<double> renormalize_weights(const std::vector<DevicePartition>& parts,
                                        const std::vector<int>& selected);

RealVector apply_aggregate(const RealVector& theta, const RealVector& delta_hat);

// Runs local mini-batch SGD on one device's shard and returns the parameter
// change.  Model must expose param_count() and
// loss_and_grad(params, features, labels, grad) -> mean loss.
template <typename Model>
RealVector local_update(const Model& model, const RealVector& theta, const Dataset& data,
                        const DevicePartition& part, const SgdConfig& cfg, RngStream& rng) {
  if (cfg.lr < 0.0) throw std::invalid_argument("local_update: negative learning rate");
  if (cfg.batch < 1) throw std::invalid_argument("local_update: batch must be at least 1");
  if (cfg.local_epochs < 1) throw std::invalid_argument("local_update: epochs must be at least 1");
  if (theta.size() != model.param_count()) {
    throw std::invalid_argument("local_update: model dimension mismatch");
  }
  if (part.sample_indices.empty()) {
    throw std::invalid_argument("local_update: device holds no data");
  }

  RealVector params = theta;
  RealVector grad;
  std::vector<Eigen::Index> order = part.sample_indices;
  const Eigen::Index n = static_cast<Eigen::Index>(order.size());
  Eigen::MatrixXd bx;
  Eigen::VectorXi by;
  for (int epoch = 0; epoch < cfg.local_epochs; ++epoch) {
    rng.shuffle(order);
    for (Eigen::Index start = 0; start < n; start += cfg.batch) {
      const Eigen::Index b = std::min<Eigen::Index>(cfg.batch, n - start);
      bx.resize(data.dim(), b);
      by.resize(b);
      for (Eigen::Index i = 0; i < b; ++i) {
        bx.col(i) = data.features.col(order[start + i]);
        by[i] = data.labels[order[start + i]];
      }
      const double loss = model.loss_and_grad(params, bx, by, grad);
      if (!std::isfinite(loss)) throw std::runtime_error("local_update: non-finite loss");
      params.noalias() -= cfg.lr * grad;
    }
  }
  return params - theta;
}

}  // namespace otafl

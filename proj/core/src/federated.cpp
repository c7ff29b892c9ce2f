// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/federated.hpp"

#include <numeric>

namespace otafl {

std::vector<DevicePartition> partition_noniid(const Dataset& data, int k_total,
                                              int shards_per_device, RngStream& rng) {
  if (k_total < 1) throw std::invalid_argument("partition_noniid: k_total must be positive");
  if (shards_per_device < 1) {
    throw std::invalid_argument("partition_noniid: shards_per_device must be positive");
  }
  const Eigen::Index total = data.size();
  const Eigen::Index num_shards =
      static_cast<Eigen::Index>(k_total) * static_cast<Eigen::Index>(shards_per_device);
  if (total % num_shards != 0) {
    throw std::invalid_argument("partition_noniid: dataset size not divisible into shards");
  }
  const Eigen::Index shard_size = total / num_shards;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&data](Eigen::Index a, Eigen::Index b) {
    return data.labels[a] < data.labels[b];
  });

  std::vector<Eigen::Index> shard_order(static_cast<std::size_t>(num_shards));
  std::iota(shard_order.begin(), shard_order.end(), Eigen::Index{0});
  rng.shuffle(shard_order);

  std::vector<DevicePartition> parts(static_cast<std::size_t>(k_total));
  const double weight = 1.0 / static_cast<double>(k_total);
  for (int k = 0; k < k_total; ++k) {
    auto& part = parts[static_cast<std::size_t>(k)];
    part.device_id = k;
    part.weight = weight;
    part.sample_indices.reserve(static_cast<std::size_t>(shard_size) * shards_per_device);
    for (int s = 0; s < shards_per_device; ++s) {
      const Eigen::Index shard = shard_order[static_cast<std::size_t>(k * shards_per_device + s)];
      for (Eigen::Index i = 0; i < shard_size; ++i) {
        part.sample_indices.push_back(order[static_cast<std::size_t>(shard * shard_size + i)]);
      }
    }
  }
  return parts;
}

std::vector<int> select_devices(RngStream& rng, int k_total, int k) {
  if (k < 1 || k > k_total) throw std::invalid_argument("select_devices: need 1 <= k <= k_total");
  const auto subset = rng.index_subset(static_cast<std::size_t>(k_total),
                                       static_cast<std::size_t>(k));
  std::vector<int> out;
  out.reserve(subset.size());
  for (const auto idx : subset) out.push_back(static_cast<int>(idx));
  return out;
}

std::vector<double> renormalize_weights(const std::vector<DevicePartition>& parts,
                                        const std::vector<int>& selected) {
  double sum = 0.0;
  for (const int k : selected) {
    if (k < 0 || static_cast<std::size_t>(k) >= parts.size()) {
      throw std::out_of_range("renormalize_weights: device index out of range");
    }
    sum += parts[static_cast<std::size_t>(k)].weight;
  }
  if (sum <= 0.0) throw std::invalid_argument("renormalize_weights: zero total weight");
  std::vector<double> out;
  out.reserve(selected.size());
  for (const int k : selected) out.push_back(parts[static_cast<std::size_t>(k)].weight / sum);
  return out;
}

RealVector apply_aggregate(const RealVector& theta, const RealVector& delta_hat) {
  if (theta.size() != delta_hat.size()) {
    throw std::invalid_argument("apply_aggregate: dimension mismatch");
  }
  return theta + delta_hat;
}

}  // namespace otafl

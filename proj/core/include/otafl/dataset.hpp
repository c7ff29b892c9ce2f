// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <string>

#include "otafl/rng.hpp"

namespace otafl {

/// Labeled classification data, one feature column per sample.
struct Dataset {
  Eigen::MatrixXd features;  // dim x n
  Eigen::VectorXi labels;    // n
  int num_classes = 0;

  Eigen::Index size() const { return labels.size(); }
  Eigen::Index dim() const { return features.rows(); }

  /// The first n samples, in order.
  Dataset head(Eigen::Index n) const;

  /// The last n samples, in order.
  Dataset tail(Eigen::Index n) const;
};

/// Gaussian-blob data: one spherical cluster per class, class means drawn
/// uniformly from [-1, 1]^dim, labels assigned round-robin so classes are
/// balanced. Fully determined by the stream.
Dataset make_synthetic(RngStream& rng, Eigen::Index n, Eigen::Index dim, int num_classes,
                       double noise_std);

/// IDX-format ingestion (big-endian magic 0x00000803 for images and
/// 0x00000801 for labels). Pixels are scaled to [0, 1].
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

}  // namespace otafl

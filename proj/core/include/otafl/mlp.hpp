// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "otafl/baseband.hpp"
#include "otafl/dataset.hpp"
#include "otafl/rng.hpp"

namespace otafl {

struct MlpSpec {
  Eigen::Index input_dim = 0;
  std::vector<Eigen::Index> hidden;
  int num_classes = 0;

  std::vector<Eigen::Index> layer_sizes() const;
  Eigen::Index param_count() const;

  bool operator==(const MlpSpec& other) const = default;
};

// Fully connected network with tanh hidden units and a softmax cross-entropy
// head.  Parameters live in a flat vector: for each layer, the weight matrix
// in column-major order followed by the bias.
class MlpModel {
 public:
  explicit MlpModel(MlpSpec spec);

  const MlpSpec& spec() const { return spec_; }
  Eigen::Index param_count() const { return spec_.param_count(); }

  RealVector init_params(RngStream& rng) const;

  double loss(const RealVector& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
              const Eigen::Ref<const Eigen::VectorXi>& y) const;
  double loss_and_grad(const RealVector& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
                       const Eigen::Ref<const Eigen::VectorXi>& y, RealVector& grad) const;

  int predict(const RealVector& params, const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double accuracy(const RealVector& params, const Dataset& data) const;

 private:
  MlpSpec spec_;
};

}  // namespace otafl

// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace otafl {

std::vector<Eigen::Index> MlpSpec::layer_sizes() const {
  std::vector<Eigen::Index> sizes;
  sizes.reserve(hidden.size() + 2);
  sizes.push_back(input_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(num_classes);
  return sizes;
}

Eigen::Index MlpSpec::param_count() const {
  const auto sizes = layer_sizes();
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    total += sizes[l + 1] * sizes[l] + sizes[l + 1];
  }
  return total;
}

MlpModel::MlpModel(MlpSpec spec) : spec_(std::move(spec)) {
  if (spec_.input_dim < 1) throw std::invalid_argument("MlpModel: input_dim must be positive");
  if (spec_.num_classes < 2) throw std::invalid_argument("MlpModel: need at least two classes");
  for (const auto h : spec_.hidden) {
    if (h < 1) throw std::invalid_argument("MlpModel: hidden widths must be positive");
  }
}

RealVector MlpModel::init_params(RngStream& rng) const {
  const auto sizes = spec_.layer_sizes();
  RealVector params = RealVector::Zero(param_count());
  Eigen::Index off = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const Eigen::Index fan_in = sizes[l];
    const Eigen::Index fan_out = sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (Eigen::Index i = 0; i < fan_out * fan_in; ++i) {
      params[off + i] = limit * (2.0 * rng.uniform() - 1.0);
    }
    off += fan_out * fan_in + fan_out;
  }
  return params;
}

namespace {

void check_shapes(const MlpSpec& spec, const RealVector& params,
                  const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (params.size() != spec.param_count()) {
    throw std::invalid_argument("MlpModel: parameter vector has wrong length");
  }
  if (x.rows() != spec.input_dim) throw std::invalid_argument("MlpModel: input has wrong dim");
  if (x.cols() == 0) throw std::invalid_argument("MlpModel: empty batch");
}

Eigen::MatrixXd forward_logits(const MlpSpec& spec, const RealVector& params,
                               const Eigen::Ref<const Eigen::MatrixXd>& x) {
  const auto sizes = spec.layer_sizes();
  const std::size_t num_layers = sizes.size() - 1;
  Eigen::MatrixXd act = x;
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const Eigen::Index rows = sizes[l + 1];
    const Eigen::Index cols = sizes[l];
    Eigen::Map<const Eigen::MatrixXd> w(params.data() + off, rows, cols);
    Eigen::Map<const Eigen::VectorXd> b(params.data() + off + rows * cols, rows);
    act = (w * act).colwise() + b;
    if (l + 1 < num_layers) act = act.array().tanh();
    off += rows * cols + rows;
  }
  return act;
}

// Converts logits to probabilities in place and returns the mean
// cross-entropy against the labels.
double softmax_ce(Eigen::MatrixXd& logits, const Eigen::Ref<const Eigen::VectorXi>& y,
                  int num_classes) {
  double total = 0.0;
  for (Eigen::Index s = 0; s < logits.cols(); ++s) {
    if (y[s] < 0 || y[s] >= num_classes) {
      throw std::out_of_range("MlpModel: label outside class range");
    }
    const double zmax = logits.col(s).maxCoeff();
    logits.col(s) = (logits.col(s).array() - zmax).exp();
    logits.col(s) /= logits.col(s).sum();
    total -= std::log(logits(y[s], s));
  }
  return total / static_cast<double>(logits.cols());
}

}  // namespace

double MlpModel::loss(const RealVector& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
                      const Eigen::Ref<const Eigen::VectorXi>& y) const {
  check_shapes(spec_, params, x);
  if (y.size() != x.cols()) throw std::invalid_argument("MlpModel: label count mismatch");
  Eigen::MatrixXd logits = forward_logits(spec_, params, x);
  return softmax_ce(logits, y, spec_.num_classes);
}

double MlpModel::loss_and_grad(const RealVector& params,
                               const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::VectorXi>& y,
                               RealVector& grad) const {
  check_shapes(spec_, params, x);
  if (y.size() != x.cols()) throw std::invalid_argument("MlpModel: label count mismatch");

  const auto sizes = spec_.layer_sizes();
  const std::size_t num_layers = sizes.size() - 1;
  const Eigen::Index batch = x.cols();

  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(num_layers + 1);
  acts.emplace_back(x);
  std::vector<Eigen::Index> offsets(num_layers);
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < num_layers; ++l) {
    offsets[l] = off;
    const Eigen::Index rows = sizes[l + 1];
    const Eigen::Index cols = sizes[l];
    Eigen::Map<const Eigen::MatrixXd> w(params.data() + off, rows, cols);
    Eigen::Map<const Eigen::VectorXd> b(params.data() + off + rows * cols, rows);
    Eigen::MatrixXd z = (w * acts.back()).colwise() + b;
    if (l + 1 < num_layers) z = z.array().tanh();
    acts.push_back(std::move(z));
    off += rows * cols + rows;
  }

  const double mean_loss = softmax_ce(acts.back(), y, spec_.num_classes);

  grad.setZero(param_count());
  Eigen::MatrixXd delta = acts.back();
  for (Eigen::Index s = 0; s < batch; ++s) delta(y[s], s) -= 1.0;
  delta /= static_cast<double>(batch);

  for (std::size_t l = num_layers; l-- > 0;) {
    const Eigen::Index rows = sizes[l + 1];
    const Eigen::Index cols = sizes[l];
    Eigen::Map<Eigen::MatrixXd> dw(grad.data() + offsets[l], rows, cols);
    Eigen::Map<Eigen::VectorXd> db(grad.data() + offsets[l] + rows * cols, rows);
    dw = delta * acts[l].transpose();
    db = delta.rowwise().sum();
    if (l > 0) {
      Eigen::Map<const Eigen::MatrixXd> w(params.data() + offsets[l], rows, cols);
      delta = (w.transpose() * delta).cwiseProduct((1.0 - acts[l].array().square()).matrix());
    }
  }
  return mean_loss;
}

int MlpModel::predict(const RealVector& params, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::MatrixXd logits = forward_logits(spec_, params, x);
  int best = 0;
  for (Eigen::Index c = 1; c < logits.rows(); ++c) {
    if (logits(c, 0) > logits(best, 0)) best = static_cast<int>(c);
  }
  return best;
}

double MlpModel::accuracy(const RealVector& params, const Dataset& data) const {
  check_shapes(spec_, params, data.features);
  const Eigen::MatrixXd logits = forward_logits(spec_, params, data.features);
  Eigen::Index correct = 0;
  for (Eigen::Index s = 0; s < logits.cols(); ++s) {
    int best = 0;
    for (Eigen::Index c = 1; c < logits.rows(); ++c) {
      if (logits(c, s) > logits(best, s)) best = static_cast<int>(c);
    }
    if (best == data.labels[s]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.cols());
}

}  // namespace otafl

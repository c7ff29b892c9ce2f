// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otafl {

std::string design_name(DesignKind kind) {
  switch (kind) {
    case DesignKind::case1_uncompressed:
      return "case1_uncompressed";
    case DesignKind::case2_sparse_reduced:
      return "case2_sparse_reduced";
    case DesignKind::case3_sparse_compressed:
      return "case3_sparse_compressed";
    case DesignKind::case4_compressed_only:
      return "case4_compressed_only";
  }
  throw std::logic_error("design_name: unknown kind");
}

DesignKind parse_design_kind(const std::string& name) {
  if (name == "case1_uncompressed") return DesignKind::case1_uncompressed;
  if (name == "case2_sparse_reduced") return DesignKind::case2_sparse_reduced;
  if (name == "case3_sparse_compressed") return DesignKind::case3_sparse_compressed;
  if (name == "case4_compressed_only") return DesignKind::case4_compressed_only;
  throw std::invalid_argument("unknown design kind: " + name);
}

std::string mask_mode_name(MaskMode mode) {
  switch (mode) {
    case MaskMode::top_l:
      return "top_l";
    case MaskMode::uniform_identical:
      return "uniform_identical";
  }
  throw std::logic_error("mask_mode_name: unknown mode");
}

MaskMode parse_mask_mode(const std::string& name) {
  if (name == "top_l") return MaskMode::top_l;
  if (name == "uniform_identical") return MaskMode::uniform_identical;
  throw std::invalid_argument("unknown mask mode: " + name);
}

bool design_needs_matrix(DesignKind kind) {
  return kind == DesignKind::case3_sparse_compressed || kind == DesignKind::case4_compressed_only;
}

Eigen::Index design_channel_uses(const DesignSpec& design, Eigen::Index n_baseband) {
  switch (design.kind) {
    case DesignKind::case1_uncompressed:
      return n_baseband;
    case DesignKind::case2_sparse_reduced:
      return design.sparsity_l;
    case DesignKind::case3_sparse_compressed:
    case DesignKind::case4_compressed_only:
      return design.compressed_m;
  }
  throw std::logic_error("design_channel_uses: unknown kind");
}

void validate_design(const DesignSpec& design, Eigen::Index n_baseband) {
  const bool uses_sparsity = design.kind != DesignKind::case1_uncompressed;
  if (uses_sparsity && (design.sparsity_l < 1 || design.sparsity_l > n_baseband)) {
    throw std::invalid_argument("design: need 1 <= L <= N");
  }
  if (design_needs_matrix(design.kind)) {
    if (design.compressed_m < 1 || design.compressed_m >= n_baseband) {
      throw std::invalid_argument("design: need 1 <= M < N");
    }
    if (design.iht_epsilon_rel <= 0.0) {
      throw std::invalid_argument("design: iht_epsilon_rel must be positive");
    }
    if (design.iht_max_iters < 1) {
      throw std::invalid_argument("design: iht_max_iters must be at least 1");
    }
  }
}

std::pair<RealVector, RoundMetrics> run_round(const DesignSpec& design, const SimState& state,
                                              const RealVector& theta, int round) {
  const Eigen::Index d = theta.size();
  const Eigen::Index n = baseband_length(d);
  validate_design(design, n);
  if (design_needs_matrix(design.kind)) {
    if (state.matrix == nullptr) {
      throw std::invalid_argument("run_round: design requires a measurement matrix");
    }
    if (state.matrix->entries.rows() != design.compressed_m ||
        state.matrix->entries.cols() != n) {
      throw std::invalid_argument("run_round: measurement matrix shape mismatch");
    }
  }
  if (state.k_per_round < 1 || static_cast<std::size_t>(state.k_per_round) > state.parts.size()) {
    throw std::invalid_argument("run_round: need 1 <= K <= K_total");
  }

  RoundMetrics metrics;
  metrics.round = round;
  metrics.channel_uses = design_channel_uses(design, n);
  metrics.report.budget = state.channel.p_tot;

  const std::string rtag = std::to_string(round);
  auto select_rng = state.streams.make("select:r" + rtag);
  const auto selected =
      select_devices(select_rng, static_cast<int>(state.parts.size()), state.k_per_round);
  const auto weights = renormalize_weights(state.parts, selected);

  std::vector<RealVector> deltas;
  deltas.reserve(selected.size());
  for (const int dev : selected) {
    auto sgd_rng = state.streams.make("sgd:r" + rtag + ":d" + std::to_string(dev));
    deltas.push_back(local_update(state.model, theta, state.train,
                                  state.parts[static_cast<std::size_t>(dev)], state.sgd,
                                  sgd_rng));
  }

  RealVector truth = RealVector::Zero(d);
  for (std::size_t i = 0; i < selected.size(); ++i) truth += weights[i] * deltas[i];

  auto channel_rng = state.streams.make("channel:r" + rtag);
  const auto gains = draw_channels(channel_rng, selected.size());
  const auto active = truncate(gains, state.channel.h_th, state.channel.threshold_on_power);

  if (active.empty()) {
    metrics.skipped = true;
    metrics.accuracy = state.model.accuracy(theta, state.test);
    return {theta, metrics};
  }

  std::vector<double> tx_weights;
  std::vector<std::complex<double>> tx_gains;
  tx_weights.reserve(active.size());
  tx_gains.reserve(active.size());
  for (const std::size_t i : active) {
    tx_weights.push_back(weights[i]);
    tx_gains.push_back(gains[i]);
  }
  if (state.channel.renormalize_truncated) {
    double sum = 0.0;
    for (const double w : tx_weights) sum += w;
    for (double& w : tx_weights) w /= sum;
  }

  const auto l = static_cast<std::size_t>(design.sparsity_l);
  Support mask;
  std::vector<BasebandVector> signals(active.size());
  switch (design.kind) {
    case DesignKind::case1_uncompressed:
      for (std::size_t i = 0; i < active.size(); ++i) {
        signals[i] = to_baseband(deltas[active[i]]);
      }
      break;
    case DesignKind::case2_sparse_reduced: {
      if (design.mask_mode == MaskMode::uniform_identical) {
        auto mask_rng = state.streams.make("mask:r" + rtag);
        mask = uniform_support(mask_rng, n, l);
      } else {
        mask = top_l_support(to_baseband(truth), l);
      }
      for (std::size_t i = 0; i < active.size(); ++i) {
        signals[i] = reduce(apply_mask(to_baseband(deltas[active[i]]), mask)).values;
      }
      break;
    }
    case DesignKind::case3_sparse_compressed: {
      if (design.mask_mode == MaskMode::uniform_identical) {
        auto mask_rng = state.streams.make("mask:r" + rtag);
        mask = uniform_support(mask_rng, n, l);
      }
      for (std::size_t i = 0; i < active.size(); ++i) {
        const BasebandVector s = to_baseband(deltas[active[i]]);
        const Support support =
            design.mask_mode == MaskMode::uniform_identical ? mask : top_l_support(s, l);
        signals[i] = compress(*state.matrix, apply_mask(s, support).dense);
      }
      break;
    }
    case DesignKind::case4_compressed_only:
      for (std::size_t i = 0; i < active.size(); ++i) {
        signals[i] = compress(*state.matrix, to_baseband(deltas[active[i]]));
      }
      break;
  }

  std::vector<double> norms;
  norms.reserve(signals.size());
  for (const auto& s : signals) norms.push_back(s.norm());
  const double eta = compute_eta(state.channel.p_tot, tx_weights, tx_gains, norms);

  auto noise_rng = state.streams.make("noise:r" + rtag);
  auto [received, report] = ota_round(signals, tx_weights, tx_gains, eta, state.channel.sigma2,
                                      state.channel.p_tot, noise_rng);
  metrics.eta = eta;
  metrics.report = std::move(report);

  const BasebandVector estimate = ota_estimate(received, eta);

  RealVector delta_hat;
  switch (design.kind) {
    case DesignKind::case1_uncompressed:
      delta_hat = from_baseband(estimate, d);
      break;
    case DesignKind::case2_sparse_reduced: {
      BasebandVector full = expand(ReducedVector{estimate, mask}, n);
      if (design.debias_uniform && design.mask_mode == MaskMode::uniform_identical) {
        full *= static_cast<double>(n) / static_cast<double>(design.sparsity_l);
      }
      delta_hat = from_baseband(full, d);
      break;
    }
    case DesignKind::case3_sparse_compressed:
    case DesignKind::case4_compressed_only: {
      IhtConfig cfg;
      cfg.sparsity_l = l;
      cfg.epsilon = default_iht_epsilon(estimate, design.iht_epsilon_rel);
      cfg.max_iters = design.iht_max_iters;
      const IhtResult res = iht_reconstruct(*state.matrix, estimate, cfg);
      metrics.iht_iterations = res.iterations;
      metrics.iht_converged = res.converged;
      delta_hat = from_baseband(res.estimate.dense, d);
      break;
    }
  }

  if (truth.squaredNorm() > 0.0) metrics.agg_nmse = agg_nmse(truth, delta_hat);

  RealVector next_theta = apply_aggregate(theta, delta_hat);
  metrics.accuracy = state.model.accuracy(next_theta, state.test);
  return {std::move(next_theta), metrics};
}

double agg_nmse(const RealVector& truth, const RealVector& estimate) {
  if (truth.size() != estimate.size()) {
    throw std::invalid_argument("agg_nmse: dimension mismatch");
  }
  const double denom = truth.squaredNorm();
  if (denom <= 0.0) throw std::invalid_argument("agg_nmse: zero-norm truth");
  return (estimate - truth).squaredNorm() / denom;
}

double Histogram::zero_fraction() const {
  return total == 0 ? 0.0 : static_cast<double>(zero_count) / static_cast<double>(total);
}

Histogram update_histogram(const RealVector& values, const std::vector<double>& edges) {
  if (edges.size() < 2) throw std::invalid_argument("update_histogram: need at least two edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) {
      throw std::invalid_argument("update_histogram: edges must be strictly increasing");
    }
  }
  Histogram h;
  h.edges = edges;
  h.counts.assign(edges.size() - 1, 0);
  h.total = values.size();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (v == 0.0) {
      ++h.zero_count;
      continue;
    }
    if (v == edges.back()) {
      ++h.counts.back();
      continue;
    }
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    if (it == edges.begin() || it == edges.end()) continue;
    ++h.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
  }
  return h;
}

}  // namespace otafl

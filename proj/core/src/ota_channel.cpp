// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/ota_channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace otafl {

std::vector<std::complex<double>> draw_channels(RngStream& rng, std::size_t k) {
  if (k < 1) throw std::invalid_argument("draw_channels: need at least one device");
  std::vector<std::complex<double>> gains(k);
  for (auto& h : gains) h = rng.normal_complex(1.0);
  return gains;
}

std::vector<std::size_t> truncate(const std::vector<std::complex<double>>& gains, double h_th,
                                  bool on_power) {
  if (h_th < 0.0) throw std::invalid_argument("truncate: negative threshold");
  std::vector<std::size_t> active;
  active.reserve(gains.size());
  for (std::size_t k = 0; k < gains.size(); ++k) {
    const double mag = on_power ? std::norm(gains[k]) : std::abs(gains[k]);
    if (mag >= h_th) active.push_back(k);
  }
  return active;
}

double compute_eta(double p_tot, const std::vector<double>& weights,
                   const std::vector<std::complex<double>>& gains,
                   const std::vector<double>& signal_norms) {
  if (!(p_tot > 0.0)) throw std::invalid_argument("compute_eta: total power must be positive");
  if (weights.size() != gains.size() || weights.size() != signal_norms.size()) {
    throw std::invalid_argument("compute_eta: mismatched input lengths");
  }
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (signal_norms[k] == 0.0) continue;
    min_ratio = std::min(min_ratio, std::abs(gains[k]) / (weights[k] * signal_norms[k]));
  }
  if (!std::isfinite(min_ratio)) min_ratio = 1.0;  // nothing transmitted
  return std::sqrt(p_tot) * min_ratio;
}

std::pair<BasebandVector, TransmitReport> ota_round(const std::vector<BasebandVector>& signals,
                                                    const std::vector<double>& weights,
                                                    const std::vector<std::complex<double>>& gains,
                                                    double eta, double sigma2, double p_tot,
                                                    RngStream& noise_rng) {
  if (signals.empty()) throw std::invalid_argument("ota_round: no active signals");
  if (signals.size() != weights.size() || signals.size() != gains.size()) {
    throw std::invalid_argument("ota_round: mismatched input lengths");
  }
  const Eigen::Index len = signals.front().size();
  for (const auto& s : signals) {
    if (s.size() != len) throw std::invalid_argument("ota_round: signals differ in length");
  }
  if (sigma2 < 0.0) throw std::invalid_argument("ota_round: negative noise variance");

  TransmitReport report;
  report.budget = p_tot;
  report.per_device_energy.resize(signals.size());

  BasebandVector received = BasebandVector::Zero(len);
  for (std::size_t k = 0; k < signals.size(); ++k) {
    const std::complex<double> inv = eta * weights[k] / gains[k];
    const BasebandVector tx = signals[k] * inv;
    const double energy = tx.squaredNorm();
    report.per_device_energy[k] = energy;
    if (energy > p_tot * (1.0 + 1e-9)) {
      throw std::runtime_error("ota_round: device exceeds transmit power budget");
    }
    received += gains[k] * tx;
  }
  if (sigma2 > 0.0) {
    for (Eigen::Index j = 0; j < len; ++j) {
      received[j] += noise_rng.normal_complex(sigma2);
    }
  }
  return {std::move(received), std::move(report)};
}

BasebandVector ota_estimate(const BasebandVector& y, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("ota_estimate: eta must be positive");
  return y / eta;
}

}  // namespace otafl

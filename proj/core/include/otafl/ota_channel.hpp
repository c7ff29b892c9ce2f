// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "otafl/baseband.hpp"
#include "otafl/rng.hpp"

namespace otafl {

/// Channel state for one aggregation round over the fading multiple-access
/// channel. Gains are block fading: drawn once per round and constant across
/// the round's symbols (per-symbol fading would break single-eta inversion).
struct ChannelRound {
  std::vector<std::complex<double>> gains;  // aligned with active_set
  std::vector<std::size_t> active_set;      // device slots surviving truncation
  double eta = 0.0;
  double noise_var = 0.0;
  double total_power = 0.0;
  Eigen::Index symbol_count = 0;  // channel uses consumed this round
};

/// Exact per-device transmit energies ||psi_k(s_k)||^2 against the budget.
struct TransmitReport {
  std::vector<double> per_device_energy;
  double budget = 0.0;
};

/// k i.i.d. CN(0,1) gains (real and imaginary parts N(0, 1/2)).
std::vector<std::complex<double>> draw_channels(RngStream& rng, std::size_t k);

/// Indices with |h| >= h_th (or |h|^2 >= h_th when on_power is set).
/// An empty result means every device was dropped: the round is skipped.
std::vector<std::size_t> truncate(const std::vector<std::complex<double>>& gains, double h_th,
                                  bool on_power = false);

/// Amplitude scaling factor
///   eta = sqrt(p_tot) * min_k |h_k| / (w_k ||s_k||),
/// taken over devices with non-zero signal norm (a silent device cannot be
/// the power bottleneck). If every norm is zero nothing is transmitted and
/// eta is sqrt(p_tot). Inputs are aligned over the active set.
double compute_eta(double p_tot, const std::vector<double>& weights,
                   const std::vector<std::complex<double>>& gains,
                   const std::vector<double>& signal_norms);

/// One over-the-air aggregation: each device pre-scales its signal by
/// eta * w_k / h_k (channel inversion), the channel sums the faded signals
/// and adds elementwise CN(0, sigma2) noise. With sigma2 = 0 the received
/// vector equals eta * sum_k w_k s_k exactly (up to rounding).
/// Throws if any device's transmit energy exceeds p_tot * (1 + 1e-9), which
/// would mean eta was computed against the wrong norms.
std::pair<BasebandVector, TransmitReport> ota_round(const std::vector<BasebandVector>& signals,
                                                    const std::vector<double>& weights,
                                                    const std::vector<std::complex<double>>& gains,
                                                    double eta, double sigma2, double p_tot,
                                                    RngStream& noise_rng);

/// Post-processing at the server: y / eta.
BasebandVector ota_estimate(const BasebandVector& y, double eta);

}  // namespace otafl

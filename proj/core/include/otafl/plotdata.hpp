// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace otafl {

/// One parsed experiment-CSV row.
struct MetricsRow {
  int round = 0;
  long long channel_uses = 0;
  long long cum_channel_uses = 0;
  double accuracy = 0.0;
  std::optional<double> agg_nmse;
  std::optional<double> eta;
  std::optional<int> iht_iters;
  std::optional<bool> converged;
  bool skipped = false;
  std::uint64_t seed = 0;
};

/// Reads an experiment CSV, rejecting any file whose header deviates from
/// the canonical schema.
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

/// Gnuplot-ready tables (whitespace-separated columns, # header).  Rows from
/// all input files are pooled and grouped by seed; multi-seed data reduces
/// to mean plus a min/max band per x value.
std::string plot_vs_round(const std::vector<std::string>& csv_paths);
std::string plot_vs_channel_uses(const std::vector<std::string>& csv_paths);

/// Averages histogram dump files (bin_center density); bin centers must
/// agree across inputs.
std::string plot_histogram(const std::vector<std::string>& histogram_paths);

/// Dispatch on mode: vs_round, vs_channel_uses, or histogram.
std::string emit_plotdata(const std::string& mode, const std::vector<std::string>& paths);

}  // namespace otafl

// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/plotdata.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "otafl/experiment.hpp"

namespace otafl {

namespace {

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

using SeedSeries = std::map<std::uint64_t, std::vector<MetricsRow>>;

SeedSeries group_by_seed(const std::vector<std::string>& csv_paths) {
  if (csv_paths.empty()) throw std::invalid_argument("plotdata: no input files");
  SeedSeries by_seed;
  for (const auto& path : csv_paths) {
    for (auto& row : read_metrics_csv(path)) by_seed[row.seed].push_back(row);
  }
  for (auto& [seed, rows] : by_seed) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const MetricsRow& a, const MetricsRow& b) { return a.round < b.round; });
  }
  const auto& first = by_seed.begin()->second;
  for (const auto& [seed, rows] : by_seed) {
    if (rows.size() != first.size()) {
      throw std::runtime_error("plotdata: seeds cover different numbers of rounds");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].round != first[i].round) {
        throw std::runtime_error("plotdata: seeds cover different round sets");
      }
    }
  }
  return by_seed;
}

struct Band {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

Band accuracy_band(const SeedSeries& by_seed, std::size_t i) {
  Band band;
  bool first = true;
  for (const auto& [seed, rows] : by_seed) {
    const double a = rows[i].accuracy;
    band.mean += a;
    band.lo = first ? a : std::min(band.lo, a);
    band.hi = first ? a : std::max(band.hi, a);
    first = false;
  }
  band.mean /= static_cast<double>(by_seed.size());
  return band;
}

}  // namespace

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("plotdata: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("plotdata: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != metrics_csv_header()) {
    throw std::runtime_error("plotdata: " + path + " does not match the experiment CSV schema");
  }

  std::vector<MetricsRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10) {
      throw std::runtime_error("plotdata: " + path + ":" + std::to_string(lineno) +
                               ": expected 10 fields");
    }
    try {
      MetricsRow row;
      row.round = std::stoi(f[0]);
      row.channel_uses = std::stoll(f[1]);
      row.cum_channel_uses = std::stoll(f[2]);
      row.accuracy = std::stod(f[3]);
      if (!f[4].empty()) row.agg_nmse = std::stod(f[4]);
      if (!f[5].empty()) row.eta = std::stod(f[5]);
      if (!f[6].empty()) row.iht_iters = std::stoi(f[6]);
      if (!f[7].empty()) row.converged = std::stoi(f[7]) != 0;
      row.skipped = std::stoi(f[8]) != 0;
      row.seed = std::stoull(f[9]);
      rows.push_back(row);
    } catch (const std::exception&) {
      throw std::runtime_error("plotdata: " + path + ":" + std::to_string(lineno) +
                               ": malformed row");
    }
  }
  return rows;
}

std::string plot_vs_round(const std::vector<std::string>& csv_paths) {
  const SeedSeries by_seed = group_by_seed(csv_paths);
  std::ostringstream out;
  out << "# round accuracy_mean accuracy_min accuracy_max\n";
  const std::size_t rounds = by_seed.begin()->second.size();
  for (std::size_t i = 0; i < rounds; ++i) {
    const Band band = accuracy_band(by_seed, i);
    out << by_seed.begin()->second[i].round << " " << fmt_real(band.mean) << " "
        << fmt_real(band.lo) << " " << fmt_real(band.hi) << "\n";
  }
  return out.str();
}

std::string plot_vs_channel_uses(const std::vector<std::string>& csv_paths) {
  const SeedSeries by_seed = group_by_seed(csv_paths);
  const std::size_t rounds = by_seed.begin()->second.size();
  for (const auto& [seed, rows] : by_seed) {
    for (std::size_t i = 0; i < rounds; ++i) {
      if (rows[i].cum_channel_uses != by_seed.begin()->second[i].cum_channel_uses) {
        throw std::runtime_error("plotdata: seeds disagree on cumulative channel uses");
      }
    }
  }
  std::ostringstream out;
  out << "# cum_channel_uses accuracy_mean accuracy_min accuracy_max\n";
  for (std::size_t i = 0; i < rounds; ++i) {
    const Band band = accuracy_band(by_seed, i);
    out << by_seed.begin()->second[i].cum_channel_uses << " " << fmt_real(band.mean) << " "
        << fmt_real(band.lo) << " " << fmt_real(band.hi) << "\n";
  }
  return out.str();
}

std::string plot_histogram(const std::vector<std::string>& histogram_paths) {
  if (histogram_paths.empty()) throw std::invalid_argument("plotdata: no input files");
  std::vector<double> centers;
  std::vector<std::vector<double>> densities;
  double zero_mass_sum = 0.0;
  std::size_t zero_mass_count = 0;

  for (std::size_t p = 0; p < histogram_paths.size(); ++p) {
    std::ifstream in(histogram_paths[p]);
    if (!in) throw std::runtime_error("plotdata: cannot open " + histogram_paths[p]);
    std::vector<double> file_centers;
    std::vector<double> file_density;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        std::stringstream ss(line);
        std::string hash, tag;
        double v = 0.0;
        if (ss >> hash >> tag >> v && tag == "zero_mass") {
          zero_mass_sum += v;
          ++zero_mass_count;
        }
        continue;
      }
      std::stringstream ss(line);
      double center = 0.0;
      double density = 0.0;
      if (!(ss >> center >> density)) {
        throw std::runtime_error("plotdata: malformed histogram row in " + histogram_paths[p]);
      }
      file_centers.push_back(center);
      file_density.push_back(density);
    }
    if (p == 0) {
      centers = file_centers;
      densities.assign(centers.size(), {});
    } else if (file_centers != centers) {
      throw std::runtime_error("plotdata: histogram bin centers differ across inputs");
    }
    for (std::size_t b = 0; b < centers.size(); ++b) densities[b].push_back(file_density[b]);
  }

  std::ostringstream out;
  if (zero_mass_count > 0) {
    out << "# zero_mass " << fmt_real(zero_mass_sum / static_cast<double>(zero_mass_count))
        << "\n";
  }
  out << "# bin_center density_mean density_min density_max\n";
  for (std::size_t b = 0; b < centers.size(); ++b) {
    double mean = 0.0;
    double lo = densities[b].front();
    double hi = densities[b].front();
    for (const double v : densities[b]) {
      mean += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    mean /= static_cast<double>(densities[b].size());
    out << fmt_real(centers[b]) << " " << fmt_real(mean) << " " << fmt_real(lo) << " "
        << fmt_real(hi) << "\n";
  }
  return out.str();
}

std::string emit_plotdata(const std::string& mode, const std::vector<std::string>& paths) {
  if (mode == "vs_round") return plot_vs_round(paths);
  if (mode == "vs_channel_uses") return plot_vs_channel_uses(paths);
  if (mode == "histogram") return plot_histogram(paths);
  throw std::invalid_argument("plotdata: unknown mode '" + mode +
                              "' (expected vs_round, vs_channel_uses, or histogram)");
}

}  // namespace otafl

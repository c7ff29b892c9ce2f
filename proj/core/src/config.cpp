// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace otafl {

std::string dataset_kind_name(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::synthetic:
      return "synthetic";
    case DatasetKind::mnist:
      return "mnist";
  }
  throw std::logic_error("dataset_kind_name: unknown kind");
}

DatasetKind parse_dataset_kind(const std::string& name) {
  if (name == "synthetic") return DatasetKind::synthetic;
  if (name == "mnist") return DatasetKind::mnist;
  throw std::invalid_argument("unknown dataset kind: " + name);
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw std::invalid_argument("key '" + key + "': expected " + expected + ", got '" + value +
                              "'");
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos == value.size()) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, value, "a number");
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos == value.size()) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, value, "an integer");
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos == value.size() && value.find('-') == std::string::npos) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, value, "an unsigned integer");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  if (trim(value).empty()) return parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  return parts;
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_bool(bool v) { return v ? "true" : "false"; }

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  const auto fail = [&origin, &lineno](const std::string& msg) -> void {
    throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (!seen.insert(key).second) fail("duplicate key '" + key + "'");

    bool known = true;
    try {
      if (key == "design") {
        cfg.design.kind = parse_design_kind(value);
      } else if (key == "sparsity_l") {
        cfg.design.sparsity_l = parse_int(key, value);
      } else if (key == "compressed_m") {
        cfg.design.compressed_m = parse_int(key, value);
      } else if (key == "mask_mode") {
        cfg.design.mask_mode = parse_mask_mode(value);
      } else if (key == "iht_epsilon_rel") {
        cfg.design.iht_epsilon_rel = parse_real(key, value);
      } else if (key == "iht_max_iters") {
        cfg.design.iht_max_iters = static_cast<int>(parse_int(key, value));
      } else if (key == "debias_uniform") {
        cfg.design.debias_uniform = parse_bool(key, value);
      } else if (key == "k_total") {
        cfg.k_total = static_cast<int>(parse_int(key, value));
      } else if (key == "k_per_round") {
        cfg.k_per_round = static_cast<int>(parse_int(key, value));
      } else if (key == "p_tot") {
        cfg.channel.p_tot = parse_real(key, value);
      } else if (key == "sigma2") {
        cfg.channel.sigma2 = parse_real(key, value);
      } else if (key == "h_th") {
        cfg.channel.h_th = parse_real(key, value);
      } else if (key == "h_th_on_power") {
        cfg.channel.threshold_on_power = parse_bool(key, value);
      } else if (key == "renormalize_truncated") {
        cfg.channel.renormalize_truncated = parse_bool(key, value);
      } else if (key == "rounds") {
        cfg.rounds = static_cast<int>(parse_int(key, value));
      } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& item : split_list(value)) cfg.seeds.push_back(parse_u64(key, item));
      } else if (key == "matrix_c") {
        cfg.matrix_c = parse_real(key, value);
      } else if (key == "matrix_per_round") {
        cfg.matrix_per_round = parse_bool(key, value);
      } else if (key == "model_input_dim") {
        cfg.model.input_dim = parse_int(key, value);
      } else if (key == "model_hidden") {
        cfg.model.hidden.clear();
        for (const auto& item : split_list(value)) cfg.model.hidden.push_back(parse_int(key, item));
      } else if (key == "model_classes") {
        cfg.model.num_classes = static_cast<int>(parse_int(key, value));
      } else if (key == "dataset") {
        cfg.dataset = parse_dataset_kind(value);
      } else if (key == "mnist_dir") {
        cfg.mnist_dir = value;
      } else if (key == "train_samples") {
        cfg.train_samples = parse_int(key, value);
      } else if (key == "test_samples") {
        cfg.test_samples = parse_int(key, value);
      } else if (key == "synthetic_noise") {
        cfg.synthetic_noise = parse_real(key, value);
      } else if (key == "synthetic_seed") {
        cfg.synthetic_seed = parse_u64(key, value);
      } else if (key == "shards_per_device") {
        cfg.shards_per_device = static_cast<int>(parse_int(key, value));
      } else if (key == "lr") {
        cfg.sgd.lr = parse_real(key, value);
      } else if (key == "batch") {
        cfg.sgd.batch = parse_int(key, value);
      } else if (key == "local_epochs") {
        cfg.sgd.local_epochs = static_cast<int>(parse_int(key, value));
      } else if (key == "output") {
        cfg.output = value;
      } else if (key == "energy_log") {
        cfg.energy_log = value;
      } else if (key == "histogram_out") {
        cfg.histogram_out = value;
      } else if (key == "histogram_accuracy") {
        cfg.histogram_accuracy = parse_real(key, value);
      } else if (key == "histogram_bins") {
        cfg.histogram_bins = static_cast<int>(parse_int(key, value));
      } else if (key == "matrix_dump") {
        cfg.matrix_dump = value;
      } else {
        known = false;
      }
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    if (!known) fail("unknown key '" + key + "'");
  }

  if (!seen.count("design")) {
    throw std::invalid_argument(origin + ": missing required key 'design'");
  }
  if (!seen.count("output")) {
    throw std::invalid_argument(origin + ": missing required key 'output'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  ExperimentConfig cfg = parse_config(in, path);
  validate_config(cfg);
  return cfg;
}

std::string config_to_string(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# communication design\n";
  out << "design = " << design_name(cfg.design.kind) << "\n";
  out << "sparsity_l = " << cfg.design.sparsity_l << "\n";
  out << "compressed_m = " << cfg.design.compressed_m << "\n";
  out << "mask_mode = " << mask_mode_name(cfg.design.mask_mode) << "\n";
  out << "iht_epsilon_rel = " << fmt_real(cfg.design.iht_epsilon_rel) << "\n";
  out << "iht_max_iters = " << cfg.design.iht_max_iters << "\n";
  out << "debias_uniform = " << fmt_bool(cfg.design.debias_uniform) << "\n";
  out << "\n# population and channel\n";
  out << "k_total = " << cfg.k_total << "\n";
  out << "k_per_round = " << cfg.k_per_round << "\n";
  out << "p_tot = " << fmt_real(cfg.channel.p_tot) << "\n";
  out << "sigma2 = " << fmt_real(cfg.channel.sigma2) << "\n";
  out << "h_th = " << fmt_real(cfg.channel.h_th) << "\n";
  out << "h_th_on_power = " << fmt_bool(cfg.channel.threshold_on_power) << "\n";
  out << "renormalize_truncated = " << fmt_bool(cfg.channel.renormalize_truncated) << "\n";
  out << "\n# schedule\n";
  out << "rounds = " << cfg.rounds << "\n";
  out << "seeds = ";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    if (i > 0) out << ",";
    out << cfg.seeds[i];
  }
  out << "\n";
  out << "matrix_c = " << fmt_real(cfg.matrix_c) << "\n";
  out << "matrix_per_round = " << fmt_bool(cfg.matrix_per_round) << "\n";
  out << "\n# model\n";
  out << "model_input_dim = " << cfg.model.input_dim << "\n";
  out << "model_hidden = ";
  for (std::size_t i = 0; i < cfg.model.hidden.size(); ++i) {
    if (i > 0) out << ",";
    out << cfg.model.hidden[i];
  }
  out << "\n";
  out << "model_classes = " << cfg.model.num_classes << "\n";
  out << "\n# data\n";
  out << "dataset = " << dataset_kind_name(cfg.dataset) << "\n";
  out << "mnist_dir = " << cfg.mnist_dir << "\n";
  out << "train_samples = " << cfg.train_samples << "\n";
  out << "test_samples = " << cfg.test_samples << "\n";
  out << "synthetic_noise = " << fmt_real(cfg.synthetic_noise) << "\n";
  out << "synthetic_seed = " << cfg.synthetic_seed << "\n";
  out << "shards_per_device = " << cfg.shards_per_device << "\n";
  out << "\n# local training\n";
  out << "lr = " << fmt_real(cfg.sgd.lr) << "\n";
  out << "batch = " << cfg.sgd.batch << "\n";
  out << "local_epochs = " << cfg.sgd.local_epochs << "\n";
  out << "\n# outputs\n";
  out << "output = " << cfg.output << "\n";
  out << "energy_log = " << cfg.energy_log << "\n";
  out << "histogram_out = " << cfg.histogram_out << "\n";
  out << "histogram_accuracy = " << fmt_real(cfg.histogram_accuracy) << "\n";
  out << "histogram_bins = " << cfg.histogram_bins << "\n";
  out << "matrix_dump = " << cfg.matrix_dump << "\n";
  return out.str();
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_config: cannot open " + path);
  out << config_to_string(cfg);
  if (!out) throw std::runtime_error("save_config: write failed for " + path);
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  if (cfg.k_total < 1) throw std::invalid_argument("config: k_total must be at least 1");
  if (cfg.k_per_round < 1 || cfg.k_per_round > cfg.k_total) {
    throw std::invalid_argument("config: need 1 <= k_per_round <= k_total");
  }
  if (cfg.channel.p_tot <= 0.0) throw std::invalid_argument("config: p_tot must be positive");
  if (cfg.channel.sigma2 < 0.0) throw std::invalid_argument("config: sigma2 must be >= 0");
  if (cfg.channel.h_th < 0.0) throw std::invalid_argument("config: h_th must be >= 0");
  if (cfg.rounds < 0) throw std::invalid_argument("config: rounds must be >= 0");
  if (cfg.seeds.empty()) throw std::invalid_argument("config: seeds must not be empty");
  if (cfg.matrix_c <= 1.0) throw std::invalid_argument("config: matrix_c must exceed 1");
  if (cfg.model.input_dim < 1) throw std::invalid_argument("config: model_input_dim must be >= 1");
  if (cfg.model.num_classes < 2) throw std::invalid_argument("config: model_classes must be >= 2");
  for (const auto h : cfg.model.hidden) {
    if (h < 1) throw std::invalid_argument("config: model_hidden widths must be >= 1");
  }
  if (cfg.train_samples < 1) throw std::invalid_argument("config: train_samples must be >= 1");
  if (cfg.test_samples < 1) throw std::invalid_argument("config: test_samples must be >= 1");
  if (cfg.synthetic_noise < 0.0) {
    throw std::invalid_argument("config: synthetic_noise must be >= 0");
  }
  if (cfg.shards_per_device < 1) {
    throw std::invalid_argument("config: shards_per_device must be >= 1");
  }
  const Eigen::Index shards =
      static_cast<Eigen::Index>(cfg.k_total) * static_cast<Eigen::Index>(cfg.shards_per_device);
  if (cfg.train_samples % shards != 0) {
    throw std::invalid_argument(
        "config: train_samples must divide into k_total * shards_per_device shards");
  }
  if (cfg.sgd.lr <= 0.0) throw std::invalid_argument("config: lr must be positive");
  if (cfg.sgd.batch < 1) throw std::invalid_argument("config: batch must be >= 1");
  if (cfg.sgd.local_epochs < 1) throw std::invalid_argument("config: local_epochs must be >= 1");
  if (cfg.output.empty()) throw std::invalid_argument("config: output path must not be empty");
  if (cfg.histogram_accuracy < 0.0 || cfg.histogram_accuracy > 1.0) {
    throw std::invalid_argument("config: histogram_accuracy must be in [0, 1]");
  }
  if (cfg.histogram_bins < 1) throw std::invalid_argument("config: histogram_bins must be >= 1");

  validate_design(cfg.design, baseband_length(cfg.model.param_count()));

  std::vector<std::string> warnings;
  if (design_needs_matrix(cfg.design.kind) && cfg.design.compressed_m <= cfg.design.sparsity_l) {
    warnings.push_back("compressed_m <= sparsity_l: reconstruction is underdetermined (M > L "
                       "is the usual rule of thumb)");
  }
  return warnings;
}

}  // namespace otafl

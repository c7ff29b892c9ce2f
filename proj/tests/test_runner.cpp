// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "otafl/config.hpp"
#include "otafl/experiment.hpp"
#include "otafl/plotdata.hpp"

using namespace otafl;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;

  TempDir() {
    path = fs::temp_directory_path() /
           ("otafl_runner_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }

  static int& counter() {
    static int c = 0;
    return c;
  }
};

ExperimentConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "inline");
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Small, fast experiment on a 170-parameter model. The caller picks the
// design and noise level.
ExperimentConfig toy_config(const TempDir& dir, DesignKind kind) {
  ExperimentConfig cfg;
  cfg.design.kind = kind;
  cfg.design.sparsity_l = 20;
  cfg.design.compressed_m = 40;
  cfg.k_total = 10;
  cfg.k_per_round = 4;
  cfg.rounds = 5;
  cfg.seeds = {5};
  cfg.model = MlpSpec{16, {}, 10};
  cfg.train_samples = 160;
  cfg.test_samples = 40;
  cfg.synthetic_noise = 0.3;
  cfg.sgd.lr = 0.05;
  cfg.sgd.batch = 8;
  cfg.channel.p_tot = 100.0;
  cfg.channel.sigma2 = 0.1;
  cfg.output = dir.file("metrics.csv");
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

}  // namespace

TEST_CASE("config defaults match the reference operating point") {
  const ExperimentConfig cfg;
  CHECK(cfg.k_total == 100);
  CHECK(cfg.k_per_round == 10);
  CHECK(cfg.channel.p_tot == 1000.0);
  CHECK(cfg.channel.sigma2 == 1.0);
  CHECK(cfg.design.sparsity_l == 500);
  CHECK(cfg.design.compressed_m == 1000);
  CHECK(cfg.sgd.lr == 0.01);
  CHECK(cfg.sgd.batch == 100);
  CHECK(cfg.sgd.local_epochs == 1);
  CHECK(cfg.rounds == 400);
  CHECK(cfg.model == MlpSpec{784, {26}, 10});
  CHECK(cfg.matrix_c == 1.01);
  CHECK(cfg.shards_per_device == 2);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
}

TEST_CASE("a minimal config parses with defaults intact") {
  const ExperimentConfig cfg = parse_text(
      "# comment line\n"
      "design = case2_sparse_reduced\n"
      "output = out.csv\n");
  CHECK(cfg.design.kind == DesignKind::case2_sparse_reduced);
  CHECK(cfg.output == "out.csv");
  CHECK(cfg.k_total == 100);
  CHECK(cfg.design.mask_mode == MaskMode::top_l);
}

TEST_CASE("config text round trips through save and parse") {
  ExperimentConfig cfg;
  cfg.design.kind = DesignKind::case3_sparse_compressed;
  cfg.design.sparsity_l = 77;
  cfg.design.compressed_m = 321;
  cfg.design.mask_mode = MaskMode::uniform_identical;
  cfg.design.debias_uniform = true;
  cfg.design.iht_epsilon_rel = 3e-9;
  cfg.design.iht_max_iters = 123;
  cfg.k_total = 40;
  cfg.k_per_round = 7;
  cfg.channel.p_tot = 250.5;
  cfg.channel.sigma2 = 0.25;
  cfg.channel.h_th = 0.02;
  cfg.channel.threshold_on_power = true;
  cfg.channel.renormalize_truncated = true;
  cfg.rounds = 17;
  cfg.seeds = {11, 22, 33, 44};
  cfg.matrix_c = 1.001;
  cfg.matrix_per_round = true;
  cfg.model = MlpSpec{20, {13, 9}, 5};
  cfg.dataset = DatasetKind::mnist;
  cfg.mnist_dir = "/data/mnist";
  cfg.train_samples = 4000;
  cfg.test_samples = 800;
  cfg.synthetic_noise = 0.7;
  cfg.synthetic_seed = 12345;
  cfg.shards_per_device = 4;
  cfg.sgd.lr = 0.125;
  cfg.sgd.batch = 32;
  cfg.sgd.local_epochs = 3;
  cfg.output = "x.csv";
  cfg.energy_log = "x_energy.csv";
  cfg.histogram_out = "x_hist.txt";
  cfg.histogram_accuracy = 0.42;
  cfg.histogram_bins = 12;
  cfg.matrix_dump = "x_matrix.bin";

  const ExperimentConfig back = parse_text(config_to_string(cfg));
  CHECK(back == cfg);

  ExperimentConfig no_hidden = cfg;
  no_hidden.model.hidden.clear();
  CHECK(parse_text(config_to_string(no_hidden)) == no_hidden);
}

TEST_CASE("config parser rejects malformed input") {
  CHECK_THROWS_WITH_AS(parse_text("design = case1_uncompressed\noutput = o\nsparsityy = 3\n"),
                       doctest::Contains("unknown key 'sparsityy'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_text("output = o\n"), doctest::Contains("design"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_text("design = case1_uncompressed\n"), doctest::Contains("output"),
                       std::invalid_argument);
  CHECK_THROWS(parse_text("design = case1_uncompressed\ndesign = case1_uncompressed\n"));
  CHECK_THROWS(parse_text("design case1_uncompressed\n"));
  CHECK_THROWS(parse_text("design = case1_uncompressed\noutput = o\nrounds = banana\n"));
  CHECK_THROWS(parse_text("design = case9\noutput = o\n"));
}

TEST_CASE("validate_config enforces cross-field constraints") {
  TempDir dir;
  ExperimentConfig cfg = toy_config(dir, DesignKind::case3_sparse_compressed);
  CHECK(validate_config(cfg).empty());

  ExperimentConfig bad = cfg;
  bad.design.compressed_m = 85;  // N = ceil(170/2) = 85
  CHECK_THROWS_WITH_AS(validate_config(bad), doctest::Contains("M < N"), std::invalid_argument);

  bad = cfg;
  bad.train_samples = 161;
  CHECK_THROWS(validate_config(bad));
  bad = cfg;
  bad.k_per_round = 11;
  CHECK_THROWS(validate_config(bad));
  bad = cfg;
  bad.sgd.lr = 0.0;
  CHECK_THROWS(validate_config(bad));
  bad = cfg;
  bad.seeds.clear();
  CHECK_THROWS(validate_config(bad));

  ExperimentConfig suspicious = cfg;
  suspicious.design.sparsity_l = 60;
  suspicious.design.compressed_m = 40;
  const auto warnings = validate_config(suspicious);
  REQUIRE_FALSE(warnings.empty());
  CHECK(warnings.front().find("underdetermined") != std::string::npos);
}

TEST_CASE("zero rounds produce a header-only csv") {
  TempDir dir;
  ExperimentConfig cfg = toy_config(dir, DesignKind::case1_uncompressed);
  cfg.rounds = 0;
  const auto runs = run_experiment(cfg);
  REQUIRE(runs.size() == 1);
  CHECK(runs[0].rounds.empty());
  CHECK(runs[0].final_params.size() == 170);
  CHECK(read_file(cfg.output) == metrics_csv_header() + "\n");
}

TEST_CASE("metrics csv rows are schema-exact with empty optionals") {
  RoundMetrics m;
  m.round = 3;
  m.channel_uses = 20;
  m.accuracy = 0.5;
  m.skipped = true;
  CHECK(metrics_csv_row(m, 60, 9) == "3,20,60,0.5,,,,,1,9");
  m.skipped = false;
  m.agg_nmse = 0.25;
  m.eta = 2.0;
  m.iht_iterations = 17;
  m.iht_converged = true;
  CHECK(metrics_csv_row(m, 60, 9) == "3,20,60,0.5,0.25,2,17,1,0,9");
}

TEST_CASE("a toy experiment writes parseable rows with constant channel uses") {
  TempDir dir;
  ExperimentConfig cfg = toy_config(dir, DesignKind::case2_sparse_reduced);
  cfg.seeds = {5, 6};
  cfg.energy_log = dir.file("energy.csv");
  const auto runs = run_experiment(cfg);
  REQUIRE(runs.size() == 2);
  const auto rows = read_metrics_csv(cfg.output);
  REQUIRE(rows.size() == 10);
  long long expected_cum = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i % 5 == 0) expected_cum = 0;
    expected_cum += 20;
    CHECK(r.channel_uses == 20);
    CHECK(r.cum_channel_uses == expected_cum);
    CHECK(r.round == static_cast<int>(i % 5));
    CHECK(r.seed == (i < 5 ? 5u : 6u));
    CHECK(r.accuracy >= 0.0);
    CHECK(r.accuracy <= 1.0);
  }

  const std::string energy = read_file(cfg.energy_log);
  std::istringstream in(energy);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "seed,round,slot,energy,budget");
  int energy_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++energy_rows;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(ss, field, ',')) f.push_back(field);
    REQUIRE(f.size() == 5);
    CHECK(std::stod(f[3]) <= std::stod(f[4]) * (1.0 + 1e-9));
  }
  CHECK(energy_rows == 2 * 5 * 4);
}

TEST_CASE("experiments replay byte for byte") {
  TempDir dir;
  ExperimentConfig cfg = toy_config(dir, DesignKind::case3_sparse_compressed);
  cfg.design.sparsity_l = 8;
  cfg.rounds = 3;
  cfg.seeds = {7, 8};
  run_experiment(cfg);
  const std::string first = read_file(cfg.output);
  ExperimentConfig again = cfg;
  again.output = dir.file("metrics_again.csv");
  run_experiment(again);
  CHECK(read_file(again.output) == first);
  CHECK(first.find("\n") != std::string::npos);
}

TEST_CASE("the channel-free reference run reproduces the noiseless case-1 accuracy") {
  TempDir dir;
  ExperimentConfig cfg = toy_config(dir, DesignKind::case1_uncompressed);
  cfg.rounds = 30;
  cfg.channel.sigma2 = 0.0;
  cfg.channel.h_th = 0.0;
  cfg.seeds = {5};

  const auto runs = run_experiment(cfg);
  REQUIRE(runs.size() == 1);
  REQUIRE(runs[0].rounds.size() == 30);

  // Reference loop: identical streams, identical schedule, no channel.
  const auto [train, test] = load_experiment_data(cfg);
  const MlpModel model(cfg.model);
  StreamFactory streams{5};
  auto partition_rng = streams.make("partition");
  const auto parts = partition_noniid(train, cfg.k_total, cfg.shards_per_device, partition_rng);
  auto init_rng = streams.make("init");
  RealVector theta = model.init_params(init_rng);
  for (int t = 0; t < cfg.rounds; ++t) {
    const std::string rtag = std::to_string(t);
    auto select_rng = streams.make("select:r" + rtag);
    const auto selected = select_devices(select_rng, cfg.k_total, cfg.k_per_round);
    const auto weights = renormalize_weights(parts, selected);
    RealVector agg = RealVector::Zero(model.param_count());
    for (std::size_t i = 0; i < selected.size(); ++i) {
      auto sgd_rng = streams.make("sgd:r" + rtag + ":d" + std::to_string(selected[i]));
      agg += weights[i] * local_update(model, theta, train,
                                       parts[static_cast<std::size_t>(selected[i])], cfg.sgd,
                                       sgd_rng);
    }
    theta = apply_aggregate(theta, agg);
  }
  const double reference = model.accuracy(theta, test);
  CHECK(std::abs(runs[0].rounds.back().accuracy - reference) <= 1e-12);
  CHECK(std::abs(model.accuracy(runs[0].final_params, test) - reference) <= 1e-12);
}

TEST_CASE("histogram and matrix dumps appear when configured") {
  TempDir dir;
  ExperimentConfig cfg = toy_config(dir, DesignKind::case3_sparse_compressed);
  cfg.design.sparsity_l = 8;
  cfg.rounds = 2;
  cfg.histogram_out = dir.file("hist.txt");
  cfg.histogram_accuracy = 0.0;
  cfg.histogram_bins = 6;
  cfg.matrix_dump = dir.file("matrix.bin");
  run_experiment(cfg);

  const std::string hist = read_file(cfg.histogram_out);
  CHECK(hist.find("# zero_mass ") == 0);
  CHECK(hist.find("# bin_center density") != std::string::npos);

  const MeasurementMatrix dumped = read_matrix_file(cfg.matrix_dump);
  CHECK(dumped.entries.rows() == 40);
  CHECK(dumped.entries.cols() == 85);
  // The dump is the same matrix the run generated from its seed streams.
  StreamFactory streams{5};
  auto matrix_rng = streams.make("matrix");
  const MeasurementMatrix regenerated = generate_matrix(matrix_rng, 40, 85, cfg.matrix_c);
  CHECK((dumped.entries - regenerated.entries).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("load_experiment_data is independent of the experiment seeds") {
  TempDir dir;
  ExperimentConfig a = toy_config(dir, DesignKind::case1_uncompressed);
  ExperimentConfig b = a;
  b.seeds = {99, 100};
  const auto [train_a, test_a] = load_experiment_data(a);
  const auto [train_b, test_b] = load_experiment_data(b);
  CHECK((train_a.features - train_b.features).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(train_a.labels == train_b.labels);
  CHECK((test_a.features - test_b.features).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("idx files round trip through the loader") {
  TempDir dir;
  // Three 2x2 images with pixel values 0..11 and labels 0, 1, 2.
  std::string images;
  const auto be32 = [](std::uint32_t v) {
    std::string s(4, '\0');
    s[0] = static_cast<char>((v >> 24) & 0xff);
    s[1] = static_cast<char>((v >> 16) & 0xff);
    s[2] = static_cast<char>((v >> 8) & 0xff);
    s[3] = static_cast<char>(v & 0xff);
    return s;
  };
  images += be32(0x803);
  images += be32(3);
  images += be32(2);
  images += be32(2);
  for (int p = 0; p < 12; ++p) images += static_cast<char>(p);
  std::string labels;
  labels += be32(0x801);
  labels += be32(3);
  labels += '\0';
  labels += '\1';
  labels += '\2';
  write_text(dir.file("img"), images);
  write_text(dir.file("lab"), labels);

  const Dataset data = load_idx(dir.file("img"), dir.file("lab"));
  REQUIRE(data.size() == 3);
  REQUIRE(data.dim() == 4);
  CHECK(data.num_classes == 10);
  CHECK(data.features(0, 0) == doctest::Approx(0.0));
  CHECK(data.features(3, 0) == doctest::Approx(3.0 / 255.0));
  CHECK(data.features(0, 2) == doctest::Approx(8.0 / 255.0));
  CHECK(data.labels[0] == 0);
  CHECK(data.labels[2] == 2);

  // Corrupt magic and mismatched counts are both rejected.
  write_text(dir.file("img_bad"), be32(0x804) + images.substr(4));
  CHECK_THROWS(load_idx(dir.file("img_bad"), dir.file("lab")));
  std::string labels_short;
  labels_short += be32(0x801);
  labels_short += be32(2);
  labels_short += '\0';
  labels_short += '\1';
  write_text(dir.file("lab_short"), labels_short);
  CHECK_THROWS(load_idx(dir.file("img"), dir.file("lab_short")));
}

TEST_CASE("an mnist config without a directory fails with a clear message") {
  TempDir dir;
  ExperimentConfig cfg = toy_config(dir, DesignKind::case1_uncompressed);
  cfg.dataset = DatasetKind::mnist;
  cfg.mnist_dir.clear();
  if (std::getenv("OTAFL_DATA_DIR") == nullptr) {
    CHECK_THROWS_WITH_AS(load_experiment_data(cfg), doctest::Contains("OTAFL_DATA_DIR"),
                         std::runtime_error);
  }
}

TEST_CASE("plot_vs_round passes a single seed through and averages three") {
  TempDir dir;
  const std::string header = metrics_csv_header();
  write_text(dir.file("one.csv"), header +
                                      "\n"
                                      "0,10,10,0.5,,,,,0,1\n"
                                      "1,10,20,0.75,,,,,0,1\n");
  const std::string single = plot_vs_round({dir.file("one.csv")});
  CHECK(single ==
        "# round accuracy_mean accuracy_min accuracy_max\n"
        "0 0.5 0.5 0.5\n"
        "1 0.75 0.75 0.75\n");

  write_text(dir.file("three.csv"), header +
                                        "\n"
                                        "0,10,10,0.2,,,,,0,1\n"
                                        "0,10,10,0.4,,,,,0,2\n"
                                        "0,10,10,0.9,,,,,0,3\n");
  const std::string three = plot_vs_round({dir.file("three.csv")});
  CHECK(three == "# round accuracy_mean accuracy_min accuracy_max\n0 " +
                     g17((0.2 + 0.4 + 0.9) / 3.0) + " " + g17(0.2) + " " + g17(0.9) + "\n");
}

TEST_CASE("plot_vs_channel_uses keys on the cumulative axis and checks consistency") {
  TempDir dir;
  const std::string header = metrics_csv_header();
  write_text(dir.file("a.csv"), header +
                                    "\n"
                                    "0,500,500,0.3,,,,,0,1\n"
                                    "1,500,1000,0.6,,,,,0,1\n"
                                    "0,500,500,0.5,,,,,0,2\n"
                                    "1,500,1000,0.8,,,,,0,2\n");
  const std::string out = plot_vs_channel_uses({dir.file("a.csv")});
  CHECK(out == "# cum_channel_uses accuracy_mean accuracy_min accuracy_max\n500 " +
                   g17((0.3 + 0.5) / 2.0) + " " + g17(0.3) + " " + g17(0.5) + "\n1000 " +
                   g17((0.6 + 0.8) / 2.0) + " " + g17(0.6) + " " + g17(0.8) + "\n");

  write_text(dir.file("b.csv"), header +
                                    "\n"
                                    "0,500,500,0.3,,,,,0,1\n"
                                    "0,600,600,0.5,,,,,0,2\n");
  CHECK_THROWS(plot_vs_channel_uses({dir.file("b.csv")}));

  write_text(dir.file("c.csv"), header +
                                    "\n"
                                    "0,500,500,0.3,,,,,0,1\n"
                                    "1,500,1000,0.4,,,,,0,1\n"
                                    "0,500,500,0.5,,,,,0,2\n");
  CHECK_THROWS(plot_vs_round({dir.file("c.csv")}));
}

TEST_CASE("plot_histogram averages densities and zero masses across files") {
  TempDir dir;
  write_text(dir.file("h1.txt"),
             "# zero_mass 0.5 (5 of 10 entries exactly zero)\n"
             "# bin_center density\n"
             "-1 0.2\n"
             "1 0.4\n");
  write_text(dir.file("h2.txt"),
             "# zero_mass 0.7 (7 of 10 entries exactly zero)\n"
             "# bin_center density\n"
             "-1 0.4\n"
             "1 0.0\n");
  const std::string out = plot_histogram({dir.file("h1.txt"), dir.file("h2.txt")});
  CHECK(out == "# zero_mass " + g17((0.5 + 0.7) / 2.0) +
                   "\n# bin_center density_mean density_min density_max\n-1 " +
                   g17((0.2 + 0.4) / 2.0) + " " + g17(0.2) + " " + g17(0.4) + "\n1 " +
                   g17((0.4 + 0.0) / 2.0) + " 0 " + g17(0.4) + "\n");

  write_text(dir.file("h3.txt"),
             "# bin_center density\n"
             "-2 0.4\n"
             "1 0.0\n");
  CHECK_THROWS(plot_histogram({dir.file("h1.txt"), dir.file("h3.txt")}));
}

TEST_CASE("read_metrics_csv rejects foreign schemas and malformed rows") {
  TempDir dir;
  write_text(dir.file("bad_header.csv"), "round,uses\n0,1\n");
  CHECK_THROWS_WITH_AS(read_metrics_csv(dir.file("bad_header.csv")),
                       doctest::Contains("schema"), std::runtime_error);
  write_text(dir.file("bad_row.csv"), metrics_csv_header() + "\n0,10,10,0.5\n");
  CHECK_THROWS(read_metrics_csv(dir.file("bad_row.csv")));
  write_text(dir.file("bad_value.csv"), metrics_csv_header() + "\nx,10,10,0.5,,,,,0,1\n");
  CHECK_THROWS(read_metrics_csv(dir.file("bad_value.csv")));
  CHECK_THROWS(read_metrics_csv(dir.file("missing.csv")));
  CHECK_THROWS(emit_plotdata("vs_time", {dir.file("bad_header.csv")}));
}

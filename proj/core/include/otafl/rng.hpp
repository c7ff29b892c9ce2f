// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace otafl {

/// Deterministic, label-partitioned random stream.
///
/// Two streams built from the same (master_seed, label) pair produce
/// identical draw sequences; distinct labels give statistically independent
/// streams. Parallel workers each receive their own labeled stream, so
/// results do not depend on scheduling.
///
/// All variates are derived from raw mt19937_64 output with fixed algorithms
/// (Box-Muller normals, rejection-sampled bounded integers) instead of the
/// std:: distribution objects, whose output is implementation-defined. A
/// replay with the same seed therefore reproduces every draw bit for bit.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view label);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  const std::string& label() const noexcept { return label_; }
  /// Number of raw 64-bit words consumed so far.
  std::uint64_t draw_count() const noexcept { return counter_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform();

  /// Standard normal N(0, 1).
  double normal();

  /// Complex CN(0, sigma2): real and imaginary parts i.i.d. N(0, sigma2/2).
  std::complex<double> normal_complex(double sigma2);

  /// Uniform integer in [0, n), rejection-sampled so there is no modulo bias.
  std::uint64_t below(std::uint64_t n);

  /// l distinct indices drawn uniformly from [0, n), sorted ascending.
  std::vector<std::size_t> index_subset(std::size_t n, std::size_t l);

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::uint64_t master_seed_;
  std::string label_;
  std::mt19937_64 engine_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Builds round- and device-scoped stream labels from one master seed.
struct StreamFactory {
  std::uint64_t master_seed = 0;

  RngStream make(std::string_view label) const { return RngStream(master_seed, label); }
};

}  // namespace otafl

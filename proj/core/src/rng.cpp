// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace otafl {

namespace {

// FNV-1a over the label bytes; the label hash and the master seed are fed
// into a seed_seq, whose expansion is fully specified by the standard.
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::string_view label)
    : master_seed_(master_seed), label_(label) {
  const std::uint64_t lh = fnv1a(label);
  std::seed_seq seq{
      static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
      static_cast<std::uint32_t>(lh), static_cast<std::uint32_t>(lh >> 32)};
  engine_.seed(seq);
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return engine_();
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::complex<double> RngStream::normal_complex(double sigma2) {
  const double s = std::sqrt(sigma2 / 2.0);
  const double re = normal() * s;
  const double im = normal() * s;
  return {re, im};
}

std::uint64_t RngStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::below: n must be positive");
  if ((n & (n - 1)) == 0) return next_u64() & (n - 1);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return r % n;
}

std::vector<std::size_t> RngStream::index_subset(std::size_t n, std::size_t l) {
  if (l > n) throw std::invalid_argument("RngStream::index_subset: subset larger than range");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates: after l swaps the prefix is the sample.
  for (std::size_t i = 0; i < l; ++i) {
    std::swap(pool[i], pool[i + below(n - i)]);
  }
  pool.resize(l);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace otafl

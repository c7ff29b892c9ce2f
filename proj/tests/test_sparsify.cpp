// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "otafl/rng.hpp"
#include "otafl/sparsify.hpp"

using namespace otafl;

namespace {

BasebandVector random_complex(RngStream& rng, Eigen::Index n) {
  BasebandVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = {rng.normal(), rng.normal()};
  }
  return v;
}

// Exhaustive search over all size-l supports for the one whose mask keeps
// the most energy, i.e. minimizes ||s - mask(s)||^2. Ties are broken toward
// the lexicographically smallest index set so the answer is unique.
double best_masked_error(const BasebandVector& s, std::size_t l) {
  const Eigen::Index n = s.size();
  std::vector<Eigen::Index> pick(l);
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  const auto recurse = [&](auto&& self, Eigen::Index start, std::size_t depth) -> void {
    if (depth == l) {
      double err = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!chosen[static_cast<std::size_t>(j)]) err += std::norm(s(j));
      }
      best = std::min(best, err);
      return;
    }
    for (Eigen::Index j = start; j < n; ++j) {
      chosen[static_cast<std::size_t>(j)] = true;
      self(self, j + 1, depth + 1);
      chosen[static_cast<std::size_t>(j)] = false;
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("top_l_support picks the largest-modulus entries") {
  BasebandVector s(5);
  s << std::complex<double>(0.1, 0), std::complex<double>(0, 3), std::complex<double>(-2, 0),
      std::complex<double>(0.5, 0.5), std::complex<double>(1, 1);
  const Support sup = top_l_support(s, 2);
  REQUIRE(sup.size() == 2);
  CHECK(sup.ambient_dim == 5);
  CHECK(sup.indices[0] == 1);
  CHECK(sup.indices[1] == 2);
}

TEST_CASE("top_l_support breaks modulus ties toward the lowest index") {
  BasebandVector s(4);
  s << std::complex<double>(1, 0), std::complex<double>(0, 1), std::complex<double>(-1, 0),
      std::complex<double>(0.5, 0);
  const Support sup = top_l_support(s, 2);
  REQUIRE(sup.size() == 2);
  CHECK(sup.indices[0] == 0);
  CHECK(sup.indices[1] == 1);
}

TEST_CASE("top_l_support with l == n keeps everything") {
  BasebandVector s(3);
  s << std::complex<double>(1, 0), std::complex<double>(0, 0), std::complex<double>(0, 2);
  const Support sup = top_l_support(s, 3);
  REQUIRE(sup.size() == 3);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(sup.indices[static_cast<std::size_t>(i)] == i);
  }
}

TEST_CASE("top_l_support rejects l > n and l == 0") {
  BasebandVector s(3);
  s.setZero();
  CHECK_THROWS(top_l_support(s, 4));
  CHECK_THROWS(top_l_support(s, 0));
}

TEST_CASE("top-L mask is the best L-term approximation, brute force n <= 10") {
  RngStream rng(101, "topl-bruteforce");
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng.below(7));
    const std::size_t l = 1 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)));
    const BasebandVector s = random_complex(rng, n);
    const Support sup = top_l_support(s, l);
    const SparseApprox sp = apply_mask(s, sup);
    const double err = (s - sp.dense).squaredNorm();
    const double best = best_masked_error(s, l);
    CHECK(err <= best + 1e-12 * s.squaredNorm());
  }
}

TEST_CASE("uniform_support draws sorted distinct indices and replays by label") {
  StreamFactory streams{424242};
  RngStream a = streams.make("mask:r7");
  RngStream b = streams.make("mask:r7");
  const Support sa = uniform_support(a, 50, 12);
  const Support sb = uniform_support(b, 50, 12);
  CHECK(sa == sb);
  REQUIRE(sa.size() == 12);
  CHECK(sa.ambient_dim == 50);
  CHECK(std::is_sorted(sa.indices.begin(), sa.indices.end()));
  CHECK(std::adjacent_find(sa.indices.begin(), sa.indices.end()) == sa.indices.end());
  CHECK(sa.indices.back() < 50);
}

TEST_CASE("uniform_support hits each index with probability l/n") {
  RngStream rng(103, "mask-frequency");
  const Eigen::Index n = 20;
  const std::size_t l = 5;
  const int rounds = 20000;
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  for (int r = 0; r < rounds; ++r) {
    const Support sup = uniform_support(rng, n, l);
    for (const Eigen::Index j : sup.indices) {
      ++counts[static_cast<std::size_t>(j)];
    }
  }
  const double p = static_cast<double>(l) / static_cast<double>(n);
  const double sd = std::sqrt(p * (1 - p) * rounds);
  int outside_3sd = 0;
  for (const int c : counts) {
    if (std::abs(c - p * rounds) > 3 * sd) ++outside_3sd;
  }
  // With 20 bins, even one 3-sigma excursion is already unlikely; the seed
  // above is frozen, so this is a deterministic regression check.
  CHECK(outside_3sd == 0);
}

TEST_CASE("uniformly masked vectors average to (l/n) times the input") {
  RngStream data_rng(105, "mask-mean-data");
  RngStream mask_rng(105, "mask-mean-masks");
  const Eigen::Index n = 16;
  const std::size_t l = 4;
  const BasebandVector s = random_complex(data_rng, n);
  const int rounds = 20000;
  BasebandVector acc = BasebandVector::Zero(n);
  for (int r = 0; r < rounds; ++r) {
    acc += apply_mask(s, uniform_support(mask_rng, n, l)).dense;
  }
  const BasebandVector mean = acc / static_cast<double>(rounds);
  const double p = static_cast<double>(l) / static_cast<double>(n);
  int within = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    // Each entry is s_j Bernoulli(p); real and imaginary parts move together,
    // so the modulus of the deviation is |s_j| |phat - p|.
    const double sd = std::abs(s(j)) * std::sqrt(p * (1 - p) / rounds);
    if (std::abs(mean(j) - p * s(j)) <= 3 * sd) ++within;
  }
  // A per-entry 3-sigma test has a ~0.7% two-sided miss rate by chance; the
  // frozen seed keeps this deterministic, and all 16 entries land inside.
  CHECK(within == n);
}

TEST_CASE("apply_mask zeroes exactly the off-support entries") {
  BasebandVector s(4);
  s << std::complex<double>(1, 1), std::complex<double>(2, 0), std::complex<double>(0, 3),
      std::complex<double>(4, 4);
  Support sup;
  sup.indices = {1, 3};
  sup.ambient_dim = 4;
  const SparseApprox sp = apply_mask(s, sup);
  CHECK(sp.dense(0) == std::complex<double>(0, 0));
  CHECK(sp.dense(1) == s(1));
  CHECK(sp.dense(2) == std::complex<double>(0, 0));
  CHECK(sp.dense(3) == s(3));
  CHECK(sp.support == sup);
}

TEST_CASE("apply_mask rejects a mask built for another dimension") {
  BasebandVector s(4);
  s.setZero();
  Support sup;
  sup.indices = {0};
  sup.ambient_dim = 5;
  CHECK_THROWS(apply_mask(s, sup));
}

TEST_CASE("reduce keeps support entries in order and expand restores them") {
  BasebandVector s(6);
  s << std::complex<double>(9, 0), std::complex<double>(0, 0), std::complex<double>(-1, 2),
      std::complex<double>(0, 0), std::complex<double>(0, -7), std::complex<double>(0, 0);
  Support sup;
  sup.indices = {0, 2, 4};
  sup.ambient_dim = 6;
  const SparseApprox sp = apply_mask(s, sup);
  const ReducedVector r = reduce(sp);
  REQUIRE(r.values.size() == 3);
  CHECK(r.values(0) == s(0));
  CHECK(r.values(1) == s(2));
  CHECK(r.values(2) == s(4));
  const BasebandVector back = expand(r, 6);
  CHECK((back - sp.dense).norm() == 0.0);
}

TEST_CASE("reduce then expand round trips random masked vectors") {
  RngStream rng(107, "reduce-roundtrip");
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 8 + static_cast<Eigen::Index>(rng.below(40));
    const std::size_t l = 1 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)));
    const BasebandVector s = random_complex(rng, n);
    const SparseApprox sp = apply_mask(s, top_l_support(s, l));
    const BasebandVector back = expand(reduce(sp), n);
    CHECK((back - sp.dense).norm() == 0.0);
  }
}

TEST_CASE("expand rejects a mismatched ambient dimension") {
  ReducedVector r;
  r.values = BasebandVector::Ones(2);
  r.support.indices = {0, 1};
  r.support.ambient_dim = 4;
  CHECK_THROWS(expand(r, 5));
}

TEST_CASE("format_support prints comma-separated indices") {
  Support sup;
  sup.indices = {0, 3, 17};
  sup.ambient_dim = 20;
  CHECK(format_support(sup) == "0,3,17");
  Support empty;
  empty.ambient_dim = 4;
  CHECK(format_support(empty).empty());
}

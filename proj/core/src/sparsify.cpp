// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/sparsify.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace otafl {

Support top_l_support(const BasebandVector& s, std::size_t l) {
  const auto n = static_cast<std::size_t>(s.size());
  if (l == 0) throw std::invalid_argument("top_l_support: l must be positive");
  if (l > n) throw std::invalid_argument("top_l_support: l exceeds vector length");
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  // Rank by squared modulus (same order as modulus), lowest index on ties.
  const auto better = [&s](Eigen::Index a, Eigen::Index b) {
    const double ma = std::norm(s[a]);
    const double mb = std::norm(s[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(l), idx.end(), better);
  idx.resize(l);
  std::sort(idx.begin(), idx.end());
  return Support{std::move(idx), s.size()};
}

Support uniform_support(RngStream& rng, Eigen::Index n, std::size_t l) {
  if (n < 0 || l > static_cast<std::size_t>(n)) {
    throw std::invalid_argument("uniform_support: l exceeds ambient dimension");
  }
  const auto picked = rng.index_subset(static_cast<std::size_t>(n), l);
  std::vector<Eigen::Index> idx(picked.begin(), picked.end());
  return Support{std::move(idx), n};
}

SparseApprox apply_mask(const BasebandVector& s, const Support& mask) {
  if (mask.ambient_dim != s.size()) {
    throw std::invalid_argument("apply_mask: support ambient dimension mismatch");
  }
  BasebandVector dense = BasebandVector::Zero(s.size());
  for (Eigen::Index j : mask.indices) dense[j] = s[j];
  return SparseApprox{std::move(dense), mask};
}

ReducedVector reduce(const SparseApprox& sp) {
  BasebandVector values(static_cast<Eigen::Index>(sp.support.size()));
  Eigen::Index out = 0;
  for (Eigen::Index j : sp.support.indices) values[out++] = sp.dense[j];
  return ReducedVector{std::move(values), sp.support};
}

BasebandVector expand(const ReducedVector& r, Eigen::Index n) {
  if (r.values.size() != static_cast<Eigen::Index>(r.support.size())) {
    throw std::invalid_argument("expand: values/support size mismatch");
  }
  if (r.support.ambient_dim != n) {
    throw std::invalid_argument("expand: support ambient dimension mismatch");
  }
  BasebandVector dense = BasebandVector::Zero(n);
  Eigen::Index in = 0;
  for (Eigen::Index j : r.support.indices) {
    if (j < 0 || j >= n) throw std::out_of_range("expand: support index out of range");
    dense[j] = r.values[in++];
  }
  return dense;
}

std::string format_support(const Support& s) {
  std::string out;
  for (std::size_t i = 0; i < s.indices.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(s.indices[i]);
  }
  return out;
}

}  // namespace otafl

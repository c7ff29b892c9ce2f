// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "otafl/baseband.hpp"
#include "otafl/rng.hpp"

namespace otafl {

/// Index set of the possibly non-zero entries of a length-N vector.
struct Support {
  std::vector<Eigen::Index> indices;  // strictly increasing, no duplicates
  Eigen::Index ambient_dim = 0;

  std::size_t size() const noexcept { return indices.size(); }
  bool operator==(const Support& other) const = default;
};

/// L-sparse vector stored at full length, together with its support.
/// dense[j] == 0 for every j outside the support.
struct SparseApprox {
  BasebandVector dense;
  Support support;
};

/// Only the support entries of a SparseApprox, in increasing index order.
struct ReducedVector {
  BasebandVector values;  // length == support.size()
  Support support;
};

/// Indices of the l largest-modulus entries of s; ties break toward the
/// lowest index, so the result is deterministic.
Support top_l_support(const BasebandVector& s, std::size_t l);

/// l distinct indices drawn uniformly without replacement. Every party
/// holding the same stream state regenerates the identical mask, which is
/// what lets all devices and the server share a mask with no transmission.
Support uniform_support(RngStream& rng, Eigen::Index n, std::size_t l);

/// Zeroes every entry of s outside the mask.
SparseApprox apply_mask(const BasebandVector& s, const Support& mask);

/// Drops the structural zeros: the support entries in increasing index order.
ReducedVector reduce(const SparseApprox& sp);

/// Inverse of reduce: re-inserts zeros at the off-support positions.
BasebandVector expand(const ReducedVector& r, Eigen::Index n);

/// Sorted index list as comma-separated text, for experiment logs.
std::string format_support(const Support& s);

}  // namespace otafl

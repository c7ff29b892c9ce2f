// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/baseband.hpp"

#include <stdexcept>

namespace otafl {

BasebandVector to_baseband(const RealVector& v) {
  const Eigen::Index d = v.size();
  if (d < 1) throw std::invalid_argument("to_baseband: empty input");
  if (!v.allFinite()) throw std::invalid_argument("to_baseband: non-finite entry");
  const Eigen::Index n = baseband_length(d);
  BasebandVector s(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double im = (j + n < d) ? v[j + n] : 0.0;
    s[j] = {v[j], im};
  }
  return s;
}

RealVector from_baseband(const BasebandVector& s, Eigen::Index d) {
  if (d < 1) throw std::invalid_argument("from_baseband: target dimension must be positive");
  if (s.size() != baseband_length(d)) {
    throw std::invalid_argument("from_baseband: length mismatch with target dimension");
  }
  const Eigen::Index n = s.size();
  RealVector v(d);
  for (Eigen::Index j = 0; j < n; ++j) {
    v[j] = s[j].real();
    if (j + n < d) v[j + n] = s[j].imag();
  }
  return v;
}

}  // namespace otafl

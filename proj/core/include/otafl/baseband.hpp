// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace otafl {

using RealVector = Eigen::VectorXd;
using BasebandVector = Eigen::VectorXcd;

/// Number of complex baseband symbols needed for a real vector of length d.
inline Eigen::Index baseband_length(Eigen::Index d) { return (d + 1) / 2; }

/// Packs a real vector of length d into ceil(d/2) complex symbols: entry j
/// becomes v[j] + i*v[j+N]. The first half of v supplies the real parts, the
/// second half the imaginary parts; with odd d the last imaginary slot is
/// zero-padded. The packing preserves the Euclidean norm exactly.
BasebandVector to_baseband(const RealVector& v);

/// Exact inverse of to_baseband for source dimension d; the pad slot is
/// discarded when d is odd. Throws if length(s) != ceil(d/2).
RealVector from_baseband(const BasebandVector& s, Eigen::Index d);

}  // namespace otafl

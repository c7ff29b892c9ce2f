// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "otafl/baseband.hpp"
#include "otafl/rng.hpp"

namespace otafl {

/// Real M x N compression map with certified operator norm below 1.
///
/// Columns of the raw matrix A' are sampled uniformly on the unit sphere in
/// R^M; the final map is A = A' / (c * ||A'||_op) with c > 1, so
/// ||A||_op = 1/c < 1. The same real map acts separately on the real and
/// imaginary parts of complex baseband signals.
struct MeasurementMatrix {
  Eigen::MatrixXd entries;     // M x N
  double op_norm_bound = 0.0;  // certified ||A||_op <= op_norm_bound < 1
  std::string seed_label;      // provenance of the generating stream
};

/// Largest singular value via power iteration on A^T A, relative tolerance
/// 1e-10, at most 10000 iterations. Throws on non-convergence with the last
/// iterate value in the message. The start vector comes from a fixed
/// internal stream, so the result is deterministic for a given matrix.
double operator_norm(const Eigen::MatrixXd& a);

/// Draws A' with unit-sphere columns and rescales by 1 / (c * ||A'||_op).
/// Requires 1 <= m < n and c > 1.
MeasurementMatrix generate_matrix(RngStream& rng, Eigen::Index m, Eigen::Index n, double c);

/// y = A s, applied independently to real and imaginary parts.
BasebandVector compress(const MeasurementMatrix& a, const BasebandVector& s);

/// A^T y (A is real, so the Hermitian adjoint is the transpose).
BasebandVector adjoint(const MeasurementMatrix& a, const BasebandVector& y);

/// Binary matrix dump for cross-implementation comparison: a 16-byte header
/// (magic "AFLM", u32 rows, u32 cols, u32 reserved zero, all little-endian)
/// followed by the entries as row-major little-endian 64-bit floats.
void write_matrix_file(const MeasurementMatrix& a, const std::string& path);
MeasurementMatrix read_matrix_file(const std::string& path);

}  // namespace otafl

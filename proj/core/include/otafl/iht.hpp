// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "otafl/measurement.hpp"
#include "otafl/sparsify.hpp"

namespace otafl {

struct IhtConfig {
  std::size_t sparsity_l = 1;
  double epsilon = 1e-8;  // stop once ||x_{i+1} - x_i||^2 < epsilon
  int max_iters = 500;
};

struct IhtResult {
  SparseApprox estimate;
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;  // ||y - A x||^2 at the returned iterate
};

/// Keeps the l largest-modulus entries of x and zeroes the rest; ties break
/// toward the lowest index.
SparseApprox hard_threshold(const BasebandVector& x, std::size_t l);

/// Stopping threshold used by the round pipelines: rel * max(1, ||y||^2).
double default_iht_epsilon(const BasebandVector& y, double rel = 1e-8);

/// Called once per iteration with the squared residual before the step and
/// the squared iterate change after it.
using IhtObserver = std::function<void(int iter, double residual_sq, double step_sq)>;

/// Sparse reconstruction by iterative hard thresholding:
///   x <- H_L(x + A^T (y - A x)),  starting from x = 0,
/// until the squared iterate change drops below epsilon or max_iters is
/// reached. With ||A||_op < 1 (which generate_matrix certifies) the squared
/// residual is non-increasing across iterations. Throws if an iterate stops
/// being finite.
IhtResult iht_reconstruct(const MeasurementMatrix& a, const BasebandVector& y,
                          const IhtConfig& cfg, const IhtObserver& observer = {});

}  // namespace otafl

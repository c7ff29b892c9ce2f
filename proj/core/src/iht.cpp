// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/iht.hpp"

#include <cassert>
#include <stdexcept>

namespace otafl {

namespace {

// A * x for an L-sparse x: only the support columns contribute, which at the
// usual operating points (L << N) is the cheap half of an IHT iteration.
BasebandVector forward_sparse(const MeasurementMatrix& a, const SparseApprox& x) {
  BasebandVector y = BasebandVector::Zero(a.entries.rows());
  for (Eigen::Index j : x.support.indices) {
    y += x.dense[j] * a.entries.col(j);
  }
  return y;
}

}  // namespace

SparseApprox hard_threshold(const BasebandVector& x, std::size_t l) {
  return apply_mask(x, top_l_support(x, l));
}

double default_iht_epsilon(const BasebandVector& y, double rel) {
  return rel * std::max(1.0, y.squaredNorm());
}

IhtResult iht_reconstruct(const MeasurementMatrix& a, const BasebandVector& y,
                          const IhtConfig& cfg, const IhtObserver& observer) {
  if (y.size() != a.entries.rows()) {
    throw std::invalid_argument("iht_reconstruct: measurement length does not match matrix rows");
  }
  if (cfg.sparsity_l < 1 || cfg.sparsity_l > static_cast<std::size_t>(a.entries.cols())) {
    throw std::invalid_argument("iht_reconstruct: sparsity out of range");
  }
  if (!(cfg.epsilon > 0.0) || cfg.max_iters < 1) {
    throw std::invalid_argument("iht_reconstruct: invalid stopping parameters");
  }

  const Eigen::Index n = a.entries.cols();
  SparseApprox x{BasebandVector::Zero(n), Support{{}, n}};

  IhtResult result;
  double prev_residual = y.squaredNorm();
  for (int it = 0; it < cfg.max_iters; ++it) {
    const BasebandVector r = y - forward_sparse(a, x);
    const double res_sq = r.squaredNorm();
    // Non-increasing residual, guaranteed when ||A||_op < 1.
    assert(!(a.op_norm_bound < 1.0) || res_sq <= prev_residual + 1e-9);
    prev_residual = res_sq;

    SparseApprox next = hard_threshold(x.dense + adjoint(a, r), cfg.sparsity_l);
    if (!next.dense.allFinite()) {
      throw std::runtime_error("iht_reconstruct: iterate diverged (non-finite values)");
    }
    const double step_sq = (next.dense - x.dense).squaredNorm();
    x = std::move(next);
    result.iterations = it + 1;
    if (observer) observer(it, res_sq, step_sq);
    if (step_sq < cfg.epsilon) {
      result.converged = true;
      break;
    }
  }

  static_cast<void>(prev_residual);

  result.final_residual = (y - forward_sparse(a, x)).squaredNorm();
  result.estimate = std::move(x);
  return result;
}

}  // namespace otafl

// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/measurement.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace otafl {

double operator_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0 || a.isZero(0.0)) {
    throw std::invalid_argument("operator_norm: zero or empty matrix");
  }
  constexpr double kRelTol = 1e-10;
  constexpr int kMaxIters = 10000;

  RngStream start(0x0a17f1u, "opnorm-start");
  Eigen::VectorXd v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = start.normal();
  v.normalize();

  double lambda = 0.0;  // Rayleigh quotient for A^T A
  for (int it = 0; it < kMaxIters; ++it) {
    Eigen::VectorXd w = a * v;
    const double next = w.squaredNorm();
    Eigen::VectorXd u = a.transpose() * w;
    const double un = u.norm();
    if (un == 0.0) {
      // v landed in the null space; restart from a fresh direction.
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = start.normal();
      v.normalize();
      continue;
    }
    v = u / un;
    if (it > 0 && std::abs(next - lambda) <= kRelTol * next) {
      return std::sqrt(next);
    }
    lambda = next;
  }
  throw std::runtime_error("operator_norm: power iteration did not converge, last iterate " +
                           std::to_string(std::sqrt(lambda)));
}

MeasurementMatrix generate_matrix(RngStream& rng, Eigen::Index m, Eigen::Index n, double c) {
  if (m < 1 || m >= n) throw std::invalid_argument("generate_matrix: need 1 <= m < n");
  if (!(c > 1.0)) throw std::invalid_argument("generate_matrix: need c > 1");

  Eigen::MatrixXd raw(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd col(m);
    double norm2 = 0.0;
    do {
      for (Eigen::Index i = 0; i < m; ++i) col[i] = rng.normal();
      norm2 = col.squaredNorm();
    } while (norm2 == 0.0);
    raw.col(j) = col / std::sqrt(norm2);
  }
  const double raw_norm = operator_norm(raw);
  MeasurementMatrix out;
  out.entries = raw / (c * raw_norm);
  out.op_norm_bound = 1.0 / c;
  out.seed_label = rng.label();
  return out;
}

BasebandVector compress(const MeasurementMatrix& a, const BasebandVector& s) {
  if (s.size() != a.entries.cols()) {
    throw std::invalid_argument("compress: signal length does not match matrix columns");
  }
  const Eigen::VectorXd re = a.entries * s.real().matrix();
  const Eigen::VectorXd im = a.entries * s.imag().matrix();
  BasebandVector y(a.entries.rows());
  y.real() = re;
  y.imag() = im;
  return y;
}

BasebandVector adjoint(const MeasurementMatrix& a, const BasebandVector& y) {
  if (y.size() != a.entries.rows()) {
    throw std::invalid_argument("adjoint: input length does not match matrix rows");
  }
  const Eigen::VectorXd re = a.entries.transpose() * y.real().matrix();
  const Eigen::VectorXd im = a.entries.transpose() * y.imag().matrix();
  BasebandVector x(a.entries.cols());
  x.real() = re;
  x.imag() = im;
  return x;
}

namespace {

constexpr char kMagic[4] = {'A', 'F', 'L', 'M'};

void put_u32_le(std::ostream& os, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(bytes, 4);
}

std::uint32_t get_u32_le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64_le(std::ostream& os, double v) {
  auto u = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  os.write(bytes, 8);
}

double get_f64_le(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(u);
}

}  // namespace

void write_matrix_file(const MeasurementMatrix& a, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_matrix_file: cannot open " + path);
  os.write(kMagic, 4);
  put_u32_le(os, static_cast<std::uint32_t>(a.entries.rows()));
  put_u32_le(os, static_cast<std::uint32_t>(a.entries.cols()));
  put_u32_le(os, 0u);  // reserved
  for (Eigen::Index i = 0; i < a.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.entries.cols(); ++j) {
      put_f64_le(os, a.entries(i, j));
    }
  }
  if (!os) throw std::runtime_error("write_matrix_file: write failed for " + path);
}

MeasurementMatrix read_matrix_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_matrix_file: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("read_matrix_file: bad magic in " + path);
  }
  const std::uint32_t m = get_u32_le(is);
  const std::uint32_t n = get_u32_le(is);
  get_u32_le(is);  // reserved
  MeasurementMatrix out;
  out.entries.resize(m, n);
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      out.entries(i, j) = get_f64_le(is);
    }
  }
  if (!is) throw std::runtime_error("read_matrix_file: truncated file " + path);
  out.op_norm_bound = operator_norm(out.entries);
  out.seed_label = "file:" + path;
  return out;
}

}  // namespace otafl

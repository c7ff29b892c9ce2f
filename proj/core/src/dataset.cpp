// Copyright (c) 2026 the otafl authors
// SPDX-License-Identifier: Apache-2.0

#include "otafl/dataset.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace otafl {

Dataset Dataset::head(Eigen::Index n) const {
  if (n > size()) throw std::invalid_argument("Dataset::head: not enough samples");
  Dataset out;
  out.features = features.leftCols(n);
  out.labels = labels.head(n);
  out.num_classes = num_classes;
  return out;
}

Dataset Dataset::tail(Eigen::Index n) const {
  if (n > size()) throw std::invalid_argument("Dataset::tail: not enough samples");
  Dataset out;
  out.features = features.rightCols(n);
  out.labels = labels.tail(n);
  out.num_classes = num_classes;
  return out;
}

Dataset make_synthetic(RngStream& rng, Eigen::Index n, Eigen::Index dim, int num_classes,
                       double noise_std) {
  if (n < 1 || dim < 1 || num_classes < 2) {
    throw std::invalid_argument("make_synthetic: need n >= 1, dim >= 1, classes >= 2");
  }
  if (noise_std < 0.0) throw std::invalid_argument("make_synthetic: negative noise");

  Eigen::MatrixXd means(dim, num_classes);
  for (int c = 0; c < num_classes; ++c) {
    for (Eigen::Index i = 0; i < dim; ++i) means(i, c) = 2.0 * rng.uniform() - 1.0;
  }

  Dataset out;
  out.features.resize(dim, n);
  out.labels.resize(n);
  out.num_classes = num_classes;
  for (Eigen::Index s = 0; s < n; ++s) {
    const int c = static_cast<int>(s % num_classes);
    out.labels[s] = c;
    for (Eigen::Index i = 0; i < dim; ++i) {
      out.features(i, s) = means(i, c) + noise_std * rng.normal();
    }
  }
  return out;
}

namespace {

std::uint32_t read_u32_be(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
         (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("load_idx: cannot open " + images_path);
  if (read_u32_be(img) != 0x00000803u) {
    throw std::runtime_error("load_idx: bad image magic in " + images_path);
  }
  const std::uint32_t n = read_u32_be(img);
  const std::uint32_t rows = read_u32_be(img);
  const std::uint32_t cols = read_u32_be(img);
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("load_idx: cannot open " + labels_path);
  if (read_u32_be(lab) != 0x00000801u) {
    throw std::runtime_error("load_idx: bad label magic in " + labels_path);
  }
  const std::uint32_t n_labels = read_u32_be(lab);
  if (n_labels != n) throw std::runtime_error("load_idx: image/label count mismatch");

  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(pixels), n);
  out.labels.resize(n);
  out.num_classes = 10;

  std::vector<unsigned char> buf(pixels);
  for (std::uint32_t s = 0; s < n; ++s) {
    img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels));
    if (!img) throw std::runtime_error("load_idx: truncated image data in " + images_path);
    for (std::size_t p = 0; p < pixels; ++p) {
      out.features(static_cast<Eigen::Index>(p), s) = buf[p] / 255.0;
    }
    unsigned char l = 0;
    lab.read(reinterpret_cast<char*>(&l), 1);
    if (!lab) throw std::runtime_error("load_idx: truncated label data in " + labels_path);
    out.labels[s] = l;
  }
  return out;
}

}  // namespace otafl

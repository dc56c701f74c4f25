// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/image.hpp"

#include <algorithm>
#include <cmath>

namespace omnedit {

namespace {

template <class Buffer>
Field laplacian_impl(const Buffer& src) {
  const int w = src.width();
  const int h = src.height();
  Field out(w, h);
  for (int y = 0; y < h; ++y) {
    const int up = std::max(y - 1, 0);
    const int down = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int left = std::max(x - 1, 0);
      const int right = std::min(x + 1, w - 1);
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = src.at(x, up, c) + src.at(x, down, c) +
                          src.at(left, y, c) + src.at(right, y, c) -
                          4.0 * src.at(x, y, c);
      }
    }
  }
  return out;
}

}  // namespace

bool in_unit_range(const Image& img) {
  return std::all_of(img.values().begin(), img.values().end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

void require_mask_fits(const Image& img, const Mask& mask, const char* what) {
  if (!img.same_extent(mask)) {
    throw ShapeError(std::string(what) + ": mask is " +
                     std::to_string(mask.width()) + "x" +
                     std::to_string(mask.height()) + " but image is " +
                     std::to_string(img.width()) + "x" +
                     std::to_string(img.height()));
  }
}

ClipResult clipped_linear(double x, double lo, double hi, BoundaryGrad conv) {
  if (x < lo) return {lo, 0.0};
  if (x > hi) return {hi, 0.0};
  if (conv == BoundaryGrad::kZero && (x == lo || x == hi)) return {x, 0.0};
  return {x, 1.0};
}

Field laplacian(const Image& img) { return laplacian_impl(img); }
Field laplacian(const Field& field) { return laplacian_impl(field); }

Field laplacian_adjoint(const Field& cotangent) {
  const int w = cotangent.width();
  const int h = cotangent.height();
  Field out(w, h);
  for (int y = 0; y < h; ++y) {
    const int up = std::max(y - 1, 0);
    const int down = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int left = std::max(x - 1, 0);
      const int right = std::min(x + 1, w - 1);
      for (int c = 0; c < 3; ++c) {
        const double g = cotangent.at(x, y, c);
        out.at(x, up, c) += g;
        out.at(x, down, c) += g;
        out.at(left, y, c) += g;
        out.at(right, y, c) += g;
        out.at(x, y, c) -= 4.0 * g;
      }
    }
  }
  return out;
}

double l1_distance(const Image& a, const Image& b) {
  require_same_extent(a, b, "l1_distance");
  const auto va = a.values();
  const auto vb = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) sum += std::abs(va[i] - vb[i]);
  return sum / static_cast<double>(va.size());
}

Field to_field(const Image& img) {
  return Field(img.width(), img.height(),
               std::vector<double>(img.values().begin(), img.values().end()));
}

std::pair<int, int> gier_size(int width, int height) {
  if (width < 1 || height < 1) throw ShapeError("image dimensions must be positive");
  const double short_side = std::min(width, height);
  const double long_side = std::max(width, height);
  const double scale = std::min(300.0 / short_side, 500.0 / long_side);
  return {std::max(1, static_cast<int>(std::lround(width * scale))),
          std::max(1, static_cast<int>(std::lround(height * scale)))};
}

}  // namespace omnedit

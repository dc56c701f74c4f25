// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "omnedit/error.hpp"

namespace omnedit {

// Row-major interleaved buffer of doubles. The tag keeps images, masks, HSV
// images and signed fields from being mixed up at compile time.
template <int Channels, class Tag>
class PixelBuffer {
 public:
  static constexpr int kChannels = Channels;

  PixelBuffer() = default;
  PixelBuffer(int width, int height, double fill = 0.0)
      : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw ShapeError("pixel buffer dimensions must be positive, got " +
                       std::to_string(width) + "x" + std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * height * Channels, fill);
  }
  PixelBuffer(int width, int height, std::vector<double> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) {
      throw ShapeError("pixel buffer dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height * Channels) {
      throw ShapeError("pixel buffer data length does not match dimensions");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  double at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  double* pixel(std::size_t i) { return data_.data() + i * Channels; }
  const double* pixel(std::size_t i) const {
    return data_.data() + i * Channels;
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  template <class OtherTag>
  bool same_shape(const PixelBuffer<Channels, OtherTag>& other) const {
    return width_ == other.width() && height_ == other.height();
  }
  template <int OtherChannels, class OtherTag>
  bool same_extent(const PixelBuffer<OtherChannels, OtherTag>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const PixelBuffer&, const PixelBuffer&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * Channels + c;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

struct ImageTag {};
struct HsvTag {};
struct FieldTag {};
struct MaskTag {};

// RGB intensities in [0,1].
using Image = PixelBuffer<3, ImageTag>;
// Hue as a normalized angle in [0,1), saturation and value in [0,1].
using HsvImage = PixelBuffer<3, HsvTag>;
// Signed three-channel field: Laplacians, cotangents, differences.
using Field = PixelBuffer<3, FieldTag>;
// Per-pixel weights in [0,1]. A global mask is all ones.
using Mask = PixelBuffer<1, MaskTag>;

inline Mask global_mask(int width, int height) {
  return Mask(width, height, 1.0);
}

// True when every value of the image lies in [0,1].
bool in_unit_range(const Image& img);

template <int C, class TagA, class TagB>
void require_same_extent(const PixelBuffer<C, TagA>& a,
                         const PixelBuffer<C, TagB>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": incompatible operands " +
                     std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + " vs " +
                     std::to_string(b.width()) + "x" +
                     std::to_string(b.height()));
  }
}

void require_mask_fits(const Image& img, const Mask& mask, const char* what);

// Derivative convention used by clipped_linear at exactly lo or hi.
enum class BoundaryGrad {
  kInterior,  // derivative 1 on the closed interval [lo, hi]
  kZero,      // derivative 1 only on the open interval (lo, hi)
};

struct ClipResult {
  double value;
  double deriv;
};

ClipResult clipped_linear(double x, double lo, double hi,
                          BoundaryGrad conv = BoundaryGrad::kInterior);

inline double clip01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Per-channel 4-neighbor Laplacian with replicate padding.
Field laplacian(const Image& img);
Field laplacian(const Field& field);
// Adjoint of laplacian(): <laplacian(a), b> == <a, laplacian_adjoint(b)>.
Field laplacian_adjoint(const Field& cotangent);

// Mean absolute difference over all pixels and channels.
double l1_distance(const Image& a, const Image& b);

Field to_field(const Image& img);

// Bilinear resampling with pixel-center alignment and edge clamping.
template <int C, class Tag>
PixelBuffer<C, Tag> resize_bilinear(const PixelBuffer<C, Tag>& src, int width,
                                    int height) {
  if (src.width() == width && src.height() == height) return src;
  PixelBuffer<C, Tag> out(width, height);
  const double sx = static_cast<double>(src.width()) / width;
  const double sy = static_cast<double>(src.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height() - 1);
    const double ty = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.width() - 1);
      const double tx = fx - x0;
      for (int c = 0; c < C; ++c) {
        const double top = (1 - tx) * src.at(x0, y0, c) + tx * src.at(x1, y0, c);
        const double bot = (1 - tx) * src.at(x0, y1, c) + tx * src.at(x1, y1, c);
        out.at(x, y, c) = (1 - ty) * top + ty * bot;
      }
    }
  }
  return out;
}

// Target size for the dataset-parity policy: short side scaled to 300, unless
// that pushes the long side past 500, in which case the long side becomes 500.
std::pair<int, int> gier_size(int width, int height);

}  // namespace omnedit

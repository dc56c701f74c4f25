// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/color.hpp"

#include <algorithm>
#include <cmath>

namespace omnedit {

namespace {
// Sector offsets n in k = (n + 6H) mod 6 for R, G, B.
constexpr double kSectorOffset[3] = {5.0, 3.0, 1.0};
}  // namespace

int argmax_channel(const Rgb& rgb) {
  int best = 0;
  if (rgb[1] > rgb[best]) best = 1;
  if (rgb[2] > rgb[best]) best = 2;
  return best;
}

int argmin_channel(const Rgb& rgb) {
  int best = 0;
  if (rgb[1] < rgb[best]) best = 1;
  if (rgb[2] < rgb[best]) best = 2;
  return best;
}

Hsv rgb_to_hsv(const Rgb& rgb) {
  const auto [r, g, b] = rgb;
  const double v = std::max({r, g, b});
  const double chroma = v - std::min({r, g, b});
  if (chroma <= 0.0) return {0.0, 0.0, v};
  const double s = chroma / v;
  double h = 0.0;
  switch (argmax_channel(rgb)) {
    case 0:
      h = (g - b) / chroma;
      if (h < 0.0) h += 6.0;
      break;
    case 1:
      h = (b - r) / chroma + 2.0;
      break;
    default:
      h = (r - g) / chroma + 4.0;
      break;
  }
  h /= 6.0;
  if (h >= 1.0) h -= 1.0;
  return {h, s, v};
}

double hue_weight(double hue, int channel) {
  double k = std::fmod(kSectorOffset[channel] + 6.0 * hue, 6.0);
  if (k < 0.0) k += 6.0;
  return std::clamp(std::min(k, 4.0 - k), 0.0, 1.0);
}

Rgb hsv_to_rgb(const Hsv& hsv) {
  const auto [h, s, v] = hsv;
  Rgb out{};
  for (int c = 0; c < 3; ++c) out[c] = v - v * s * hue_weight(h, c);
  return out;
}

HsvImage rgb_to_hsv(const Image& img) {
  HsvImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double* p = img.pixel(i);
    const Hsv hsv = rgb_to_hsv(Rgb{p[0], p[1], p[2]});
    std::copy(hsv.begin(), hsv.end(), out.pixel(i));
  }
  return out;
}

Image hsv_to_rgb(const HsvImage& img) {
  Image out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double* p = img.pixel(i);
    const Rgb rgb = hsv_to_rgb(Hsv{p[0], p[1], p[2]});
    double* o = out.pixel(i);
    for (int c = 0; c < 3; ++c) o[c] = clip01(rgb[c]);
  }
  return out;
}

}  // namespace omnedit

// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "omnedit/image.hpp"

namespace omnedit {

using Rgb = std::array<double, 3>;
using Hsv = std::array<double, 3>;

// Hexcone conversion. Hue is normalized to [0,1); gray pixels get H = S = 0.
Hsv rgb_to_hsv(const Rgb& rgb);

// Inverse hexcone conversion, channel_c = V * (1 - S * hue_weight(H, c)).
Rgb hsv_to_rgb(const Hsv& hsv);

// The piecewise-linear hue factor k_c(H) in [0,1] used by hsv_to_rgb.
double hue_weight(double hue, int channel);

HsvImage rgb_to_hsv(const Image& img);
Image hsv_to_rgb(const HsvImage& img);

// Index of the channel that defines V (first maximum in R, G, B order) and of
// the first minimum. These are the channels rgb_to_hsv depends on.
int argmax_channel(const Rgb& rgb);
int argmin_channel(const Rgb& rgb);

}  // namespace omnedit

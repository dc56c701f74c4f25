// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "omnedit/image.hpp"

namespace omnedit {

// 8-bit PNG/JPEG. Decoding maps byte b to b/255; encoding maps v to
// round(v*255). The container is chosen by file extension.
Image read_image(const std::filesystem::path& path);
void write_image(const Image& img, const std::filesystem::path& path);

// Single-channel 8-bit PNG. Color PNGs are reduced to their luminance.
Mask read_mask(const std::filesystem::path& path);
void write_mask(const Mask& mask, const std::filesystem::path& path);

// The value an intensity takes after an 8-bit encode/decode cycle.
double quantize8(double v);
Image quantize8(const Image& img);

}  // namespace omnedit

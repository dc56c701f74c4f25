// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omnedit/grounding.hpp"

namespace omnedit::grounding {

inline constexpr int kBundleVersion = 1;

// A grounding instance plus the files and gate input needed to turn its
// retrieval into a mask. Layout documented in docs/formats.md.
struct FeatureBundle {
  GroundingInstance instance;
  std::vector<std::string> region_masks;  // one per region, may be empty
  std::optional<double> global_probability;
  std::optional<std::pair<int, int>> image_size;
};

FeatureBundle parse_bundle(std::string_view text);
std::string serialize_bundle(const FeatureBundle& bundle);
FeatureBundle load_bundle(const std::filesystem::path& path);
void save_bundle(const FeatureBundle& bundle, const std::filesystem::path& path);

}  // namespace omnedit::grounding

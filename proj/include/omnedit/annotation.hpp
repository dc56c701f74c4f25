// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omnedit/ops.hpp"

namespace omnedit::annotation {

// Candidate operation names in snake_case, most frequent first.
inline constexpr std::array<std::string_view, 23> kVocabulary = {
    "brightness",     "contrast",      "saturation",    "lightness",
    "hue",            "remove_object", "tint",          "sharpen",
    "remove_bg",      "crop",          "deform_object", "denoise",
    "dehaze",         "gaussian_blur", "exposure",      "rotate",
    "black_and_white", "radial_blur",  "flip_image",    "facet_filter",
    "rotate_object",  "find_edges_filter", "flip_object",
};

bool is_known_operation(std::string_view name);

// The executable operator for an annotated name, if any. lightness is
// merged into brightness.
std::optional<ops::OpKind> executable_kind(std::string_view name);

struct OperationAnnotation {
  std::string name;
  bool local = false;
  std::vector<std::string> masks;  // relative to the annotation root

  friend bool operator==(const OperationAnnotation&, const OperationAnnotation&) = default;
};

struct AnnotationRecord {
  std::string id;
  std::string source;
  std::string target;
  std::vector<std::string> requests;
  std::vector<OperationAnnotation> operations;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

inline constexpr int kAnnotationVersion = 1;
inline constexpr std::string_view kAnnotationFile = "annotations.json";

// Throws FormatError on schema violations: unknown operation names, local
// operations without masks, missing requests, duplicate ids.
std::vector<AnnotationRecord> parse_annotations(std::string_view text);
std::string serialize_annotations(std::span<const AnnotationRecord> records);

// Reads <root>/annotations.json. A root without that file holds no records.
// With check_paths, every image and mask reference must exist.
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& root,
                                               bool check_paths = true);

struct OperationStats {
  std::string_view name;
  std::size_t occurrences = 0;
  double operation_pct = 0.0;  // share of all operation occurrences
  double image_pct = 0.0;      // share of records using the operation
  double local_pct = 0.0;      // share of its occurrences that are local
};

// One row per vocabulary entry, vocabulary order.
std::vector<OperationStats> operation_stats(std::span<const AnnotationRecord> records);

}  // namespace omnedit::annotation

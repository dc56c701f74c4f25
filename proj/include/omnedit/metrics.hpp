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

#include "omnedit/image.hpp"

namespace omnedit::metrics {

struct LabeledScore {
  double score;
  bool label;
};

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

// Predicted positive when score >= theta.
Confusion confusion_at(std::span<const LabeledScore> scores, double theta);

// Micro-averaged F1 over all (sample, label) pairs. 1 when there are no
// predicted and no actual positives. Throws DomainError on empty input.
double f1_at_threshold(std::span<const LabeledScore> scores, double theta);

// Probability that a random positive outscores a random negative, ties
// counting one half. Throws DomainError unless both classes are present.
double roc_auc(std::span<const LabeledScore> scores);

// IoU after binarizing both masks at weight >= threshold; 1 when both are
// empty. Throws ShapeError on mismatched sizes.
double mask_iou(const Mask& a, const Mask& b, double threshold = 0.5);

struct ImagePair {
  const Image* produced;
  const Image* target;
};

struct L1Summary {
  double mean = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // pairs with mismatched dimensions
};

// Mean of per-pair l1_distance, skipping pairs whose dimensions differ.
// Sums in pair order.
L1Summary dataset_l1(std::span<const ImagePair> pairs);

inline constexpr std::array<double, 5> kThresholdGrid = {0.15, 0.20, 0.25,
                                                         0.30, 0.35};

struct ThresholdRow {
  double threshold;
  std::optional<double> f1;
  std::optional<double> iou;  // mean IoU with soft masks binarized here

  friend bool operator==(const ThresholdRow&, const ThresholdRow&) = default;
};

struct EvalReport {
  std::size_t samples = 0;
  std::size_t skipped = 0;
  std::optional<double> mean_l1;
  std::optional<double> no_edit_l1;  // source vs target, for reference
  std::optional<double> roc_auc;
  std::optional<double> mean_iou;  // binarized at 0.5
  std::vector<ThresholdRow> thresholds;
  std::string f1_averaging = "micro";
  std::vector<std::string> warnings;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

inline constexpr int kReportVersion = 1;

std::string serialize_report(const EvalReport& report);
EvalReport parse_report(std::string_view text);
void save_report(const EvalReport& report, const std::filesystem::path& path);

}  // namespace omnedit::metrics

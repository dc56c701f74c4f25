// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/metrics.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "omnedit/error.hpp"

namespace omnedit::metrics {

Confusion confusion_at(std::span<const LabeledScore> scores, double theta) {
  Confusion c;
  for (const LabeledScore& s : scores) {
    const bool predicted = s.score >= theta;
    if (predicted && s.label) ++c.tp;
    else if (predicted) ++c.fp;
    else if (s.label) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1_at_threshold(std::span<const LabeledScore> scores, double theta) {
  if (scores.empty()) throw DomainError("F1 of an empty score list");
  const Confusion c = confusion_at(scores, theta);
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

double roc_auc(std::span<const LabeledScore> scores) {
  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) { return a.score < b.score; });
  double positives = 0.0;
  double rank_sum = 0.0;
  // average 1-based ranks across tie groups
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (sorted[k].label) {
        positives += 1.0;
        rank_sum += mid_rank;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(sorted.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw DomainError("ROC-AUC is undefined without both positive and negative samples");
  }
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double mask_iou(const Mask& a, const Mask& b, double threshold) {
  require_same_extent(a, b, "mask_iou");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool in_a = a.values()[i] >= threshold;
    const bool in_b = b.values()[i] >= threshold;
    inter += in_a && in_b;
    uni += in_a || in_b;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

L1Summary dataset_l1(std::span<const ImagePair> pairs) {
  L1Summary out;
  double sum = 0.0;
  for (const ImagePair& p : pairs) {
    if (!p.produced->same_shape(*p.target)) {
      ++out.skipped;
      continue;
    }
    sum += l1_distance(*p.produced, *p.target);
    ++out.evaluated;
  }
  if (out.evaluated > 0) out.mean = sum / static_cast<double>(out.evaluated);
  return out;
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> read_optional(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw FormatError(std::string("report field ") + key + " must be a number");
  return it->get<double>();
}

}  // namespace

std::string serialize_report(const EvalReport& r) {
  ordered_json doc;
  doc["version"] = kReportVersion;
  doc["samples"] = r.samples;
  doc["skipped"] = r.skipped;
  doc["mean_l1"] = optional_number(r.mean_l1);
  doc["no_edit_l1"] = optional_number(r.no_edit_l1);
  doc["roc_auc"] = optional_number(r.roc_auc);
  doc["mean_iou"] = optional_number(r.mean_iou);
  ordered_json rows = ordered_json::array();
  for (const ThresholdRow& row : r.thresholds) {
    rows.push_back({{"threshold", row.threshold},
                    {"f1", optional_number(row.f1)},
                    {"iou", optional_number(row.iou)}});
  }
  doc["thresholds"] = std::move(rows);
  doc["metadata"] = {{"f1_averaging", r.f1_averaging}, {"iou_binarization", 0.5}};
  doc["warnings"] = r.warnings;
  return doc.dump(2) + "\n";
}

EvalReport parse_report(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kReportVersion) {
      throw FormatError("unsupported report version");
    }
    EvalReport r;
    r.samples = doc.at("samples").get<std::size_t>();
    r.skipped = doc.at("skipped").get<std::size_t>();
    r.mean_l1 = read_optional(doc, "mean_l1");
    r.no_edit_l1 = read_optional(doc, "no_edit_l1");
    r.roc_auc = read_optional(doc, "roc_auc");
    r.mean_iou = read_optional(doc, "mean_iou");
    for (const json& row : doc.at("thresholds")) {
      r.thresholds.push_back({row.at("threshold").get<double>(),
                              read_optional(row, "f1"), read_optional(row, "iou")});
    }
    r.f1_averaging = doc.at("metadata").at("f1_averaging").get<std::string>();
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write report " + path.string());
  out << serialize_report(report);
  if (!out) throw FormatError("failed writing report " + path.string());
}

}  // namespace omnedit::metrics

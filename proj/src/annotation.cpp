// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/annotation.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "omnedit/error.hpp"

namespace omnedit::annotation {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_string(const json& node, const char* key, const std::string& where) {
  const auto it = node.find(key);
  if (it == node.end() || !it->is_string()) {
    throw FormatError(where + "." + key + " must be a string");
  }
  return it->get<std::string>();
}

std::size_t vocabulary_index(std::string_view name) {
  return static_cast<std::size_t>(
      std::find(kVocabulary.begin(), kVocabulary.end(), name) - kVocabulary.begin());
}

OperationAnnotation read_operation(const json& node, const std::string& where) {
  if (!node.is_object()) throw FormatError(where + " must be an object");
  OperationAnnotation op;
  op.name = read_string(node, "name", where);
  if (!is_known_operation(op.name)) {
    throw FormatError(where + ": unknown operation '" + op.name + "'");
  }
  if (const auto it = node.find("local"); it != node.end()) {
    if (!it->is_boolean()) throw FormatError(where + ".local must be a boolean");
    op.local = it->get<bool>();
  }
  if (const auto it = node.find("masks"); it != node.end()) {
    if (!it->is_array()) throw FormatError(where + ".masks must be an array");
    for (const json& m : *it) {
      if (!m.is_string()) throw FormatError(where + ".masks must hold strings");
      op.masks.push_back(m.get<std::string>());
    }
  }
  if (op.local && op.masks.empty()) {
    throw FormatError(where + ": local operation '" + op.name + "' has no mask");
  }
  return op;
}

}  // namespace

bool is_known_operation(std::string_view name) {
  return vocabulary_index(name) < kVocabulary.size();
}

std::optional<ops::OpKind> executable_kind(std::string_view name) {
  using ops::OpKind;
  if (name == "brightness" || name == "lightness") return OpKind::kBrightness;
  if (name == "contrast") return OpKind::kContrast;
  if (name == "saturation") return OpKind::kSaturation;
  if (name == "hue") return OpKind::kHue;
  if (name == "tint") return OpKind::kTint;
  if (name == "sharpen") return OpKind::kSharpness;
  if (name == "remove_object") return OpKind::kInpaintObj;
  if (name == "remove_bg") return OpKind::kColorBg;
  return std::nullopt;
}

std::vector<AnnotationRecord> parse_annotations(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("annotations are not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("annotations must be a JSON object");
  const auto version = doc.find("version");
  if (version == doc.end() || !version->is_number_integer() ||
      version->get<int>() != kAnnotationVersion) {
    throw FormatError("unsupported annotation version");
  }
  const auto records = doc.find("records");
  if (records == doc.end() || !records->is_array()) {
    throw FormatError("annotations need a records array");
  }
  std::vector<AnnotationRecord> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < records->size(); ++i) {
    const json& node = (*records)[i];
    const std::string where = "records[" + std::to_string(i) + "]";
    if (!node.is_object()) throw FormatError(where + " must be an object");
    AnnotationRecord rec;
    rec.id = read_string(node, "id", where);
    if (!ids.insert(rec.id).second) throw FormatError("duplicate record id '" + rec.id + "'");
    rec.source = read_string(node, "source", where);
    rec.target = read_string(node, "target", where);
    const auto requests = node.find("requests");
    if (requests == node.end() || !requests->is_array() || requests->empty()) {
      throw FormatError(where + ".requests must be a non-empty array");
    }
    for (const json& r : *requests) {
      if (!r.is_string()) throw FormatError(where + ".requests must hold strings");
      rec.requests.push_back(r.get<std::string>());
    }
    const auto operations = node.find("operations");
    if (operations == node.end() || !operations->is_array()) {
      throw FormatError(where + ".operations must be an array");
    }
    for (std::size_t k = 0; k < operations->size(); ++k) {
      rec.operations.push_back(
          read_operation((*operations)[k], where + ".operations[" + std::to_string(k) + "]"));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string serialize_annotations(std::span<const AnnotationRecord> records) {
  ordered_json list = ordered_json::array();
  for (const AnnotationRecord& rec : records) {
    ordered_json ops = ordered_json::array();
    for (const OperationAnnotation& op : rec.operations) {
      ops.push_back({{"name", op.name}, {"local", op.local}, {"masks", op.masks}});
    }
    list.push_back({{"id", rec.id},
                    {"source", rec.source},
                    {"target", rec.target},
                    {"requests", rec.requests},
                    {"operations", std::move(ops)}});
  }
  ordered_json doc;
  doc["version"] = kAnnotationVersion;
  doc["records"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& root,
                                               bool check_paths) {
  if (!std::filesystem::is_directory(root)) {
    throw FormatError("annotation root is not a directory: " + root.string());
  }
  const std::filesystem::path file = root / kAnnotationFile;
  if (!std::filesystem::exists(file)) return {};
  std::ifstream in(file);
  if (!in) throw FormatError("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::vector<AnnotationRecord> records;
  try {
    records = parse_annotations(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
  if (check_paths) {
    auto require = [&](const std::string& rel, const std::string& id) {
      if (!std::filesystem::exists(root / rel)) {
        throw FormatError("record '" + id + "' references missing file " + (root / rel).string());
      }
    };
    for (const AnnotationRecord& rec : records) {
      require(rec.source, rec.id);
      require(rec.target, rec.id);
      for (const OperationAnnotation& op : rec.operations) {
        for (const std::string& m : op.masks) require(m, rec.id);
      }
    }
  }
  return records;
}

std::vector<OperationStats> operation_stats(std::span<const AnnotationRecord> records) {
  std::vector<OperationStats> rows(kVocabulary.size());
  std::vector<std::size_t> images(kVocabulary.size(), 0);
  std::vector<std::size_t> local(kVocabulary.size(), 0);
  std::size_t total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].name = kVocabulary[i];
  for (const AnnotationRecord& rec : records) {
    std::vector<bool> seen(kVocabulary.size(), false);
    for (const OperationAnnotation& op : rec.operations) {
      const std::size_t i = vocabulary_index(op.name);
      if (i >= kVocabulary.size()) continue;
      ++rows[i].occurrences;
      ++total;
      local[i] += op.local;
      if (!seen[i]) ++images[i];
      seen[i] = true;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double occ = static_cast<double>(rows[i].occurrences);
    if (total > 0) rows[i].operation_pct = 100.0 * occ / static_cast<double>(total);
    if (!records.empty()) {
      rows[i].image_pct = 100.0 * static_cast<double>(images[i]) / static_cast<double>(records.size());
    }
    if (occ > 0) rows[i].local_pct = 100.0 * static_cast<double>(local[i]) / occ;
  }
  return rows;
}

}  // namespace omnedit::annotation

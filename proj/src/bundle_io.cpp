// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/bundle_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "omnedit/error.hpp"

namespace omnedit::grounding {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const json& field(const json& node, const char* key, const std::string& where) {
  const auto it = node.find(key);
  if (it == node.end()) throw FormatError(where + ": missing '" + key + "'");
  return *it;
}

Vec read_vec(const json& node, const std::string& where) {
  if (!node.is_array()) throw FormatError(where + " must be a number array");
  Vec out;
  for (const json& v : node) {
    if (!v.is_number()) throw FormatError(where + " must be a number array");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<Vec> read_matrix(const json& node, const std::string& where) {
  if (!node.is_array()) throw FormatError(where + " must be an array of arrays");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(read_vec(node[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::array<Vec, kModuleCount> read_modules(const json& node, const std::string& where) {
  if (!node.is_object()) throw FormatError(where + " must be an object keyed by module");
  std::array<Vec, kModuleCount> out;
  for (Module m : kModules) {
    const std::string key(name(m));
    out[static_cast<std::size_t>(m)] = read_vec(field(node, key.c_str(), where), where + "." + key);
  }
  return out;
}

ordered_json write_modules(const std::array<Vec, kModuleCount>& v) {
  ordered_json node = ordered_json::object();
  for (Module m : kModules) node[std::string(name(m))] = v[static_cast<std::size_t>(m)];
  return node;
}

}  // namespace

FeatureBundle parse_bundle(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("feature bundle is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("feature bundle must be a JSON object");
  const json& version = field(doc, "version", "bundle");
  if (!version.is_number_integer() || version.get<int>() != kBundleVersion) {
    throw FormatError("unsupported feature bundle version");
  }
  FeatureBundle b;
  GroundingInstance& inst = b.instance;
  inst.tokens = read_matrix(field(doc, "tokens", "bundle"), "tokens");
  inst.hidden = read_matrix(field(doc, "hidden", "bundle"), "hidden");
  inst.operation = read_vec(field(doc, "operation", "bundle"), "operation");
  inst.module_keys = read_modules(field(doc, "module_keys", "bundle"), "module_keys");
  const Vec w = read_vec(field(doc, "module_weights", "bundle"), "module_weights");
  if (w.size() != kModuleCount) throw FormatError("module_weights must hold 3 numbers");
  std::copy(w.begin(), w.end(), inst.module_weights.begin());

  const json& regions = field(doc, "regions", "bundle");
  if (!regions.is_array()) throw FormatError("regions must be an array");
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const std::string where = "regions[" + std::to_string(r) + "]";
    inst.regions.push_back(read_modules(field(regions[r], "features", where), where + ".features"));
    std::string mask;
    if (const auto it = regions[r].find("mask"); it != regions[r].end()) {
      if (!it->is_string()) throw FormatError(where + ".mask must be a string");
      mask = it->get<std::string>();
    }
    b.region_masks.push_back(std::move(mask));
  }
  if (const auto it = doc.find("global_probability"); it != doc.end() && !it->is_null()) {
    if (!it->is_number()) throw FormatError("global_probability must be a number");
    b.global_probability = it->get<double>();
    if (*b.global_probability < 0.0 || *b.global_probability > 1.0) {
      throw FormatError("global_probability must lie in [0, 1]");
    }
  }
  if (const auto it = doc.find("image_size"); it != doc.end() && !it->is_null()) {
    const Vec size = read_vec(*it, "image_size");
    if (size.size() != 2 || size[0] < 1 || size[1] < 1) {
      throw FormatError("image_size must be [width, height]");
    }
    b.image_size = {static_cast<int>(size[0]), static_cast<int>(size[1])};
  }
  try {
    inst.validate();
  } catch (const std::logic_error& e) {
    throw FormatError(std::string("feature bundle: ") + e.what());
  }
  return b;
}

std::string serialize_bundle(const FeatureBundle& b) {
  b.instance.validate();
  ordered_json doc;
  doc["version"] = kBundleVersion;
  doc["tokens"] = b.instance.tokens;
  doc["hidden"] = b.instance.hidden;
  doc["operation"] = b.instance.operation;
  doc["module_keys"] = write_modules(b.instance.module_keys);
  doc["module_weights"] = b.instance.module_weights;
  ordered_json regions = ordered_json::array();
  for (std::size_t r = 0; r < b.instance.regions.size(); ++r) {
    ordered_json node;
    node["features"] = write_modules(b.instance.regions[r]);
    if (r < b.region_masks.size() && !b.region_masks[r].empty()) {
      node["mask"] = b.region_masks[r];
    }
    regions.push_back(std::move(node));
  }
  doc["regions"] = std::move(regions);
  if (b.global_probability) doc["global_probability"] = *b.global_probability;
  if (b.image_size) doc["image_size"] = {b.image_size->first, b.image_size->second};
  return doc.dump(2) + "\n";
}

FeatureBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open feature bundle " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_bundle(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_bundle(const FeatureBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write feature bundle " + path.string());
  out << serialize_bundle(bundle);
}

}  // namespace omnedit::grounding

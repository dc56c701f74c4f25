// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/script_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "omnedit/error.hpp"
#include "omnedit/image_io.hpp"

namespace omnedit::omn {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<double> read_numbers(const json& node, const std::string& where) {
  if (!node.is_array()) throw FormatError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const json& v : node) {
    if (!v.is_number()) throw FormatError(where + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

OpInvocation read_step(const json& node, std::size_t index) {
  const std::string where = "steps[" + std::to_string(index) + "]";
  if (!node.is_object()) throw FormatError(where + " must be an object");
  const auto op = node.find("op");
  if (op == node.end() || !op->is_string()) {
    throw FormatError(where + ".op must be a string");
  }
  const auto kind = ops::parse_kind(op->get<std::string>());
  if (!kind) throw FormatError(where + ": unknown operation '" + op->get<std::string>() + "'");

  OpInvocation step{*kind, {}, ParamMode::kFixed, GlobalMaskRef{}};
  if (const auto mask = node.find("mask"); mask != node.end()) {
    if (!mask->is_string()) throw FormatError(where + ".mask must be a string");
    const std::string ref = mask->get<std::string>();
    if (ref.empty()) throw FormatError(where + ".mask is empty");
    if (ref != "global") step.mask = ref;
  }
  const auto params = node.find("params");
  if (params == node.end()) {
    if (ops::param_arity(*kind) != 0) throw FormatError(where + ".params missing");
  } else if (params->is_string()) {
    if (params->get<std::string>() != "fit") {
      throw FormatError(where + ".params must be a number array or \"fit\"");
    }
    step.mode = ParamMode::kFit;
    step.params = ops::identity_params(*kind);
    if (const auto init = node.find("init"); init != node.end()) {
      step.params = read_numbers(*init, where + ".init");
    }
  } else {
    step.params = read_numbers(*params, where + ".params");
  }
  return step;
}

}  // namespace

EditScript parse_script(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("edit script is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("edit script must be a JSON object");
  const auto version = doc.find("version");
  if (version == doc.end() || !version->is_number_integer()) {
    throw FormatError("edit script needs an integer version");
  }
  if (version->get<int>() != kScriptVersion) {
    throw FormatError("unsupported edit script version " +
                      std::to_string(version->get<int>()));
  }
  const auto steps = doc.find("steps");
  if (steps == doc.end() || !steps->is_array()) {
    throw FormatError("edit script needs a steps array");
  }
  EditScript script;
  for (std::size_t i = 0; i < steps->size(); ++i) {
    script.steps.push_back(read_step((*steps)[i], i));
  }
  validate(script);
  return script;
}

std::string serialize_script(const EditScript& script) {
  validate(script);
  ordered_json steps = ordered_json::array();
  for (const OpInvocation& step : script.steps) {
    ordered_json node;
    node["op"] = std::string(ops::name(step.kind));
    node["mask"] = std::holds_alternative<GlobalMaskRef>(step.mask)
                       ? std::string("global")
                       : std::get<std::string>(step.mask);
    if (step.mode == ParamMode::kFit) {
      node["params"] = "fit";
      if (step.params != ops::identity_params(step.kind)) node["init"] = step.params;
    } else {
      node["params"] = step.params;
    }
    steps.push_back(std::move(node));
  }
  ordered_json doc;
  doc["version"] = kScriptVersion;
  doc["steps"] = std::move(steps);
  return doc.dump(2) + "\n";
}

EditScript load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open edit script " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_script(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_script(const EditScript& script, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write edit script " + path.string());
  out << serialize_script(script);
  if (!out) throw FormatError("failed writing edit script " + path.string());
}

std::vector<Mask> resolve_masks(const EditScript& script,
                                const std::filesystem::path& base_dir,
                                int width, int height) {
  std::vector<Mask> masks;
  for (const OpInvocation& step : script.steps) {
    if (std::holds_alternative<GlobalMaskRef>(step.mask)) {
      masks.push_back(global_mask(width, height));
      continue;
    }
    std::filesystem::path p = std::get<std::string>(step.mask);
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) {
      throw FormatError("mask file not found: " + p.string());
    }
    Mask m = read_mask(p);
    if (m.width() != width || m.height() != height) {
      throw ShapeError("mask " + p.string() + " is " + std::to_string(m.width()) +
                       "x" + std::to_string(m.height()) + ", image is " +
                       std::to_string(width) + "x" + std::to_string(height));
    }
    masks.push_back(std::move(m));
  }
  return masks;
}

}  // namespace omnedit::omn

// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "omnedit/annotation.hpp"
#include "omnedit/bundle_io.hpp"
#include "omnedit/error.hpp"
#include "omnedit/image_io.hpp"
#include "omnedit/rng.hpp"
#include "omnedit/script_io.hpp"

namespace omnedit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class Buffer>
Buffer resized(const Buffer& b, ResizePolicy policy) {
  if (policy == ResizePolicy::kNative) return b;
  const auto [w, h] = gier_size(b.width(), b.height());
  return resize_bilinear(b, w, h);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

void write_trace(const omn::ExecutionTrace& trace, const fs::path& out) {
  for (std::size_t k = 0; k < trace.images.size(); ++k) {
    write_image(trace.images[k], numbered_path(out, static_cast<int>(k)));
  }
}

template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }
}

std::optional<fs::path> find_prediction(const fs::path& dir, const std::string& id) {
  for (const char* ext : {".png", ".jpg", ".jpeg"}) {
    fs::path p = dir / (id + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

// Script, masks and status for fitting a record's annotated operations.
struct GroundTruthPlan {
  omn::EditScript script;
  std::vector<Mask> masks;
  std::vector<std::string> ignored;
};

GroundTruthPlan plan_ground_truth(const annotation::AnnotationRecord& rec,
                                  const fs::path& root, int width, int height) {
  std::map<ops::OpKind, std::optional<Mask>> regions;  // nullopt: global
  GroundTruthPlan plan;
  for (const annotation::OperationAnnotation& op : rec.operations) {
    const auto kind = annotation::executable_kind(op.name);
    if (!kind) {
      plan.ignored.push_back(op.name);
      continue;
    }
    auto [it, inserted] = regions.try_emplace(*kind, Mask(width, height, 0.0));
    if (!op.local) {
      it->second.reset();
      continue;
    }
    if (!it->second) continue;
    for (const std::string& rel : op.masks) {
      const Mask m = read_mask(root / rel);
      if (m.width() != width || m.height() != height) {
        throw ShapeError("mask " + rel + " does not match the source image");
      }
      for (std::size_t i = 0; i < m.size(); ++i) {
        it->second->values()[i] = std::max(it->second->values()[i], m.values()[i]);
      }
    }
  }
  std::vector<ops::OpKind> kinds;
  for (const auto& entry : regions) kinds.push_back(entry.first);
  for (ops::OpKind k : omn::canonical_order(kinds)) {
    plan.script.steps.push_back(ops::is_differentiable(k)
                                    ? omn::fit(k)
                                    : omn::fixed(k, {}));
    const auto& region = regions.at(k);
    plan.masks.push_back(region ? *region : global_mask(width, height));
  }
  return plan;
}

}  // namespace

std::optional<ResizePolicy> parse_resize_policy(std::string_view text) {
  if (text == "native") return ResizePolicy::kNative;
  if (text == "gier") return ResizePolicy::kGier;
  return std::nullopt;
}

fs::path numbered_path(const fs::path& out, int k) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + ".step" + std::to_string(k) +
                     out.extension().string());
  return p;
}

fs::path sibling_path(const fs::path& out, std::string_view suffix) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + std::string(suffix));
  return p;
}

int cmd_apply(const ApplyOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const omn::EditScript script = omn::load_script(opt.script);
    for (const omn::OpInvocation& step : script.steps) {
      if (step.mode == omn::ParamMode::kFit) {
        throw DomainError("script has unfitted parameters; run fit first");
      }
    }
    const Image native = read_image(opt.image);
    std::vector<Mask> masks = omn::resolve_masks(script, opt.script.parent_path(),
                                                 native.width(), native.height());
    const Image input = resized(native, opt.resize);
    for (Mask& m : masks) m = resized(m, opt.resize);
    const omn::ExecutionTrace trace = omn::execute(script, input, masks);
    write_image(trace.final_image(), opt.out);
    if (opt.save_intermediate) write_trace(trace, opt.out);
    log << "applied " << script.steps.size() << " steps -> " << opt.out.string() << "\n";
    return kExitOk;
  });
}

int cmd_fit(const FitOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    opt.fit.validate();
    const omn::EditScript script = omn::load_script(opt.script);
    const Image source_native = read_image(opt.source);
    const Image target_native = read_image(opt.target);
    require_same_extent(source_native, target_native, "fit");
    std::vector<Mask> masks = omn::resolve_masks(
        script, opt.script.parent_path(), source_native.width(), source_native.height());
    const Image source = resized(source_native, opt.resize);
    const Image target = resized(target_native, opt.resize);
    for (Mask& m : masks) m = resized(m, opt.resize);

    const omn::FitResult r = omn::fit_parameters(script, source, target, masks, opt.fit);
    write_image(r.trace.final_image(), opt.out);
    if (opt.save_intermediate) write_trace(r.trace, opt.out);
    omn::save_script(r.script, sibling_path(opt.out, ".fitted.json"));
    std::ostringstream csv;
    csv << std::setprecision(17) << "iteration,loss,best\n";
    for (std::size_t t = 0; t < r.loss_history.size(); ++t) {
      csv << t << "," << r.loss_history[t] << "," << r.best_history[t] << "\n";
    }
    write_text(sibling_path(opt.out, ".loss.csv"), csv.str());

    log << "status " << omn::to_string(r.status) << ", iterations " << r.iterations
        << ", best loss " << r.best_loss << ", final L1 " << r.final_l1 << "\n";
    if (r.status == omn::FitStatus::kNoImprovement) {
      log << "warning: no loss decrease; identity parameters written\n";
      return kExitWarning;
    }
    return kExitOk;
  });
}

int cmd_ground(const GroundOptions& opt, std::ostream& stdout_stream, std::ostream& log) {
  return guarded(log, [&] {
    opt.policy.validate();
    const grounding::FeatureBundle bundle = grounding::load_bundle(opt.bundle);
    const fs::path base = opt.bundle.parent_path();
    const auto& inst = bundle.instance;

    std::vector<double> scores = grounding::match_scores(inst);
    const bool global = bundle.global_probability &&
                        opt.policy.is_global(*bundle.global_probability);
    std::vector<std::size_t> selected;
    if (!global) {
      if (scores.empty()) throw DomainError("local grounding needs at least one region");
      selected = grounding::retrieve_regions(scores, opt.policy.theta_ground);
    }

    std::vector<Mask> chosen;
    for (std::size_t r : selected) {
      if (bundle.region_masks[r].empty()) {
        throw FormatError("region " + std::to_string(r) + " has no mask file");
      }
      chosen.push_back(read_mask(base / bundle.region_masks[r]));
    }
    int width = 0;
    int height = 0;
    if (!chosen.empty()) {
      width = chosen.front().width();
      height = chosen.front().height();
    } else if (bundle.image_size) {
      std::tie(width, height) = *bundle.image_size;
    } else {
      for (const std::string& m : bundle.region_masks) {
        if (m.empty()) continue;
        const Mask probe = read_mask(base / m);
        width = probe.width();
        height = probe.height();
        break;
      }
    }
    if (width == 0) throw FormatError("bundle gives no image size and no region masks");
    const Mask mask = grounding::compose_mask(chosen, global, width, height);
    write_mask(mask, opt.out);

    nlohmann::ordered_json doc;
    doc["global"] = global;
    doc["global_probability"] =
        bundle.global_probability ? nlohmann::ordered_json(*bundle.global_probability) : nlohmann::ordered_json(nullptr);
    doc["scores"] = scores;
    doc["selected"] = selected;
    doc["mask"] = opt.out.string();
    const std::string text = doc.dump(2) + "\n";
    write_text(sibling_path(opt.out, ".regions.json"), text);
    stdout_stream << text;
    return kExitOk;
  });
}

metrics::EvalReport evaluate(const EvalOptions& opt, std::ostream& log) {
  const std::vector<annotation::AnnotationRecord> records =
      annotation::load_annotations(opt.annotations);
  const bool fit_mode = opt.predictions.empty();
  metrics::EvalReport report;
  auto warn = [&](const std::string& msg) {
    report.warnings.push_back(msg);
    log << "warning: " << msg << "\n";
  };

  json scores_doc;
  if (!fit_mode) {
    const fs::path scores_path = opt.predictions / "scores.json";
    if (fs::exists(scores_path)) {
      std::ifstream in(scores_path);
      try {
        scores_doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw FormatError(scores_path.string() + ": " + e.what());
      }
    }
  }

  std::vector<Image> produced;
  std::vector<Image> targets;
  std::vector<Image> sources;
  std::vector<metrics::LabeledScore> labeled;
  std::vector<std::pair<Mask, Mask>> mask_pairs;  // predicted, ground truth
  std::size_t unmatched = 0;

  for (const annotation::AnnotationRecord& rec : records) {
    try {
      Image source = read_image(opt.annotations / rec.source);
      Image target = read_image(opt.annotations / rec.target);
      if (!source.same_shape(target)) {
        warn("record " + rec.id + ": source and target sizes differ");
        ++unmatched;
        continue;
      }
      Image prediction;
      if (fit_mode) {
        GroundTruthPlan plan = plan_ground_truth(rec, opt.annotations, source.width(), source.height());
        for (const std::string& name : plan.ignored) {
          warn("record " + rec.id + ": operation " + name + " has no executable operator");
        }
        source = resized(source, opt.resize);
        target = resized(target, opt.resize);
        for (Mask& m : plan.masks) m = resized(m, opt.resize);
        bool has_fit = false;
        for (const auto& s : plan.script.steps) has_fit = has_fit || s.mode == omn::ParamMode::kFit;
        if (has_fit) {
          prediction = omn::fit_parameters(plan.script, source, target, plan.masks, opt.fit)
                           .trace.final_image();
        } else {
          prediction = omn::execute(plan.script, source, plan.masks).final_image();
        }
      } else {
        const auto path = find_prediction(opt.predictions, rec.id);
        if (!path) {
          warn("record " + rec.id + ": no prediction image");
          ++unmatched;
          continue;
        }
        prediction = resized(read_image(*path), opt.resize);
        source = resized(source, opt.resize);
        target = resized(target, opt.resize);
        if (const auto it = scores_doc.find(rec.id); it != scores_doc.end()) {
          for (const auto& [name, value] : it->items()) {
            const bool label = std::any_of(rec.operations.begin(), rec.operations.end(),
                                           [&](const auto& op) { return op.name == name; });
            labeled.push_back({value.get<double>(), label});
          }
        }
        const fs::path mask_path = opt.predictions / (rec.id + ".mask.png");
        if (fs::exists(mask_path)) {
          Mask gt(source.width(), source.height(), 0.0);
          bool any_local = false;
          for (const auto& op : rec.operations) {
            if (!op.local) continue;
            any_local = true;
            for (const std::string& rel : op.masks) {
              const Mask m = resized(read_mask(opt.annotations / rel), opt.resize);
              require_same_extent(gt, m, "ground-truth mask");
              for (std::size_t i = 0; i < m.size(); ++i) {
                gt.values()[i] = std::max(gt.values()[i], m.values()[i]);
              }
            }
          }
          if (!any_local) gt = global_mask(source.width(), source.height());
          mask_pairs.emplace_back(resized(read_mask(mask_path), opt.resize), std::move(gt));
        }
      }
      produced.push_back(std::move(prediction));
      targets.push_back(std::move(target));
      sources.push_back(std::move(source));
    } catch (const std::exception& e) {
      warn("record " + rec.id + ": " + e.what());
      ++unmatched;
    }
  }

  std::vector<metrics::ImagePair> pairs;
  std::vector<metrics::ImagePair> floor;
  for (std::size_t i = 0; i < produced.size(); ++i) {
    pairs.push_back({&produced[i], &targets[i]});
    floor.push_back({&sources[i], &targets[i]});
  }
  const metrics::L1Summary l1 = metrics::dataset_l1(pairs);
  if (l1.skipped > 0) warn(std::to_string(l1.skipped) + " predictions differ in size from their targets");
  report.samples = l1.evaluated;
  report.skipped = unmatched + l1.skipped;
  if (l1.evaluated > 0) {
    report.mean_l1 = l1.mean;
    report.no_edit_l1 = metrics::dataset_l1(floor).mean;
  }

  bool both_classes = false;
  if (!labeled.empty()) {
    const auto pos = std::count_if(labeled.begin(), labeled.end(), [](const auto& s) { return s.label; });
    both_classes = pos > 0 && pos < static_cast<long>(labeled.size());
    if (both_classes) report.roc_auc = metrics::roc_auc(labeled);
  }
  std::vector<std::pair<const Mask*, const Mask*>> valid_masks;
  for (const auto& [pred, gt] : mask_pairs) {
    if (pred.same_shape(gt)) valid_masks.emplace_back(&pred, &gt);
    else warn("a predicted mask differs in size from its ground truth");
  }
  auto mean_iou = [&](double theta) {
    double sum = 0.0;
    for (const auto& [pred, gt] : valid_masks) sum += metrics::mask_iou(*pred, *gt, theta);
    return sum / static_cast<double>(valid_masks.size());
  };
  if (!valid_masks.empty()) report.mean_iou = mean_iou(0.5);
  if (!labeled.empty() || !valid_masks.empty()) {
    for (double theta : metrics::kThresholdGrid) {
      metrics::ThresholdRow row{theta, std::nullopt, std::nullopt};
      if (!labeled.empty()) row.f1 = metrics::f1_at_threshold(labeled, theta);
      if (!valid_masks.empty()) row.iou = mean_iou(theta);
      report.thresholds.push_back(row);
    }
  }
  return report;
}

int cmd_eval(const EvalOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    opt.fit.validate();
    const metrics::EvalReport report = evaluate(opt, log);
    metrics::save_report(report, opt.out);
    log << "evaluated " << report.samples << " records, skipped " << report.skipped;
    if (report.mean_l1) log << ", mean L1 " << *report.mean_l1;
    log << "\n";
    return kExitOk;
  });
}

int cmd_stats(const StatsOptions& opt, std::ostream& stdout_stream, std::ostream& log) {
  return guarded(log, [&] {
    const auto records = annotation::load_annotations(opt.annotations, false);
    const auto rows = annotation::operation_stats(records);
    stdout_stream << std::left << std::setw(20) << "operation" << std::right
                  << std::setw(8) << "occur" << std::setw(9) << "opr%"
                  << std::setw(9) << "img%" << std::setw(9) << "local%" << "\n";
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    stdout_stream << std::fixed << std::setprecision(2);
    for (const auto& row : rows) {
      stdout_stream << std::left << std::setw(20) << row.name << std::right
                    << std::setw(8) << row.occurrences << std::setw(9) << row.operation_pct
                    << std::setw(9) << row.image_pct << std::setw(9) << row.local_pct << "\n";
      table.push_back({{"operation", row.name},
                       {"occur", row.occurrences},
                       {"opr_pct", row.operation_pct},
                       {"img_pct", row.image_pct},
                       {"local_pct", row.local_pct}});
    }
    stdout_stream << "records " << records.size() << "\n";
    if (!opt.out.empty()) {
      nlohmann::ordered_json doc;
      doc["records"] = records.size();
      doc["operations"] = std::move(table);
      write_text(opt.out, doc.dump(2) + "\n");
    }
    return kExitOk;
  });
}

int cmd_gradcheck(const GradcheckOptions& opt, std::ostream& stdout_stream,
                  std::ostream& log) {
  return guarded(log, [&] {
    const auto kind = ops::parse_kind(opt.op);
    if (!kind) throw DomainError("unknown operation '" + opt.op + "'");
    if (!ops::is_differentiable(*kind)) {
      throw DomainError("non-differentiable operation: " + opt.op);
    }
    constexpr int kSide = 12;
    constexpr double kStep = 1e-4;
    Rng rng(opt.seed);
    int failures = 0;
    stdout_stream << "config  max_rel_error  result\n";
    for (int i = 0; i < opt.configs; ++i) {
      ops::GradCheckReport rep;
      for (int attempt = 0;; ++attempt) {
        Image img(kSide, kSide);
        for (double& v : img.values()) v = rng.uniform();
        Mask mask(kSide, kSide);
        for (double& v : mask.values()) {
          const double u = rng.uniform();
          v = u < 0.2 ? 0.0 : (u < 0.5 ? 1.0 : rng.uniform());
        }
        std::vector<double> params = ops::identity_params(*kind);
        if (i > 0) {
          for (double& v : params) {
            v = ops::param_arity(*kind) == 1 ? rng.uniform(-0.9, 2.0) : rng.uniform(0.05, 3.0);
          }
        }
        rep = ops::finite_diff_check(*kind, img, params, mask, kStep);
        if (!rep.near_breakpoint) break;
        if (attempt == 50) throw DomainError("could not draw a configuration away from clip breakpoints");
      }
      const bool pass = rep.max_rel_error < opt.tolerance;
      failures += !pass;
      stdout_stream << std::setw(6) << i << "  " << std::scientific << std::setprecision(3)
                    << std::setw(13) << rep.max_rel_error << "  " << (pass ? "pass" : "FAIL")
                    << "\n" << std::defaultfloat;
    }
    stdout_stream << opt.op << ": " << (failures == 0 ? "pass" : "fail") << " ("
                  << opt.configs - failures << "/" << opt.configs << ")\n";
    return failures == 0 ? kExitOk : kExitError;
  });
}

}  // namespace omnedit::cli

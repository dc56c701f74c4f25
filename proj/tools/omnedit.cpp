// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
//
// omnedit: apply, fit, ground, eval, stats and gradcheck from the shell.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "omnedit/commands.hpp"

namespace {

using omnedit::cli::ResizePolicy;

const std::map<std::string, ResizePolicy> kPolicies = {
    {"native", ResizePolicy::kNative}, {"gier", ResizePolicy::kGier}};

void add_fit_flags(CLI::App* cmd, omnedit::omn::FitConfig& cfg) {
  cmd->add_option("--lambda", cfg.lambda, "triplet loss weight")->capture_default_str();
  cmd->add_option("--triplet-margin", cfg.triplet_margin, "triplet margin")->capture_default_str();
  cmd->add_option("--lr", cfg.learning_rate, "learning rate")->capture_default_str();
  cmd->add_option("--iters", cfg.iterations, "iteration budget")->capture_default_str();
  cmd->add_option("--restarts", cfg.restarts, "extra random-start fits")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "seed for random restarts")->capture_default_str();
}

void add_resize_flag(CLI::App* cmd, ResizePolicy& policy) {
  cmd->add_option("--resize-policy", policy, "native or gier (short side 300, long side <= 500)")
      ->transform(CLI::CheckedTransformer(kPolicies, CLI::ignore_case))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operation-modular image editing"};
  app.require_subcommand(1);

  omnedit::cli::ApplyOptions apply;
  auto* apply_cmd = app.add_subcommand("apply", "execute an edit script");
  apply_cmd->add_option("--script", apply.script, "edit script")->required()->check(CLI::ExistingFile);
  apply_cmd->add_option("--image", apply.image, "input image")->required()->check(CLI::ExistingFile);
  apply_cmd->add_option("--out", apply.out, "output image")->required();
  apply_cmd->add_flag("--save-intermediate", apply.save_intermediate, "write every step image");
  add_resize_flag(apply_cmd, apply.resize);

  omnedit::cli::FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit script parameters to a target image");
  fit_cmd->add_option("--script", fit.script, "edit script with fit parameters")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--source", fit.source, "source image")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--target", fit.target, "target image")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", fit.out, "output image")->required();
  fit_cmd->add_flag("--save-intermediate", fit.save_intermediate, "write every step image");
  add_fit_flags(fit_cmd, fit.fit);
  add_resize_flag(fit_cmd, fit.resize);

  omnedit::cli::GroundOptions ground;
  auto* ground_cmd = app.add_subcommand("ground", "retrieve regions from a feature bundle");
  ground_cmd->add_option("--bundle", ground.bundle, "feature bundle")->required()->check(CLI::ExistingFile);
  ground_cmd->add_option("--out", ground.out, "output mask")->required();
  ground_cmd->add_option("--theta-ground", ground.policy.theta_ground, "score threshold")->capture_default_str();
  ground_cmd->add_option("--theta-gate", ground.policy.theta_gate, "global gate threshold")->capture_default_str();

  omnedit::cli::EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate predictions against annotations");
  eval_cmd->add_option("--annotations", eval.annotations, "annotation root")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--predictions", eval.predictions,
                       "prediction root; omit to fit ground-truth operations")->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--out", eval.out, "report file")->required();
  add_fit_flags(eval_cmd, eval.fit);
  add_resize_flag(eval_cmd, eval.resize);

  omnedit::cli::StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "operation statistics of an annotation root");
  stats_cmd->add_option("--annotations", stats.annotations, "annotation root")->required()->check(CLI::ExistingDirectory);
  stats_cmd->add_option("--out", stats.out, "optional JSON copy");

  omnedit::cli::GradcheckOptions grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "compare analytic and numeric gradients");
  grad_cmd->add_option("--op", grad.op, "operation name")->required();
  grad_cmd->add_option("--seed", grad.seed, "configuration seed")->capture_default_str();
  grad_cmd->add_option("--configs", grad.configs, "number of configurations")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : omnedit::cli::kExitUsage;
  }

  if (*apply_cmd) return omnedit::cli::cmd_apply(apply, std::cerr);
  if (*fit_cmd) return omnedit::cli::cmd_fit(fit, std::cerr);
  if (*ground_cmd) return omnedit::cli::cmd_ground(ground, std::cout, std::cerr);
  if (*eval_cmd) return omnedit::cli::cmd_eval(eval, std::cerr);
  if (*stats_cmd) return omnedit::cli::cmd_stats(stats, std::cout, std::cerr);
  if (*grad_cmd) return omnedit::cli::cmd_gradcheck(grad, std::cout, std::cerr);
  return omnedit::cli::kExitUsage;
}

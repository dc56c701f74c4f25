// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "omnedit/image.hpp"
#include "omnedit/ops.hpp"

namespace omnedit::omn {

struct GlobalMaskRef {
  friend bool operator==(const GlobalMaskRef&, const GlobalMaskRef&) = default;
};
// Either the global (all-ones) mask or a mask file path.
using MaskRef = std::variant<GlobalMaskRef, std::string>;

enum class ParamMode { kFixed, kFit };

struct OpInvocation {
  ops::OpKind kind = ops::OpKind::kBrightness;
  // Fixed values, or the initial values when mode == kFit.
  std::vector<double> params;
  ParamMode mode = ParamMode::kFixed;
  MaskRef mask = GlobalMaskRef{};

  friend bool operator==(const OpInvocation&, const OpInvocation&) = default;
};

struct EditScript {
  std::vector<OpInvocation> steps;

  friend bool operator==(const EditScript&, const EditScript&) = default;
};

// Convenience constructors.
OpInvocation fixed(ops::OpKind kind, std::vector<double> params,
                   MaskRef mask = GlobalMaskRef{});
OpInvocation fit(ops::OpKind kind, MaskRef mask = GlobalMaskRef{});

// Checks arity, at most one invocation per kind, no fit state on
// parameterless kinds, and that no fitted step precedes a parameterless one.
// Throws ShapeError / DomainError.
void validate(const EditScript& script);

// inpaint_obj, color_bg, then brightness, contrast, saturation, sharpness,
// hue, tint. Duplicates are dropped.
std::vector<ops::OpKind> canonical_order(std::span<const ops::OpKind> kinds);
// Stable reorder of the script's steps into canonical order.
EditScript canonicalize(EditScript script);

struct TraceStep {
  ops::OpKind kind;
  std::vector<double> params;
};

// images[0] is the input, images[k] the output of step k.
struct ExecutionTrace {
  std::vector<Image> images;
  std::vector<TraceStep> steps;

  int length() const { return static_cast<int>(steps.size()); }
  const Image& final_image() const { return images.back(); }
};

// masks[k] is the resolved mask for step k.
ExecutionTrace execute(const EditScript& script, const Image& input,
                       std::span<const Mask> masks,
                       const ops::Inpainter& inpainter = ops::default_inpainter());
// All-global convenience overload.
ExecutionTrace execute(const EditScript& script, const Image& input);

double loss_l1(const ExecutionTrace& trace, const Image& target);
// (1/K) sum_k max(d(I_{k+1}) - d(I_k) + margin, 0), d = mean L1 to target.
double loss_triplet(const ExecutionTrace& trace, const Image& target,
                    double margin);
// Per-step mean L1 distances d(I_0) .. d(I_K).
std::vector<double> step_distances(const ExecutionTrace& trace,
                                   const Image& target);
// True when d(I_{k+1}) <= d(I_k) for every k.
bool is_monotone(const ExecutionTrace& trace, const Image& target);

enum class LrSchedule { kConstant, kCosine };

struct FitConfig {
  double learning_rate = 0.05;
  int iterations = 500;
  double triplet_margin = 0.005;
  double lambda = 1.0;
  // Stop once |loss_t - loss_{t-1}| < tolerance for `patience` iterations.
  double tolerance = 1e-12;
  int patience = 25;
  LrSchedule schedule = LrSchedule::kCosine;
  // Cosine schedule decays to learning_rate * final_lr_fraction.
  double final_lr_fraction = 0.01;
  // Extra fits from uniform random starts; 0 keeps the fit deterministic
  // identity-initialized.
  int restarts = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

double total_loss(const ExecutionTrace& trace, const Image& target,
                  const FitConfig& cfg);

// Gradient of total_loss with respect to every step's parameters (empty
// vectors for parameterless steps). The negative distance term of each
// triplet hinge is treated as a constant.
struct LossGradient {
  double loss = 0.0;
  std::vector<std::vector<double>> params;
};

LossGradient loss_gradient(const EditScript& script,
                           const ExecutionTrace& trace,
                           std::span<const Mask> masks, const Image& target,
                           const FitConfig& cfg);

enum class FitStatus {
  kConverged,
  kBudgetExhausted,
  kNoImprovement,  // warning: identity parameters returned
};

std::string_view to_string(FitStatus status);

struct FitResult {
  EditScript script;  // all steps Fixed
  ExecutionTrace trace;
  std::vector<double> loss_history;  // loss at each evaluated iterate
  std::vector<double> best_history;  // running minimum of loss_history
  double best_loss = 0.0;
  double final_l1 = 0.0;
  FitStatus status = FitStatus::kBudgetExhausted;
  int iterations = 0;
};

// Adam on total_loss, projecting parameters into ops::param_range after
// every step. Returns the best iterate seen.
FitResult fit_parameters(const EditScript& script, const Image& input,
                         const Image& target, std::span<const Mask> masks,
                         const FitConfig& cfg,
                         const ops::Inpainter& inpainter = ops::default_inpainter());

// 1-5 distinct differentiable ops in random order, parameters uniform in
// the fitting ranges, global masks.
EditScript random_edit_script(std::uint64_t seed);
Image random_edit(const Image& input, std::uint64_t seed);

}  // namespace omnedit::omn

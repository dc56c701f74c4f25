// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/omn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "omnedit/rng.hpp"

namespace omnedit::omn {

using ops::OpKind;

namespace {

int canonical_rank(OpKind kind) {
  switch (kind) {
    case OpKind::kInpaintObj: return 0;
    case OpKind::kColorBg: return 1;
    case OpKind::kBrightness: return 2;
    case OpKind::kContrast: return 3;
    case OpKind::kSaturation: return 4;
    case OpKind::kSharpness: return 5;
    case OpKind::kHue: return 6;
    case OpKind::kTint: return 7;
  }
  return 8;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Adds scale * sign(img - target) into cot.
void add_l1_cotangent(const Image& img, const Image& target, double scale,
                      Field& cot) {
  const auto a = img.values();
  const auto b = target.values();
  auto out = cot.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * sign(a[i] - b[i]);
}

// Executes steps [first, end) on top of images already in `trace`.
void run_steps(const EditScript& script, std::size_t first,
               std::span<const Mask> masks, const ops::Inpainter& inpainter,
               ExecutionTrace& trace) {
  for (std::size_t k = first; k < script.steps.size(); ++k) {
    const OpInvocation& step = script.steps[k];
    trace.images.push_back(
        ops::apply(step.kind, trace.images.back(), step.params, masks[k], inpainter));
    trace.steps.push_back({step.kind, step.params});
  }
}

void check_masks(const EditScript& script, std::span<const Mask> masks) {
  if (masks.size() != script.steps.size()) {
    throw ShapeError("execute: " + std::to_string(masks.size()) +
                     " masks supplied for " + std::to_string(script.steps.size()) +
                     " steps");
  }
}

struct FitSlot {
  std::size_t step;
  ops::ParamRange range;
};

void project(std::vector<double>& p, ops::ParamRange range) {
  for (double& v : p) v = std::clamp(v, range.lo, range.hi);
}

struct RunOutcome {
  EditScript best;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> history;
  bool converged = false;
  int iterations = 0;
};

class AdamFitter {
 public:
  AdamFitter(const Image& input, const Image& target,
             std::span<const Mask> masks, const FitConfig& cfg,
             const ops::Inpainter& inpainter)
      : target_(target), masks_(masks), cfg_(cfg), inpainter_(inpainter) {
    prefix_.images.push_back(input);
  }

  // Parameterless leading steps are executed once and reused.
  void prepare(const EditScript& script) {
    prefix_len_ = 0;
    while (prefix_len_ < script.steps.size() &&
           !ops::is_differentiable(script.steps[prefix_len_].kind)) {
      ++prefix_len_;
    }
    EditScript head;
    head.steps.assign(script.steps.begin(), script.steps.begin() + prefix_len_);
    run_steps(head, 0, masks_, inpainter_, prefix_);
    for (std::size_t k = 0; k < script.steps.size(); ++k) {
      if (script.steps[k].mode == ParamMode::kFit) {
        slots_.push_back({k, ops::param_range(script.steps[k].kind)});
      }
    }
  }

  bool has_slots() const { return !slots_.empty(); }
  const std::vector<FitSlot>& slots() const { return slots_; }

  RunOutcome run(EditScript script) const {
    for (const FitSlot& s : slots_) project(script.steps[s.step].params, s.range);

    std::vector<std::vector<double>> m(slots_.size());
    std::vector<std::vector<double>> v(slots_.size());
    for (std::size_t j = 0; j < slots_.size(); ++j) {
      m[j].assign(script.steps[slots_[j].step].params.size(), 0.0);
      v[j] = m[j];
    }
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;

    RunOutcome out;
    int still = 0;
    int moment_t = 0;  // steps since the moments were last reset
    double lr_scale = 1.0;
    for (int t = 0; t < cfg_.iterations; ++t) {
      ExecutionTrace trace = prefix_;
      run_steps(script, prefix_len_, masks_, inpainter_, trace);
      const LossGradient grad = loss_gradient(script, trace, masks_, target_, cfg_);
      out.history.push_back(grad.loss);
      out.iterations = t + 1;
      if (grad.loss < out.best_loss) {
        out.best_loss = grad.loss;
        out.best = script;
      } else if (vanished(grad)) {
        // Momentum carried the iterate into a flat region (typically fully
        // clipped): resume from the best point with fresh moments and a
        // smaller step.
        script = out.best;
        for (std::size_t j = 0; j < slots_.size(); ++j) {
          std::fill(m[j].begin(), m[j].end(), 0.0);
          std::fill(v[j].begin(), v[j].end(), 0.0);
        }
        moment_t = 0;
        lr_scale *= 0.5;
        continue;
      }
      if (t > 0) {
        const double delta = std::abs(grad.loss - out.history[t - 1]);
        still = delta < cfg_.tolerance ? still + 1 : 0;
        if (still >= cfg_.patience) {
          out.converged = true;
          break;
        }
      }

      const double lr = lr_scale * learning_rate(t);
      ++moment_t;
      const double bc1 = 1.0 - std::pow(kBeta1, moment_t);
      const double bc2 = 1.0 - std::pow(kBeta2, moment_t);
      for (std::size_t j = 0; j < slots_.size(); ++j) {
        auto& params = script.steps[slots_[j].step].params;
        const auto& g = grad.params[slots_[j].step];
        for (std::size_t i = 0; i < params.size(); ++i) {
          m[j][i] = kBeta1 * m[j][i] + (1.0 - kBeta1) * g[i];
          v[j][i] = kBeta2 * v[j][i] + (1.0 - kBeta2) * g[i] * g[i];
          params[i] -= lr * (m[j][i] / bc1) / (std::sqrt(v[j][i] / bc2) + kEps);
        }
        project(params, slots_[j].range);
      }
    }
    return out;
  }

 private:
  bool vanished(const LossGradient& grad) const {
    for (const FitSlot& s : slots_) {
      for (double g : grad.params[s.step]) {
        if (g != 0.0) return false;
      }
    }
    return true;
  }

  double learning_rate(int t) const {
    if (cfg_.schedule == LrSchedule::kConstant || cfg_.iterations <= 1) {
      return cfg_.learning_rate;
    }
    const double lo = cfg_.learning_rate * cfg_.final_lr_fraction;
    const double phase = static_cast<double>(t) / (cfg_.iterations - 1);
    return lo + 0.5 * (cfg_.learning_rate - lo) *
                    (1.0 + std::cos(std::numbers::pi * phase));
  }

  const Image& target_;
  std::span<const Mask> masks_;
  const FitConfig& cfg_;
  const ops::Inpainter& inpainter_;
  ExecutionTrace prefix_;
  std::size_t prefix_len_ = 0;
  std::vector<FitSlot> slots_;
};

}  // namespace

OpInvocation fixed(OpKind kind, std::vector<double> params, MaskRef mask) {
  return {kind, std::move(params), ParamMode::kFixed, std::move(mask)};
}

OpInvocation fit(OpKind kind, MaskRef mask) {
  return {kind, ops::identity_params(kind), ParamMode::kFit, std::move(mask)};
}

void validate(const EditScript& script) {
  std::array<bool, ops::kAllKinds.size()> seen{};
  bool fitted_before = false;
  for (const OpInvocation& step : script.steps) {
    const std::string op(ops::name(step.kind));
    if (static_cast<int>(step.params.size()) != ops::param_arity(step.kind)) {
      throw ShapeError(op + " expects " + std::to_string(ops::param_arity(step.kind)) +
                       " parameters, got " + std::to_string(step.params.size()));
    }
    auto& flag = seen[static_cast<std::size_t>(step.kind)];
    if (flag) throw DomainError("operation " + op + " appears more than once");
    flag = true;
    if (!ops::is_differentiable(step.kind)) {
      if (step.mode == ParamMode::kFit) {
        throw DomainError(op + " has no parameters to fit");
      }
      if (fitted_before) {
        throw DomainError(op + " follows a fitted step; parameterless operations must lead the chain");
      }
    }
    fitted_before = fitted_before || step.mode == ParamMode::kFit;
  }
}

std::vector<OpKind> canonical_order(std::span<const OpKind> kinds) {
  std::vector<OpKind> out(kinds.begin(), kinds.end());
  std::sort(out.begin(), out.end(), [](OpKind a, OpKind b) {
    return canonical_rank(a) < canonical_rank(b);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

EditScript canonicalize(EditScript script) {
  std::stable_sort(script.steps.begin(), script.steps.end(),
                   [](const OpInvocation& a, const OpInvocation& b) {
                     return canonical_rank(a.kind) < canonical_rank(b.kind);
                   });
  return script;
}

ExecutionTrace execute(const EditScript& script, const Image& input,
                       std::span<const Mask> masks,
                       const ops::Inpainter& inpainter) {
  validate(script);
  check_masks(script, masks);
  ExecutionTrace trace;
  trace.images.push_back(input);
  run_steps(script, 0, masks, inpainter, trace);
  return trace;
}

ExecutionTrace execute(const EditScript& script, const Image& input) {
  const std::vector<Mask> masks(script.steps.size(),
                                global_mask(input.width(), input.height()));
  return execute(script, input, masks);
}

double loss_l1(const ExecutionTrace& trace, const Image& target) {
  return l1_distance(trace.final_image(), target);
}

std::vector<double> step_distances(const ExecutionTrace& trace,
                                   const Image& target) {
  std::vector<double> d;
  d.reserve(trace.images.size());
  for (const Image& img : trace.images) d.push_back(l1_distance(img, target));
  return d;
}

double loss_triplet(const ExecutionTrace& trace, const Image& target,
                    double margin) {
  const int k_steps = trace.length();
  if (k_steps == 0) return 0.0;
  const std::vector<double> d = step_distances(trace, target);
  double acc = 0.0;
  for (int k = 0; k < k_steps; ++k) acc += std::max(d[k + 1] - d[k] + margin, 0.0);
  return acc / k_steps;
}

bool is_monotone(const ExecutionTrace& trace, const Image& target) {
  const std::vector<double> d = step_distances(trace, target);
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    if (d[k + 1] > d[k]) return false;
  }
  return true;
}

void FitConfig::validate() const {
  if (!(learning_rate > 0.0)) throw DomainError("learning rate must be positive");
  if (iterations < 1) throw DomainError("iteration budget must be positive");
  if (triplet_margin < 0.0) throw DomainError("triplet margin must be non-negative");
  if (lambda < 0.0) throw DomainError("balance weight must be non-negative");
  if (final_lr_fraction <= 0.0 || final_lr_fraction > 1.0) {
    throw DomainError("final_lr_fraction must lie in (0, 1]");
  }
  if (restarts < 0) throw DomainError("restarts must be non-negative");
}

double total_loss(const ExecutionTrace& trace, const Image& target,
                  const FitConfig& cfg) {
  double loss = loss_l1(trace, target);
  if (cfg.lambda != 0.0) loss += cfg.lambda * loss_triplet(trace, target, cfg.triplet_margin);
  return loss;
}

LossGradient loss_gradient(const EditScript& script,
                           const ExecutionTrace& trace,
                           std::span<const Mask> masks, const Image& target,
                           const FitConfig& cfg) {
  check_masks(script, masks);
  const int k_steps = trace.length();
  LossGradient out;
  out.params.resize(static_cast<std::size_t>(k_steps));
  out.loss = total_loss(trace, target, cfg);
  if (k_steps == 0) return out;

  const double n = static_cast<double>(target.size());
  const std::vector<double> d = step_distances(trace, target);
  // hinge k is active when d[k+1] - d[k] + margin > 0; d[k] is blocked.
  const bool use_triplet = cfg.lambda != 0.0;

  Field cot(target.width(), target.height());
  add_l1_cotangent(trace.images[k_steps], target, 1.0 / n, cot);
  for (int k = k_steps - 1; k >= 0; --k) {
    if (use_triplet && d[k + 1] - d[k] + cfg.triplet_margin > 0.0) {
      add_l1_cotangent(trace.images[k + 1], target, cfg.lambda / (k_steps * n), cot);
    }
    const TraceStep& step = trace.steps[k];
    if (!ops::is_differentiable(step.kind)) break;
    ops::OpVjp back = ops::vjp(step.kind, trace.images[k], step.params, masks[k], cot);
    out.params[k] = std::move(back.params);
    cot = std::move(back.input);
  }
  return out;
}

std::string_view to_string(FitStatus status) {
  switch (status) {
    case FitStatus::kConverged: return "converged";
    case FitStatus::kBudgetExhausted: return "budget_exhausted";
    case FitStatus::kNoImprovement: return "no_improvement";
  }
  return "unknown";
}

FitResult fit_parameters(const EditScript& script, const Image& input,
                         const Image& target, std::span<const Mask> masks,
                         const FitConfig& cfg,
                         const ops::Inpainter& inpainter) {
  validate(script);
  cfg.validate();
  check_masks(script, masks);
  require_same_extent(input, target, "fit_parameters");

  AdamFitter fitter(input, target, masks, cfg, inpainter);
  fitter.prepare(script);
  if (!fitter.has_slots()) throw DomainError("fit_parameters: script has no fit parameters");

  RunOutcome best = fitter.run(script);
  const double initial_loss = best.history.front();
  const std::vector<double> primary_history = best.history;
  const int primary_iterations = best.iterations;
  const bool primary_converged = best.converged;

  Rng rng(cfg.seed);
  for (int r = 0; r < cfg.restarts; ++r) {
    EditScript start = script;
    for (const FitSlot& s : fitter.slots()) {
      for (double& v : start.steps[s.step].params) v = rng.uniform(s.range.lo, s.range.hi);
    }
    RunOutcome other = fitter.run(start);
    if (other.best_loss < best.best_loss) {
      best.best = std::move(other.best);
      best.best_loss = other.best_loss;
    }
  }

  FitResult result;
  result.loss_history = primary_history;
  result.iterations = primary_iterations;
  double running = std::numeric_limits<double>::infinity();
  for (double l : result.loss_history) {
    running = std::min(running, l);
    result.best_history.push_back(running);
  }
  result.best_loss = best.best_loss;

  EditScript fitted = best.best;
  if (!(best.best_loss < initial_loss)) {
    result.status = FitStatus::kNoImprovement;
    fitted = script;
    for (OpInvocation& step : fitted.steps) {
      if (step.mode == ParamMode::kFit) step.params = ops::identity_params(step.kind);
    }
  } else {
    result.status = primary_converged ? FitStatus::kConverged : FitStatus::kBudgetExhausted;
  }
  for (OpInvocation& step : fitted.steps) step.mode = ParamMode::kFixed;
  result.script = std::move(fitted);
  result.trace = execute(result.script, input, masks, inpainter);
  result.final_l1 = loss_l1(result.trace, target);
  if (result.status == FitStatus::kNoImprovement) {
    result.best_loss = total_loss(result.trace, target, cfg);
  }
  return result;
}

EditScript random_edit_script(std::uint64_t seed) {
  Rng rng(seed);
  const int count = rng.uniform_int(1, 5);
  std::array<OpKind, ops::kDifferentiableKinds.size()> pool = ops::kDifferentiableKinds;
  EditScript script;
  for (int i = 0; i < count; ++i) {
    const int j = rng.uniform_int(i, static_cast<int>(pool.size()) - 1);
    std::swap(pool[i], pool[j]);
    const OpKind kind = pool[i];
    const ops::ParamRange range = ops::param_range(kind);
    std::vector<double> params(static_cast<std::size_t>(ops::param_arity(kind)));
    for (double& v : params) v = rng.uniform(range.lo, range.hi);
    script.steps.push_back(fixed(kind, std::move(params)));
  }
  return script;
}

Image random_edit(const Image& input, std::uint64_t seed) {
  return execute(random_edit_script(seed), input).final_image();
}

}  // namespace omnedit::omn

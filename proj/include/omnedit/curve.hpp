// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace omnedit::ops {

// Lower bound applied to raw curve weights before use: w_i = max(p_i, eps).
inline constexpr double kCurveEpsilon = 1e-3;

// Monotone piecewise-linear tone curve with N pieces,
//   f(x) = (1/Z) * sum_i clip(N x - i, 0, 1) * w_i,   Z = sum_i w_i.
// The weights are used as given; see ToneCurve for the projected form.
// Throws DomainError when Z <= 0.
double eval_curve(double x, std::span<const double> weights);

// Tone curve built from raw (unconstrained) parameters. Each raw value is
// mapped through max(p, kCurveEpsilon) so Z is always positive.
class ToneCurve {
 public:
  explicit ToneCurve(std::span<const double> raw);

  int pieces() const { return static_cast<int>(weights_.size()); }
  double operator()(double x) const;
  // Derivative with respect to x. One-sided at the piece joints: the piece
  // containing x from the right, the last piece at x = 1.
  double slope(double x) const;
  // Accumulates g * df(x)/dp_j into grad for every raw parameter p_j.
  void accumulate_param_grad(double x, double g, std::span<double> grad) const;

 private:
  std::vector<double> weights_;
  std::vector<bool> active_;  // d max(p, eps) / dp == 1
  double inv_z_ = 0.0;
};

}  // namespace omnedit::ops

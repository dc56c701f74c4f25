// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/curve.hpp"

#include <algorithm>
#include <numeric>

#include "omnedit/error.hpp"
#include "omnedit/image.hpp"

namespace omnedit::ops {

namespace {

double curve_sum(double x, std::span<const double> weights) {
  const double n = static_cast<double>(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += clip01(n * x - static_cast<double>(i)) * weights[i];
  }
  return acc;
}

}  // namespace

double eval_curve(double x, std::span<const double> weights) {
  if (weights.empty()) throw DomainError("degenerate curve: no pieces");
  const double z = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(z > 0.0)) throw DomainError("degenerate curve: weight sum is not positive");
  return curve_sum(x, weights) / z;
}

ToneCurve::ToneCurve(std::span<const double> raw) {
  if (raw.empty()) throw DomainError("degenerate curve: no pieces");
  weights_.reserve(raw.size());
  active_.reserve(raw.size());
  for (double p : raw) {
    weights_.push_back(std::max(p, kCurveEpsilon));
    active_.push_back(p >= kCurveEpsilon);
  }
  inv_z_ = 1.0 / std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double ToneCurve::operator()(double x) const {
  return curve_sum(x, weights_) * inv_z_;
}

double ToneCurve::slope(double x) const {
  const int n = pieces();
  int piece = static_cast<int>(n * x);
  piece = std::clamp(piece, 0, n - 1);
  return n * weights_[piece] * inv_z_;
}

void ToneCurve::accumulate_param_grad(double x, double g,
                                      std::span<double> grad) const {
  const double n = static_cast<double>(weights_.size());
  const double f = (*this)(x);
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    if (!active_[j]) continue;
    grad[j] += g * (clip01(n * x - static_cast<double>(j)) - f) * inv_z_;
  }
}

}  // namespace omnedit::ops

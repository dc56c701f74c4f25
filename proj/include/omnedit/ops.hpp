// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omnedit/curve.hpp"
#include "omnedit/image.hpp"

namespace omnedit::ops {

enum class OpKind : std::uint8_t {
  kBrightness,
  kSaturation,
  kContrast,
  kSharpness,
  kTint,
  kHue,
  kColorBg,
  kInpaintObj,
};

inline constexpr std::array<OpKind, 8> kAllKinds = {
    OpKind::kBrightness, OpKind::kSaturation, OpKind::kContrast,
    OpKind::kSharpness,  OpKind::kTint,       OpKind::kHue,
    OpKind::kColorBg,    OpKind::kInpaintObj,
};

inline constexpr std::array<OpKind, 6> kDifferentiableKinds = {
    OpKind::kBrightness, OpKind::kSaturation, OpKind::kContrast,
    OpKind::kSharpness,  OpKind::kTint,       OpKind::kHue,
};

inline constexpr int kCurvePieces = 8;

struct OpInfo {
  std::string_view name;
  int param_arity;
  bool differentiable;
};

const OpInfo& info(OpKind kind);
inline std::string_view name(OpKind kind) { return info(kind).name; }
inline int param_arity(OpKind kind) { return info(kind).param_arity; }
inline bool is_differentiable(OpKind kind) { return info(kind).differentiable; }

// Parses "brightness", "color_bg", ... Returns nullopt for unknown names.
std::optional<OpKind> parse_kind(std::string_view name);

// Identity parameters: p = 0 for scalar ops, all-equal weights for curves.
std::vector<double> identity_params(OpKind kind);

// Box the optimizer projects parameters into.
struct ParamRange {
  double lo;
  double hi;
};
inline constexpr ParamRange kScalarRange{-1.0, 3.0};
inline constexpr ParamRange kCurveRange{kCurveEpsilon, 5.0};
ParamRange param_range(OpKind kind);

// Fill strategy for inpaint_obj. Receives the image and the region to
// replace (weight > 0); returns a full image whose region pixels are filled.
// Must be a pure function.
using Inpainter = std::function<Image(const Image&, const Mask&)>;

// Iterative neighbor diffusion: every region pixel is repeatedly replaced by
// the mean of its in-bounds 4-neighbors until the largest update falls below
// tolerance or the iteration budget runs out.
Image diffusion_inpaint(const Image& img, const Mask& region,
                        double tolerance = 1e-4, int max_iterations = 500);

// diffusion_inpaint with its default tolerance and budget.
Inpainter default_inpainter();

// out = mask * edited + (1 - mask) * original
Image blend(const Image& original, const Image& edited, const Mask& mask);

Image apply_brightness(const Image& img, double p, const Mask& mask);
Image apply_saturation(const Image& img, double p, const Mask& mask);
Image apply_contrast(const Image& img, double p, const Mask& mask);
Image apply_sharpness(const Image& img, double p, const Mask& mask);
Image apply_tint(const Image& img, std::span<const double> p, const Mask& mask);
Image apply_hue(const Image& img, std::span<const double> p, const Mask& mask);
Image apply_color_bg(const Image& img, const Mask& mask);
Image apply_inpaint(const Image& img, const Mask& mask,
                    const Inpainter& inpainter = default_inpainter());

// Dispatches on kind. Throws ShapeError when params.size() differs from the
// arity or the mask does not match the image.
Image apply(OpKind kind, const Image& img, std::span<const double> params,
            const Mask& mask, const Inpainter& inpainter = default_inpainter());

// Vector-Jacobian product of a differentiable op: given dL/dI' returns
// dL/dp and dL/dI.
struct OpVjp {
  std::vector<double> params;
  Field input;
};

OpVjp vjp(OpKind kind, const Image& img, std::span<const double> params,
          const Mask& mask, const Field& upstream);

std::vector<double> grad_params(OpKind kind, const Image& img,
                                std::span<const double> params,
                                const Mask& mask, const Field& upstream);

// True if moving any parameter by at most h crosses a clip breakpoint at
// some pixel with nonzero mask weight, where finite differences are not
// expected to match the analytic one-sided derivative.
bool near_breakpoint(OpKind kind, const Image& img,
                     std::span<const double> params, const Mask& mask,
                     double h);

struct GradCheckReport {
  std::vector<double> analytic;
  std::vector<double> numeric;
  std::vector<double> rel_error;
  double max_rel_error = 0.0;
  bool near_breakpoint = false;
};

// Compares grad_params with central differences of the probe
//   L(p) = mean(u * apply(kind, img, p, mask))
// where u is a fixed pseudo-random cotangent in [-1, 1]. Relative errors use
// max(|analytic|, |numeric|, 1e-6) as denominator.
GradCheckReport finite_diff_check(OpKind kind, const Image& img,
                                  std::span<const double> params,
                                  const Mask& mask, double h = 1e-4);

// The cotangent finite_diff_check uses, exposed for tests.
Field probe_cotangent(int width, int height);

}  // namespace omnedit::ops

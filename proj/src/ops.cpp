// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "omnedit/color.hpp"

namespace omnedit::ops {

namespace {

constexpr OpInfo kInfo[] = {
    {"brightness", 1, true}, {"saturation", 1, true},
    {"contrast", 1, true},   {"sharpness", 1, true},
    {"tint", kCurvePieces, true}, {"hue", 3 * kCurvePieces, true},
    {"color_bg", 0, false},  {"inpaint_obj", 0, false},
};

// Luminance weights for contrast.
constexpr double kLumWeights[3] = {0.27, 0.67, 0.06};
// Lower bound on the luminance divisor in EnhancedLum / Lum.
constexpr double kLumGuard = 1e-6;

Rgb rgb_at(const Image& img, std::size_t i) {
  const double* p = img.pixel(i);
  return {p[0], p[1], p[2]};
}

void check_arity(OpKind kind, std::span<const double> params) {
  if (static_cast<int>(params.size()) != param_arity(kind)) {
    throw ShapeError(std::string(name(kind)) + " expects " +
                     std::to_string(param_arity(kind)) + " parameters, got " +
                     std::to_string(params.size()));
  }
}

// ---------------------------------------------------------------------------
// Unmasked edits. Each returns the edited image before blending.

Image edit_brightness(const Image& img, double p) {
  Image out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    Hsv hsv = rgb_to_hsv(rgb_at(img, i));
    hsv[2] = clip01((1.0 + p) * hsv[2]);
    const Rgb rgb = hsv_to_rgb(hsv);
    double* o = out.pixel(i);
    for (int c = 0; c < 3; ++c) o[c] = clip01(rgb[c]);
  }
  return out;
}

Image edit_saturation(const Image& img, double p) {
  Image out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    Hsv hsv = rgb_to_hsv(rgb_at(img, i));
    hsv[1] = clip01((1.0 + p) * hsv[1]);
    const Rgb rgb = hsv_to_rgb(hsv);
    double* o = out.pixel(i);
    for (int c = 0; c < 3; ++c) o[c] = clip01(rgb[c]);
  }
  return out;
}

struct LumTerms {
  double lum;
  double ratio;        // EnhancedLum / Lum
  double ratio_deriv;  // d ratio / d Lum
};

LumTerms lum_terms(const double* px) {
  const double lum = kLumWeights[0] * px[0] + kLumWeights[1] * px[1] +
                     kLumWeights[2] * px[2];
  const double pi = std::numbers::pi;
  const double enhanced = 0.5 * (1.0 - std::cos(pi * lum));
  const double enhanced_deriv = 0.5 * pi * std::sin(pi * lum);
  if (lum >= kLumGuard) {
    return {lum, enhanced / lum,
            (enhanced_deriv * lum - enhanced) / (lum * lum)};
  }
  return {lum, enhanced / kLumGuard, enhanced_deriv / kLumGuard};
}

Image edit_contrast(const Image& img, double p) {
  Image out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double* px = img.pixel(i);
    const LumTerms t = lum_terms(px);
    double* o = out.pixel(i);
    for (int c = 0; c < 3; ++c) {
      o[c] = clip01((1.0 - p) * px[c] + p * px[c] * t.ratio);
    }
  }
  return out;
}

Image edit_sharpness(const Image& img, double p) {
  const Field lap = laplacian(img);
  Image out(img.width(), img.height());
  auto o = out.values();
  const auto in = img.values();
  const auto l = lap.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = clip01(in[i] + p * l[i]);
  return out;
}

Image edit_curves(const Image& img, std::span<const double> p, bool shared) {
  std::vector<ToneCurve> curves;
  for (int c = 0; c < 3; ++c) {
    curves.emplace_back(shared ? p.first(kCurvePieces)
                               : p.subspan(c * kCurvePieces, kCurvePieces));
  }
  Image out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double* px = img.pixel(i);
    double* o = out.pixel(i);
    for (int c = 0; c < 3; ++c) o[c] = clip01(curves[c](px[c]));
  }
  return out;
}

Image edit(OpKind kind, const Image& img, std::span<const double> p,
           const Mask& mask, const Inpainter& inpainter) {
  switch (kind) {
    case OpKind::kBrightness: return edit_brightness(img, p[0]);
    case OpKind::kSaturation: return edit_saturation(img, p[0]);
    case OpKind::kContrast: return edit_contrast(img, p[0]);
    case OpKind::kSharpness: return edit_sharpness(img, p[0]);
    case OpKind::kTint: return edit_curves(img, p, true);
    case OpKind::kHue: return edit_curves(img, p, false);
    case OpKind::kColorBg: return Image(img.width(), img.height(), 1.0);
    case OpKind::kInpaintObj: {
      Mask region(mask.width(), mask.height());
      bool any = false;
      bool all = true;
      for (std::size_t i = 0; i < mask.size(); ++i) {
        const bool in = mask.values()[i] > 0.0;
        region.values()[i] = in ? 1.0 : 0.0;
        any = any || in;
        all = all && in;
      }
      if (!any) return img;
      if (all) throw DomainError("inpaint_obj: mask covers the whole image, nothing to inpaint from");
      return inpainter(img, region);
    }
  }
  throw ShapeError("unknown operation");
}

// ---------------------------------------------------------------------------
// VJPs of the unmasked edits. `cot` is dL/d(edited), already weighted by the
// mask; results accumulate into param_grad and input_grad.

void vjp_brightness(const Image& img, double p, const Field& cot,
                    std::span<double> param_grad, Field& input_grad) {
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const Rgb rgb = rgb_at(img, i);
    const Hsv hsv = rgb_to_hsv(rgb);
    const double v = hsv[2];
    const double* g = cot.pixel(i);
    double* in = input_grad.pixel(i);
    const double scaled = (1.0 + p) * v;
    const ClipResult clip = clipped_linear(scaled, 0.0, 1.0);
    double dp = 0.0;
    for (int c = 0; c < 3; ++c) {
      dp += g[c] * (1.0 - hsv[1] * hue_weight(hsv[0], c)) * v;
    }
    param_grad[0] += dp * clip.deriv;
    if (clip.deriv > 0.0) {
      // edited_c = (1 + p) * I_c
      for (int c = 0; c < 3; ++c) in[c] += (1.0 + p) * g[c];
    } else if (scaled > 1.0) {
      // edited_c = I_c / V
      const int m = argmax_channel(rgb);
      double acc = 0.0;
      for (int c = 0; c < 3; ++c) {
        in[c] += g[c] / v;
        acc += g[c] * rgb[c];
      }
      in[m] -= acc / (v * v);
    }
  }
}

void vjp_saturation(const Image& img, double p, const Field& cot,
                    std::span<double> param_grad, Field& input_grad) {
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const Rgb rgb = rgb_at(img, i);
    const Hsv hsv = rgb_to_hsv(rgb);
    const double v = hsv[2];
    const double s = hsv[1];
    const double* g = cot.pixel(i);
    double* in = input_grad.pixel(i);
    const double scaled = (1.0 + p) * s;
    const ClipResult clip = clipped_linear(scaled, 0.0, 1.0);
    double dp = 0.0;
    for (int c = 0; c < 3; ++c) dp -= g[c] * v * hue_weight(hsv[0], c) * s;
    param_grad[0] += dp * clip.deriv;

    const int mx = argmax_channel(rgb);
    if (clip.deriv > 0.0) {
      // edited_c = (1 + p) I_c - p V
      for (int c = 0; c < 3; ++c) {
        in[c] += (1.0 + p) * g[c];
        in[mx] -= p * g[c];
      }
    } else if (scaled > 1.0) {
      // S' = 1: edited_c = V - V (V - I_c) / C with C = V - min.
      const int mn = argmin_channel(rgb);
      const double chroma = v - rgb[mn];
      for (int c = 0; c < 3; ++c) {
        const double a = v * (v - rgb[c]);
        in[mx] += g[c] * (1.0 - (2.0 * v - rgb[c]) / chroma +
                          a / (chroma * chroma));
        in[c] += g[c] * v / chroma;
        in[mn] -= g[c] * a / (chroma * chroma);
      }
    } else {
      // S' = 0: edited_c = V
      for (int c = 0; c < 3; ++c) in[mx] += g[c];
    }
  }
}

void vjp_contrast(const Image& img, double p, const Field& cot,
                  std::span<double> param_grad, Field& input_grad) {
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double* px = img.pixel(i);
    const LumTerms t = lum_terms(px);
    const double* g = cot.pixel(i);
    double* in = input_grad.pixel(i);
    double dlum = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double pre = (1.0 - p) * px[c] + p * px[c] * t.ratio;
      const double gc = g[c] * clipped_linear(pre, 0.0, 1.0).deriv;
      param_grad[0] += gc * px[c] * (t.ratio - 1.0);
      in[c] += gc * ((1.0 - p) + p * t.ratio);
      dlum += gc * p * px[c] * t.ratio_deriv;
    }
    for (int j = 0; j < 3; ++j) in[j] += dlum * kLumWeights[j];
  }
}

void vjp_sharpness(const Image& img, double p, const Field& cot,
                   std::span<double> param_grad, Field& input_grad) {
  const Field lap = laplacian(img);
  Field gated(img.width(), img.height());
  const auto in = img.values();
  const auto l = lap.values();
  const auto g = cot.values();
  auto gv = gated.values();
  double dp = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    gv[i] = g[i] * clipped_linear(in[i] + p * l[i], 0.0, 1.0).deriv;
    dp += gv[i] * l[i];
  }
  param_grad[0] += dp;
  const Field back = laplacian_adjoint(gated);
  auto out = input_grad.values();
  const auto b = back.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += gv[i] + p * b[i];
}

void vjp_curves(const Image& img, std::span<const double> p, bool shared,
                const Field& cot, std::span<double> param_grad,
                Field& input_grad) {
  std::vector<ToneCurve> curves;
  for (int c = 0; c < 3; ++c) {
    curves.emplace_back(shared ? p.first(kCurvePieces)
                               : p.subspan(c * kCurvePieces, kCurvePieces));
  }
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double* px = img.pixel(i);
    const double* g = cot.pixel(i);
    double* in = input_grad.pixel(i);
    for (int c = 0; c < 3; ++c) {
      if (g[c] == 0.0) continue;
      const auto slot = shared ? param_grad.first(kCurvePieces)
                               : param_grad.subspan(c * kCurvePieces, kCurvePieces);
      curves[c].accumulate_param_grad(px[c], g[c], slot);
      in[c] += g[c] * curves[c].slope(px[c]);
    }
  }
}

// Pre-clip arguments of the op's clip stages and their derivative in p.
bool scalar_near_breakpoint(double arg, double slope, double h) {
  const double reach = 2.0 * h * std::abs(slope);
  if (reach == 0.0) return false;
  return std::abs(arg) <= reach || std::abs(arg - 1.0) <= reach;
}

}  // namespace

const OpInfo& info(OpKind kind) { return kInfo[static_cast<int>(kind)]; }

std::optional<OpKind> parse_kind(std::string_view text) {
  for (OpKind kind : kAllKinds) {
    if (name(kind) == text) return kind;
  }
  return std::nullopt;
}

std::vector<double> identity_params(OpKind kind) {
  switch (kind) {
    case OpKind::kTint:
    case OpKind::kHue:
      return std::vector<double>(static_cast<std::size_t>(param_arity(kind)), 1.0);
    default:
      return std::vector<double>(static_cast<std::size_t>(param_arity(kind)), 0.0);
  }
}

ParamRange param_range(OpKind kind) {
  return (kind == OpKind::kTint || kind == OpKind::kHue) ? kCurveRange
                                                         : kScalarRange;
}

Image diffusion_inpaint(const Image& img, const Mask& region, double tolerance,
                        int max_iterations) {
  require_mask_fits(img, region, "diffusion_inpaint");
  const int w = img.width();
  const int h = img.height();
  std::vector<std::size_t> holes;
  double known[3] = {0.0, 0.0, 0.0};
  std::size_t known_count = 0;
  for (std::size_t i = 0; i < region.pixel_count(); ++i) {
    if (region.values()[i] > 0.0) {
      holes.push_back(i);
    } else {
      for (int c = 0; c < 3; ++c) known[c] += img.pixel(i)[c];
      ++known_count;
    }
  }
  if (holes.empty()) return img;
  if (known_count == 0) throw DomainError("diffusion_inpaint: nothing to inpaint from");

  Image out = img;
  for (std::size_t i : holes) {
    for (int c = 0; c < 3; ++c) out.pixel(i)[c] = known[c] / known_count;
  }
  for (int iter = 0; iter < max_iterations; ++iter) {
    double max_change = 0.0;
    for (std::size_t i : holes) {
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      double sum[3] = {0.0, 0.0, 0.0};
      int n = 0;
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
        for (int c = 0; c < 3; ++c) sum[c] += out.at(nx[k], ny[k], c);
        ++n;
      }
      double* px = out.pixel(i);
      for (int c = 0; c < 3; ++c) {
        const double next = n > 0 ? sum[c] / n : px[c];
        max_change = std::max(max_change, std::abs(next - px[c]));
        px[c] = next;
      }
    }
    if (max_change < tolerance) break;
  }
  return out;
}

Inpainter default_inpainter() {
  return [](const Image& img, const Mask& region) {
    return diffusion_inpaint(img, region);
  };
}

Image blend(const Image& original, const Image& edited, const Mask& mask) {
  require_same_extent(original, edited, "blend");
  require_mask_fits(original, mask, "blend");
  Image out(original.width(), original.height());
  for (std::size_t i = 0; i < original.pixel_count(); ++i) {
    const double m = mask.values()[i];
    const double* a = original.pixel(i);
    const double* b = edited.pixel(i);
    double* o = out.pixel(i);
    for (int c = 0; c < 3; ++c) o[c] = m * b[c] + (1.0 - m) * a[c];
  }
  return out;
}

Image apply(OpKind kind, const Image& img, std::span<const double> params,
            const Mask& mask, const Inpainter& inpainter) {
  check_arity(kind, params);
  require_mask_fits(img, mask, name(kind).data());
  return blend(img, edit(kind, img, params, mask, inpainter), mask);
}

Image apply_brightness(const Image& img, double p, const Mask& mask) {
  return apply(OpKind::kBrightness, img, std::span<const double>(&p, 1), mask);
}
Image apply_saturation(const Image& img, double p, const Mask& mask) {
  return apply(OpKind::kSaturation, img, std::span<const double>(&p, 1), mask);
}
Image apply_contrast(const Image& img, double p, const Mask& mask) {
  return apply(OpKind::kContrast, img, std::span<const double>(&p, 1), mask);
}
Image apply_sharpness(const Image& img, double p, const Mask& mask) {
  return apply(OpKind::kSharpness, img, std::span<const double>(&p, 1), mask);
}
Image apply_tint(const Image& img, std::span<const double> p, const Mask& mask) {
  return apply(OpKind::kTint, img, p, mask);
}
Image apply_hue(const Image& img, std::span<const double> p, const Mask& mask) {
  return apply(OpKind::kHue, img, p, mask);
}
Image apply_color_bg(const Image& img, const Mask& mask) {
  return apply(OpKind::kColorBg, img, {}, mask);
}
Image apply_inpaint(const Image& img, const Mask& mask,
                    const Inpainter& inpainter) {
  return apply(OpKind::kInpaintObj, img, {}, mask, inpainter);
}

OpVjp vjp(OpKind kind, const Image& img, std::span<const double> params,
          const Mask& mask, const Field& upstream) {
  if (!is_differentiable(kind)) {
    throw DomainError(std::string(name(kind)) + " is a non-differentiable operation");
  }
  check_arity(kind, params);
  require_mask_fits(img, mask, name(kind).data());
  if (!img.same_extent(upstream)) throw ShapeError("vjp: cotangent shape mismatch");

  OpVjp out{std::vector<double>(params.size(), 0.0),
            Field(img.width(), img.height())};
  // Through the blend: the edit sees m*u, the input directly gets (1-m)*u.
  Field masked(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double m = mask.values()[i];
    for (int c = 0; c < 3; ++c) {
      masked.pixel(i)[c] = m * upstream.pixel(i)[c];
      out.input.pixel(i)[c] = (1.0 - m) * upstream.pixel(i)[c];
    }
  }
  switch (kind) {
    case OpKind::kBrightness:
      vjp_brightness(img, params[0], masked, out.params, out.input);
      break;
    case OpKind::kSaturation:
      vjp_saturation(img, params[0], masked, out.params, out.input);
      break;
    case OpKind::kContrast:
      vjp_contrast(img, params[0], masked, out.params, out.input);
      break;
    case OpKind::kSharpness:
      vjp_sharpness(img, params[0], masked, out.params, out.input);
      break;
    case OpKind::kTint:
      vjp_curves(img, params, true, masked, out.params, out.input);
      break;
    case OpKind::kHue:
      vjp_curves(img, params, false, masked, out.params, out.input);
      break;
    default:
      break;
  }
  return out;
}

std::vector<double> grad_params(OpKind kind, const Image& img,
                                std::span<const double> params,
                                const Mask& mask, const Field& upstream) {
  return vjp(kind, img, params, mask, upstream).params;
}

bool near_breakpoint(OpKind kind, const Image& img,
                     std::span<const double> params, const Mask& mask,
                     double h) {
  check_arity(kind, params);
  if (kind == OpKind::kTint || kind == OpKind::kHue) {
    return std::any_of(params.begin(), params.end(), [&](double v) {
      return std::abs(v - kCurveEpsilon) <= 2.0 * h;
    });
  }
  if (!is_differentiable(kind)) return false;
  const double p = params[0];
  const Field lap = kind == OpKind::kSharpness ? laplacian(img) : Field(1, 1);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (mask.values()[i] <= 0.0) continue;
    const double* px = img.pixel(i);
    switch (kind) {
      case OpKind::kBrightness: {
        const Hsv hsv = rgb_to_hsv(Rgb{px[0], px[1], px[2]});
        if (scalar_near_breakpoint((1.0 + p) * hsv[2], hsv[2], h)) return true;
        break;
      }
      case OpKind::kSaturation: {
        const Hsv hsv = rgb_to_hsv(Rgb{px[0], px[1], px[2]});
        if (scalar_near_breakpoint((1.0 + p) * hsv[1], hsv[1], h)) return true;
        break;
      }
      case OpKind::kContrast: {
        const LumTerms t = lum_terms(px);
        for (int c = 0; c < 3; ++c) {
          const double pre = (1.0 - p) * px[c] + p * px[c] * t.ratio;
          if (scalar_near_breakpoint(pre, px[c] * (t.ratio - 1.0), h)) return true;
        }
        break;
      }
      case OpKind::kSharpness: {
        const double* l = lap.pixel(i);
        for (int c = 0; c < 3; ++c) {
          if (scalar_near_breakpoint(px[c] + p * l[c], l[c], h)) return true;
        }
        break;
      }
      default:
        break;
    }
  }
  return false;
}

Field probe_cotangent(int width, int height) {
  Field u(width, height);
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  for (double& v : u.values()) {
    // splitmix64
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    v = static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  return u;
}

GradCheckReport finite_diff_check(OpKind kind, const Image& img,
                                  std::span<const double> params,
                                  const Mask& mask, double h) {
  const Field u = probe_cotangent(img.width(), img.height());
  const double n = static_cast<double>(img.size());
  auto probe = [&](std::span<const double> p) {
    const Image out = apply(kind, img, p, mask);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) acc += u.values()[i] * out.values()[i];
    return acc / n;
  };

  Field upstream = u;
  for (double& v : upstream.values()) v /= n;

  GradCheckReport report;
  report.analytic = grad_params(kind, img, params, mask, upstream);
  report.near_breakpoint = near_breakpoint(kind, img, params, mask, h);
  std::vector<double> p(params.begin(), params.end());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double saved = p[j];
    p[j] = saved + h;
    const double plus = probe(p);
    p[j] = saved - h;
    const double minus = probe(p);
    p[j] = saved;
    const double numeric = (plus - minus) / (2.0 * h);
    const double a = report.analytic[j];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
    report.numeric.push_back(numeric);
    report.rel_error.push_back(std::abs(a - numeric) / denom);
    report.max_rel_error = std::max(report.max_rel_error, report.rel_error.back());
  }
  return report;
}

}  // namespace omnedit::ops

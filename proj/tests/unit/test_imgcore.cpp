// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "omnedit/color.hpp"
#include "omnedit/curve.hpp"
#include "omnedit/error.hpp"
#include "omnedit/image.hpp"
#include "omnedit/image_io.hpp"
#include "omnedit/rng.hpp"
#include "oracle/reference_ops.hpp"
#include "support/synthetic.hpp"

using namespace omnedit;

namespace {

std::filesystem::path scratch(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "omnedit_unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("pixel buffers reject bad shapes") {
  CHECK_THROWS_AS(Image(0, 4), ShapeError);
  CHECK_THROWS_AS(Image(2, 2, std::vector<double>(11)), ShapeError);
  Image img(3, 2, 0.25);
  CHECK(img.size() == 18);
  img.at(2, 1, 2) = 0.75;
  CHECK(img.pixel(5)[2] == 0.75);
  CHECK(in_unit_range(img));
  img.at(0, 0, 0) = 1.5;
  CHECK_FALSE(in_unit_range(img));
}

TEST_CASE("clipped_linear boundary conventions") {
  CHECK(clipped_linear(0.5, 0, 1).deriv == 1.0);
  CHECK(clipped_linear(1.0, 0, 1).deriv == 1.0);
  CHECK(clipped_linear(1.0, 0, 1, BoundaryGrad::kZero).deriv == 0.0);
  CHECK(clipped_linear(1.2, 0, 1).value == 1.0);
  CHECK(clipped_linear(1.2, 0, 1).deriv == 0.0);
  CHECK(clipped_linear(-0.1, 0, 1).value == 0.0);
}

TEST_CASE("laplacian matches the explicit stencil and its adjoint") {
  Rng rng(3);
  const Image a = testing::random_image(7, 5, rng);
  const Field lap = laplacian(a);
  const Mask ones = global_mask(7, 5);
  // reference sharpness with p = 1 before clipping is I + lap
  const Image ref = reference::sharpness(a, 1.0, ones);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 7; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double expect = clip01(a.at(x, y, c) + lap.at(x, y, c));
        CHECK(ref.at(x, y, c) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
  Field b(7, 5);
  for (double& v : b.values()) v = rng.uniform(-1, 1);
  const Field adj = laplacian_adjoint(b);
  double lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    lhs += lap.values()[i] * b.values()[i];
    rhs += a.values()[i] * adj.values()[i];
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  // constants have zero Laplacian under replicate padding
  const Field flat = laplacian(testing::constant_image(4, 4, 0.3, 0.6, 0.9));
  for (double v : flat.values()) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("l1_distance") {
  const Image black(4, 3, 0.0);
  const Image white(4, 3, 1.0);
  CHECK(l1_distance(black, white) == 1.0);
  CHECK(l1_distance(white, white) == 0.0);
  CHECK_THROWS_AS(l1_distance(black, Image(3, 4)), ShapeError);
}

TEST_CASE("hsv round trip and agreement with the sector formulation") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Rgb rgb{rng.uniform(), rng.uniform(), rng.uniform()};
    const Hsv hsv = rgb_to_hsv(rgb);
    CHECK(hsv[0] >= 0.0);
    CHECK(hsv[0] < 1.0);
    const Rgb back = hsv_to_rgb(hsv);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(back[c] - rgb[c]) < 1e-12);
    const reference::Hsv3 ref = reference::to_hsv(rgb[0], rgb[1], rgb[2]);
    CHECK(std::abs(ref.s - hsv[1]) < 1e-12);
    CHECK(std::abs(ref.v - hsv[2]) < 1e-12);
    double via_sectors[3];
    reference::to_rgb({hsv[0], hsv[1], hsv[2]}, via_sectors);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(via_sectors[c] - back[c]) < 1e-12);
  }
  const Hsv gray = rgb_to_hsv(Rgb{0.4, 0.4, 0.4});
  CHECK(gray[0] == 0.0);
  CHECK(gray[1] == 0.0);
  CHECK(gray[2] == 0.4);
  const Hsv red = rgb_to_hsv(Rgb{1.0, 0.0, 0.0});
  CHECK(red[0] == 0.0);
  const Hsv blue = rgb_to_hsv(Rgb{0.0, 0.0, 1.0});
  CHECK(blue[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("tone curves") {
  const std::vector<double> flat(8, 1.0);
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.99, 1.0}) {
    CHECK(ops::eval_curve(x, flat) == doctest::Approx(x).epsilon(1e-14));
  }
  CHECK_THROWS_AS(ops::eval_curve(0.5, std::vector<double>(8, 0.0)), DomainError);
  const std::vector<double> w = {1, 2, 3, 4, 0.5, 0.5, 1, 2};
  const ops::ToneCurve curve(w);
  CHECK(curve(0.0) == 0.0);
  CHECK(curve(1.0) == doctest::Approx(1.0));
  // one-sided slope equals N w_i / Z inside piece i
  CHECK(curve.slope(0.3) == doctest::Approx(8.0 * 3.0 / 14.0));
  const double h = 1e-7;
  CHECK((curve(0.3 + h) - curve(0.3 - h)) / (2 * h) == doctest::Approx(curve.slope(0.3)).epsilon(1e-6));
  // parameter gradient against central differences
  std::vector<double> grad(8, 0.0);
  curve.accumulate_param_grad(0.41, 1.0, grad);
  for (int j = 0; j < 8; ++j) {
    auto plus = w, minus = w;
    plus[j] += 1e-6;
    minus[j] -= 1e-6;
    const double fd = (ops::eval_curve(0.41, plus) - ops::eval_curve(0.41, minus)) / 2e-6;
    CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("png round trip is exact on 8-bit values") {
  Rng rng(5);
  Image img(9, 6);
  for (double& v : img.values()) v = rng.uniform_int(0, 255) / 255.0;
  const auto path = scratch("roundtrip.png");
  write_image(img, path);
  const Image back = read_image(path);
  CHECK(back == img);
  Mask m(9, 6);
  for (double& v : m.values()) v = rng.uniform_int(0, 255) / 255.0;
  write_mask(m, scratch("mask.png"));
  CHECK(read_mask(scratch("mask.png")) == m);
}

TEST_CASE("jpeg round trip is close") {
  const Image img = testing::synthetic_image(32, 24, 2);
  const auto path = scratch("roundtrip.jpg");
  write_image(img, path);
  const Image back = read_image(path);
  CHECK(back.width() == 32);
  CHECK(l1_distance(back, img) < 0.02);
}

TEST_CASE("image io errors") {
  CHECK_THROWS_AS(read_image(scratch("missing.png")), FormatError);
  CHECK_THROWS_AS(write_image(Image(2, 2), scratch("bad.tiff")), FormatError);
  CHECK(quantize8(0.5) == 128.0 / 255.0);
}

TEST_CASE("bilinear resize") {
  const Image c = testing::constant_image(10, 6, 0.2, 0.5, 0.7);
  const Image r = resize_bilinear(c, 17, 4);
  CHECK(r.width() == 17);
  for (std::size_t i = 0; i < r.pixel_count(); ++i) {
    CHECK(r.pixel(i)[1] == doctest::Approx(0.5));
  }
  Rng rng(1);
  const Image a = testing::random_image(5, 5, rng);
  CHECK(resize_bilinear(a, 5, 5) == a);
  const auto [w1, h1] = gier_size(600, 400);
  CHECK(w1 == 450);
  CHECK(h1 == 300);
  const auto [w2, h2] = gier_size(1000, 400);
  CHECK(w2 == 500);
  CHECK(h2 == 200);
}

// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate. Prints one [PASS]/[FAIL]/[SKIP] line per criterion and
// exits nonzero if any criterion fails. Arguments select a subset by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "omnedit/annotation.hpp"
#include "omnedit/commands.hpp"
#include "omnedit/grounding.hpp"
#include "omnedit/metrics.hpp"
#include "omnedit/omn.hpp"
#include "omnedit/ops.hpp"
#include "oracle/reference_ops.hpp"
#include "support/synthetic.hpp"

using namespace omnedit;
using ops::OpKind;

namespace {

struct Outcome {
  enum Kind { kPass, kFail, kSkip } kind;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

Image reference_apply(OpKind kind, const Image& img, const std::vector<double>& p, const Mask& m) {
  switch (kind) {
    case OpKind::kBrightness: return reference::brightness(img, p[0], m);
    case OpKind::kSaturation: return reference::saturation(img, p[0], m);
    case OpKind::kContrast: return reference::contrast(img, p[0], m);
    case OpKind::kSharpness: return reference::sharpness(img, p[0], m);
    case OpKind::kTint: return reference::tint(img, p, m);
    default: return reference::hue(img, p, m);
  }
}

std::vector<double> random_params(OpKind kind, Rng& rng) {
  const ops::ParamRange r = ops::param_range(kind);
  std::vector<double> p(static_cast<std::size_t>(ops::param_arity(kind)));
  for (double& v : p) v = rng.uniform(r.lo, r.hi);
  return p;
}

Outcome formula_oracle() {
  const auto start = Clock::now();
  double worst = 0.0;
  Rng rng(1);
  for (OpKind kind : ops::kDifferentiableKinds) {
    for (int i = 0; i < 100; ++i) {
      const Image img = testing::random_image(32, 32, rng);
      const Mask mask = testing::random_mask(32, 32, rng);
      const auto p = random_params(kind, rng);
      worst = std::max(worst, max_abs_diff(ops::apply(kind, img, p, mask), reference_apply(kind, img, p, mask)));
    }
  }
  const double t = seconds_since(start);
  const bool ok = worst < 1e-9 && t < 10.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("600 configs, max abs error %.2e (limit 1e-9), %.1f s (limit 10 s)", worst, t)};
}

Outcome identity_suite() {
  const auto start = Clock::now();
  Rng rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Image img = testing::random_image(24, 24, rng);
    const Mask zero(24, 24, 0.0);
    for (OpKind kind : ops::kDifferentiableKinds) {
      worst = std::max(worst, max_abs_diff(ops::apply(kind, img, ops::identity_params(kind), global_mask(24, 24)), img));
      if (ops::param_arity(kind) > 1) {
        const std::vector<double> equal(static_cast<std::size_t>(ops::param_arity(kind)), rng.uniform(0.001, 5.0));
        worst = std::max(worst, max_abs_diff(ops::apply(kind, img, equal, global_mask(24, 24)), img));
      }
      worst = std::max(worst, max_abs_diff(ops::apply(kind, img, random_params(kind, rng), zero), img));
    }
    worst = std::max(worst, max_abs_diff(ops::apply(OpKind::kColorBg, img, {}, zero), img));
    worst = std::max(worst, max_abs_diff(ops::apply(OpKind::kInpaintObj, img, {}, zero), img));
  }
  // pixels whose luminance is exactly 0.5
  Image mid(16, 16);
  for (std::size_t i = 0; i < mid.pixel_count(); ++i) {
    double* px = mid.pixel(i);
    do {
      px[0] = rng.uniform();
      px[2] = rng.uniform();
      px[1] = (0.5 - 0.27 * px[0] - 0.06 * px[2]) / 0.67;
    } while (px[1] < 0.0 || px[1] > 1.0);
  }
  double fixed_point = 0.0;
  for (double p : {-1.0, 0.0, 1.0, 3.0}) {
    fixed_point = std::max(fixed_point, max_abs_diff(ops::apply_contrast(mid, p, global_mask(16, 16)), mid));
  }
  const double t = seconds_since(start);
  const bool ok = worst < 1e-6 && fixed_point < 1e-6 && t < 5.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("identity max dev %.2e, contrast fixed point max dev %.2e (limit 1e-6), %.1f s (limit 5 s)", worst,
              fixed_point, t)};
}

// Central differences of L(p) = sum(u * apply(p)) against grad_params with
// upstream u.
Outcome gradient_check() {
  const auto start = Clock::now();
  constexpr double h = 1e-4;
  constexpr int side = 16;
  Rng rng(3);
  double worst = 0.0;
  int redrawn = 0;
  for (OpKind kind : ops::kDifferentiableKinds) {
    for (int cfg = 0; cfg < 20; ++cfg) {
      Image img;
      Mask mask;
      std::vector<double> p;
      do {
        img = testing::random_image(side, side, rng);
        mask = testing::random_mask(side, side, rng);
        p = random_params(kind, rng);
        if (ops::near_breakpoint(kind, img, p, mask, h)) ++redrawn;
        else break;
      } while (true);
      Field u(side, side);
      for (double& v : u.values()) v = rng.uniform(-1, 1);
      const auto analytic = ops::grad_params(kind, img, p, mask, u);
      auto probe = [&](const std::vector<double>& q) {
        const Image out = ops::apply(kind, img, q, mask);
        double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) s += u.values()[i] * out.values()[i];
        return s;
      };
      for (std::size_t j = 0; j < p.size(); ++j) {
        auto hi = p, lo = p;
        hi[j] += h;
        lo[j] -= h;
        const double numeric = (probe(hi) - probe(lo)) / (2 * h);
        const double denom = std::max({std::abs(analytic[j]), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(analytic[j] - numeric) / denom);
      }
    }
  }
  const double t = seconds_since(start);
  const bool ok = worst < 1e-3 && t < 60.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("120 configs (%.0f redrawn near breakpoints), max rel error %.2e (limit 1e-3), %.1f s (limit 60 s)",
              redrawn, worst, t)};
}

Outcome single_op_recovery() {
  const auto start = Clock::now();
  std::string detail;
  bool ok = true;
  for (OpKind kind : ops::kDifferentiableKinds) {
    Rng rng(100 + static_cast<int>(kind));
    double worst_l1 = 0.0, worst_dp = 0.0;
    int max_iters = 0;
    for (int i = 0; i < 10; ++i) {
      const Image src = testing::synthetic_image(128, 128, 1000 + i);
      const auto p = testing::benchmark_params(kind, rng);
      const std::vector<Mask> masks{global_mask(128, 128)};
      const Image tgt = ops::apply(kind, src, p, masks[0]);
      const omn::EditScript s{{omn::fit(kind)}};
      const auto r = omn::fit_parameters(s, src, tgt, masks, omn::FitConfig{});
      worst_l1 = std::max(worst_l1, r.final_l1);
      max_iters = std::max(max_iters, r.iterations);
      if (p.size() == 1) worst_dp = std::max(worst_dp, std::abs(r.script.steps[0].params[0] - p[0]));
    }
    ok = ok && worst_l1 < 1e-3 && worst_dp < 1e-2 && max_iters <= 500;
    detail += std::string(ops::name(kind)) + fmt(" L1 %.1e", worst_l1);
    if (ops::param_arity(kind) == 1) detail += fmt(" dp %.1e", worst_dp);
    detail += "; ";
  }
  const double t = seconds_since(start);
  ok = ok && t < 600.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          "worst of 10: " + detail + fmt("%.0f s (limit 600 s)", t)};
}

struct ChainRun {
  double fitted_mean = 0.0;
  double random_mean = 0.0;
  double monotone_fraction = 0.0;
  double seconds = 0.0;
};

// 50 pairs from 2-3 distinct random differentiable ops in canonical order.
ChainRun chain_benchmark(double lambda, bool permuted) {
  const auto start = Clock::now();
  constexpr int kPairs = 50;
  constexpr int side = 64;
  ChainRun run;
  omn::FitConfig cfg;
  cfg.lambda = lambda;
  int monotone = 0;
  for (int i = 0; i < kPairs; ++i) {
    Rng rng(5000 + i);
    const Image src = testing::synthetic_image(side, side, 7000 + i);
    const int n = rng.uniform_int(2, 3);
    auto pool = ops::kDifferentiableKinds;
    std::vector<OpKind> kinds;
    for (int j = 0; j < n; ++j) {
      std::swap(pool[j], pool[rng.uniform_int(j, 5)]);
      kinds.push_back(pool[j]);
    }
    kinds = omn::canonical_order(kinds);
    omn::EditScript gen, fit;
    for (OpKind k : kinds) {
      gen.steps.push_back(omn::fixed(k, testing::benchmark_params(k, rng)));
      fit.steps.push_back(omn::fit(k));
    }
    if (permuted) std::reverse(fit.steps.begin(), fit.steps.end());
    const Image tgt = omn::execute(gen, src).final_image();
    const std::vector<Mask> masks(fit.steps.size(), global_mask(side, side));
    const auto r = omn::fit_parameters(fit, src, tgt, masks, cfg);
    run.fitted_mean += r.final_l1 / kPairs;
    monotone += omn::is_monotone(r.trace, tgt);
    run.random_mean += l1_distance(omn::random_edit(src, 9000 + i), tgt) / kPairs;
  }
  run.monotone_fraction = static_cast<double>(monotone) / kPairs;
  run.seconds = seconds_since(start);
  return run;
}

const ChainRun& canonical_run() {
  static const ChainRun run = chain_benchmark(1.0, false);
  return run;
}

Outcome chain_recovery() {
  const ChainRun& r = canonical_run();
  const double ratio = r.random_mean / r.fitted_mean;
  const bool ok = r.fitted_mean < 0.01 && ratio >= 5.0 && r.seconds < 1800.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("fitted mean L1 %.5f (limit 0.01), random edit mean %.4f, ratio %.1f (limit 5), %.0f s (limit 1800 s)",
              r.fitted_mean, r.random_mean, ratio, r.seconds)};
}

Outcome triplet_ablation() {
  const ChainRun& with = canonical_run();
  const ChainRun without = chain_benchmark(0.0, false);
  const bool ok = with.fitted_mean <= without.fitted_mean + 1e-3 &&
                  with.monotone_fraction > without.monotone_fraction &&
                  with.seconds + without.seconds < 1800.0;
  std::string d = fmt("mean L1 %.5f with vs %.5f without (slack 1e-3); monotone traces %.2f vs %.2f", with.fitted_mean,
                      without.fitted_mean, with.monotone_fraction, without.monotone_fraction);
  return {ok ? Outcome::kPass : Outcome::kFail, d + fmt(", %.0f s (limit 1800 s)", with.seconds + without.seconds)};
}

Outcome order_robustness() {
  const ChainRun& canonical = canonical_run();
  const ChainRun reversed = chain_benchmark(1.0, true);
  const double gap = std::abs(canonical.fitted_mean - reversed.fitted_mean);
  const bool ok = gap < 0.005 && canonical.seconds + reversed.seconds < 1800.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("mean L1 canonical %.5f vs reversed %.5f, gap %.5f (limit 0.005), %.0f s (limit 1800 s)",
              canonical.fitted_mean, reversed.fitted_mean, gap, canonical.seconds + reversed.seconds)};
}

grounding::GroundingInstance random_instance(Rng& rng, std::size_t tokens) {
  auto vec = [&](std::size_t n, double scale) {
    grounding::Vec v(n);
    for (double& x : v) x = rng.uniform(-scale, scale);
    return v;
  };
  grounding::GroundingInstance g;
  for (std::size_t t = 0; t < tokens; ++t) {
    g.tokens.push_back(vec(8, 1));
    g.hidden.push_back(vec(6, 2));
  }
  g.operation = vec(6, 2);
  for (auto& k : g.module_keys) k = vec(6, 2);
  const double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
  g.module_weights = {a / (a + b + c), b / (a + b + c), c / (a + b + c)};
  g.regions.push_back({vec(8, 1), vec(8, 1), vec(8, 1)});
  return g;
}

Outcome grounding_math() {
  const auto start = Clock::now();
  Rng rng(8);
  double norm_err = 0.0, shift_err = 0.0, limit_err = 0.0;
  bool positive = true;
  for (int i = 0; i < 500; ++i) {
    const auto g = random_instance(rng, 1 + static_cast<std::size_t>(i % 9));
    auto check = [&](const std::vector<double>& w) {
      double s = 0.0;
      for (double x : w) {
        s += x;
        positive = positive && x > 0.0;
      }
      norm_err = std::max(norm_err, std::abs(s - 1.0));
    };
    check(grounding::op_attention(g));
    for (grounding::Module m : grounding::kModules) {
      check(grounding::module_attention(g, m));
      check(grounding::conditioned_phrase_embedding(g, m).weights);
    }
    std::vector<double> logits, shifted;
    const double c = rng.uniform(-50, 50);
    for (const auto& h : g.hidden) {
      double d = 0.0;
      for (std::size_t k = 0; k < h.size(); ++k) d += h[k] * g.operation[k];
      logits.push_back(d);
      shifted.push_back(d + c);
    }
    const auto a = grounding::softmax(logits), b = grounding::softmax(shifted);
    for (std::size_t t = 0; t < a.size(); ++t) shift_err = std::max(shift_err, std::abs(a[t] - b[t]));
  }
  // concentrating the operation attention on token j drives q_m to e_j
  for (int i = 0; i < 50; ++i) {
    auto g = random_instance(rng, 4);
    const std::size_t j = static_cast<std::size_t>(i % 4);
    for (auto& h : g.hidden) std::fill(h.begin(), h.end(), 0.0);
    g.hidden[j][0] = 1.0;
    std::fill(g.operation.begin(), g.operation.end(), 0.0);
    g.operation[0] = 200.0;
    for (grounding::Module m : grounding::kModules) {
      const auto pe = grounding::conditioned_phrase_embedding(g, m);
      for (std::size_t k = 0; k < pe.phrase.size(); ++k) {
        limit_err = std::max(limit_err, std::abs(pe.phrase[k] - g.tokens[j][k]));
      }
    }
  }
  // hinge loss is zero exactly when both margins hold
  int hinge_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const grounding::RankingSample s{rng.uniform(), rng.uniform(), rng.uniform()};
    const double margin = rng.uniform(0.0, 0.3);
    const double loss = grounding::ranking_loss(std::span(&s, 1), margin);
    const bool satisfied = s.positive - s.negative_region >= margin && s.positive - s.negative_query >= margin;
    hinge_bad += loss < 0.0 || (loss == 0.0) != satisfied;
  }
  // retrieval contract on every 3-region score grid point
  int retrieval_bad = 0, grid_points = 0;
  for (double theta : {0.05, 0.25, 0.5, 0.95}) {
    for (int a = 0; a <= 20; ++a) {
      for (int b = 0; b <= 20; ++b) {
        for (int c = 0; c <= 20; ++c) {
          const std::vector<double> s = {a * 0.05, b * 0.05, c * 0.05};
          std::vector<std::size_t> expect;
          for (std::size_t r = 0; r < 3; ++r) {
            if (s[r] >= theta) expect.push_back(r);
          }
          if (expect.empty()) {
            std::size_t best = 0;
            for (std::size_t r = 1; r < 3; ++r) {
              if (s[r] > s[best]) best = r;
            }
            expect.push_back(best);
          }
          retrieval_bad += grounding::retrieve_regions(s, theta) != expect;
          ++grid_points;
        }
      }
    }
  }
  const double t = seconds_since(start);
  const bool ok = norm_err < 1e-9 && positive && shift_err < 1e-9 && limit_err < 1e-9 && hinge_bad == 0 &&
                  retrieval_bad == 0 && t < 10.0;
  std::string d = fmt("normalization err %.1e, shift err %.1e, limit err %.1e", norm_err, shift_err, limit_err);
  d += fmt(", hinge violations %.0f/1000, retrieval mismatches %.0f/%.0f, %.2f s (limit 10 s)", hinge_bad,
           retrieval_bad, grid_points, t);
  return {ok ? Outcome::kPass : Outcome::kFail, d};
}

double auc_by_pairs(const std::vector<metrics::LabeledScore>& s) {
  double wins = 0.0, pairs = 0.0;
  for (const auto& p : s) {
    if (!p.label) continue;
    for (const auto& n : s) {
      if (n.label) continue;
      pairs += 1.0;
      wins += p.score > n.score ? 1.0 : (p.score == n.score ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

Outcome metric_suite() {
  const auto start = Clock::now();
  using metrics::LabeledScore;
  int bad = 0;
  const std::vector<LabeledScore> perfect = {{1, true}, {0, false}, {1, true}, {0, false}};
  const std::vector<LabeledScore> inverted = {{0, true}, {1, false}, {0, true}, {1, false}};
  const std::vector<LabeledScore> ties = {{0.5, true}, {0.5, false}, {0.5, false}};
  bad += metrics::f1_at_threshold(perfect, 0.5) != 1.0;
  bad += metrics::roc_auc(perfect) != 1.0;
  bad += metrics::f1_at_threshold(inverted, 0.5) != 0.0;
  bad += metrics::roc_auc(inverted) != 0.0;
  bad += metrics::roc_auc(ties) != 0.5;
  Mask full(8, 8, 1.0), left(8, 8, 0.0);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 4; ++x) left.at(x, y) = 1.0;
  }
  bad += metrics::mask_iou(left, full) != 0.5;
  bad += metrics::mask_iou(full, full) != 1.0;
  Rng rng(9);
  double invariance_err = 0.0, oracle_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    std::vector<LabeledScore> s(20), t(20);
    for (std::size_t k = 0; k < s.size(); ++k) {
      s[k] = {std::round(rng.uniform() * 20) / 20, k % 2 == 0 || rng.uniform() < 0.3};
      t[k] = {std::log(s[k].score + 0.1) * 3 + 2, s[k].label};
    }
    invariance_err = std::max(invariance_err, std::abs(metrics::roc_auc(s) - metrics::roc_auc(t)));
    oracle_err = std::max(oracle_err, std::abs(metrics::roc_auc(s) - auc_by_pairs(s)));
  }
  const double t = seconds_since(start);
  const bool ok = bad == 0 && invariance_err < 1e-12 && oracle_err < 1e-12 && t < 10.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("unit case failures %.0f, AUC monotone-transform err %.1e, pair-count oracle err %.1e, %.2f s (limit 10 s)",
              bad, invariance_err, oracle_err, t)};
}

Outcome dataset_suite() {
  const char* root_env = std::getenv("OMNEDIT_GIER_ROOT");
  if (root_env == nullptr || *root_env == '\0') {
    return {Outcome::kSkip, "set OMNEDIT_GIER_ROOT to an annotation root to run the dataset suite"};
  }
  const std::filesystem::path root = root_env;
  const auto records = annotation::load_annotations(root, false);
  const auto rows = annotation::operation_stats(records);
  const auto& b = rows.front();
  const bool stats_ok = b.name == "brightness" && b.occurrences == 3176 && std::abs(b.operation_pct - 16.00) <= 0.1 &&
                        std::abs(b.image_pct - 51.40) <= 0.1;
  std::string d = fmt("brightness occur %.0f opr%% %.2f img%% %.2f", static_cast<double>(b.occurrences),
                      b.operation_pct, b.image_pct);
  const auto report = std::filesystem::temp_directory_path() / "omnedit_gier_report.json";
  std::ostringstream log;
  cli::EvalOptions opt{root, {}, report, omn::FitConfig{}, cli::ResizePolicy::kGier};
  const int rc = cli::cmd_eval(opt, log);
  const bool eval_ok = rc == cli::kExitOk && std::filesystem::exists(report);
  d += eval_ok ? ", report written to " + report.string() : ", eval failed: " + log.str();
  return {stats_ok && eval_ok ? Outcome::kPass : Outcome::kFail, d};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"operator formula oracle", formula_oracle},
      {"identity suite", identity_suite},
      {"gradient check", gradient_check},
      {"single-op recovery", single_op_recovery},
      {"chain recovery vs random edit", chain_recovery},
      {"triplet loss ablation", triplet_ablation},
      {"order robustness", order_robustness},
      {"grounding math", grounding_math},
      {"metrics", metric_suite},
      {"dataset suite", dataset_suite},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Outcome::kFail, std::string("threw: ") + e.what()};
    }
    const char* tag = o.kind == Outcome::kPass ? "[PASS]" : (o.kind == Outcome::kFail ? "[FAIL]" : "[SKIP]");
    failures += o.kind == Outcome::kFail;
    std::printf("%s %2d %s: %s\n", tag, id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

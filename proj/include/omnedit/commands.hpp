// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "omnedit/grounding.hpp"
#include "omnedit/metrics.hpp"
#include "omnedit/omn.hpp"

namespace omnedit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
// Outputs written, but the optimizer reported no improvement.
inline constexpr int kExitWarning = 3;

enum class ResizePolicy { kNative, kGier };
std::optional<ResizePolicy> parse_resize_policy(std::string_view text);

// out.png -> out.step<k>.png
std::filesystem::path numbered_path(const std::filesystem::path& out, int k);
// out.png -> out<suffix>
std::filesystem::path sibling_path(const std::filesystem::path& out,
                                   std::string_view suffix);

struct ApplyOptions {
  std::filesystem::path script;
  std::filesystem::path image;
  std::filesystem::path out;
  bool save_intermediate = false;
  ResizePolicy resize = ResizePolicy::kNative;
};
// Writes the final image, and I_0..I_K as numbered files on request.
int cmd_apply(const ApplyOptions& opt, std::ostream& log);

struct FitOptions {
  std::filesystem::path script;
  std::filesystem::path source;
  std::filesystem::path target;
  std::filesystem::path out;
  omn::FitConfig fit;
  bool save_intermediate = false;
  ResizePolicy resize = ResizePolicy::kNative;
};
// Writes the fitted image, <out>.fitted.json and <out>.loss.csv.
int cmd_fit(const FitOptions& opt, std::ostream& log);

struct GroundOptions {
  std::filesystem::path bundle;
  std::filesystem::path out;
  grounding::RetrievalPolicy policy;
};
// Writes the composed mask to out and the selection to <out>.regions.json;
// the selection is also echoed on stdout.
int cmd_ground(const GroundOptions& opt, std::ostream& stdout_stream, std::ostream& log);

struct EvalOptions {
  std::filesystem::path annotations;
  // Empty: fit the ground-truth executable operations of every record.
  std::filesystem::path predictions;
  std::filesystem::path out;
  omn::FitConfig fit;
  ResizePolicy resize = ResizePolicy::kNative;
};
int cmd_eval(const EvalOptions& opt, std::ostream& log);

// Evaluation with an in-memory result, for callers that need the numbers.
metrics::EvalReport evaluate(const EvalOptions& opt, std::ostream& log);

struct StatsOptions {
  std::filesystem::path annotations;
  std::filesystem::path out;  // optional JSON copy of the table
};
int cmd_stats(const StatsOptions& opt, std::ostream& stdout_stream, std::ostream& log);

struct GradcheckOptions {
  std::string op;
  std::uint64_t seed = 0;
  int configs = 20;
  double tolerance = 1e-3;
};
// Configuration 0 uses identity parameters; the rest are random. Configs
// near a clip breakpoint are redrawn.
int cmd_gradcheck(const GradcheckOptions& opt, std::ostream& stdout_stream,
                  std::ostream& log);

}  // namespace omnedit::cli

// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "omnedit/image.hpp"

namespace omnedit::grounding {

using Vec = std::vector<double>;

// Visual modules; the attribute branch of the subject module is not modeled.
enum class Module { kSubject, kLocation, kRelation };
inline constexpr std::size_t kModuleCount = 3;
inline constexpr std::array<Module, kModuleCount> kModules = {
    Module::kSubject, Module::kLocation, Module::kRelation};
std::string_view name(Module m);

// Per-module region features v_{m,r}, indexed by Module.
using RegionFeatures = std::array<Vec, kModuleCount>;

// Embeddings for one request/operation pair, produced by external encoders.
struct GroundingInstance {
  std::vector<Vec> tokens;  // e_t, dim D_e
  std::vector<Vec> hidden;  // h_t, dim D_h
  Vec operation;            // o, dim D_h
  std::array<Vec, kModuleCount> module_keys;  // f_m, dim D_h
  std::array<double, kModuleCount> module_weights{};
  std::vector<RegionFeatures> regions;  // dim D_e

  // Throws ShapeError on inconsistent dimensions, DomainError on non-finite
  // values or weights that are negative or do not sum to 1.
  void validate() const;
};

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

// alpha_t = softmax_t <o, h_t>
std::vector<double> op_attention(const GroundingInstance& inst);
// a_{m,t} = softmax_t <f_m, h_t>
std::vector<double> module_attention(const GroundingInstance& inst, Module m);

struct PhraseEmbedding {
  std::vector<double> weights;  // alpha_t a_{m,t} renormalized over t
  Vec phrase;                   // q_m = sum_t weights_t e_t
};
PhraseEmbedding conditioned_phrase_embedding(const GroundingInstance& inst,
                                             Module m);

inline constexpr double kScoreScale = 5.0;

// Throws DomainError when either vector has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double logistic(double x);

// s = sum_m w_m logistic(gamma cos(q_m, v_{m,r}))
double match_score(const GroundingInstance& inst, std::size_t region,
                   double gamma = kScoreScale);
std::vector<double> match_scores(const GroundingInstance& inst,
                                 double gamma = kScoreScale);

// Scores for one positive pair i and its sampled negatives.
struct RankingSample {
  double positive;        // s(Q_i, R_i)
  double negative_region; // s(Q_i, R_j)
  double negative_query;  // s(Q_j, R_i)
};
double ranking_loss(std::span<const RankingSample> samples, double margin);

struct RetrievalPolicy {
  double theta_ground = 0.25;
  double theta_gate = 0.5;

  // Throws DomainError unless both thresholds lie in (0, 1).
  void validate() const;
  bool is_global(double global_probability) const {
    return global_probability >= theta_gate;
  }
};

// Regions scoring at least theta, in index order; the lowest-index argmax
// alone when none qualify. Throws ShapeError on an empty score list.
std::vector<std::size_t> retrieve_regions(std::span<const double> scores,
                                          double theta);

// All-ones when global, otherwise the pixelwise maximum of the selected
// region masks. Throws DomainError for an empty local selection.
Mask compose_mask(std::span<const Mask> selected, bool is_global, int width,
                  int height);

}  // namespace omnedit::grounding

// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "omnedit/error.hpp"

namespace omnedit::grounding {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void require_dim(const Vec& v, std::size_t dim, const std::string& what) {
  if (v.size() != dim) {
    throw ShapeError(what + " has dimension " + std::to_string(v.size()) +
                     ", expected " + std::to_string(dim));
  }
}

void require_finite(const Vec& v, const std::string& what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw DomainError(what + " contains a non-finite value");
  }
}

std::vector<double> attention(const GroundingInstance& inst, const Vec& key) {
  std::vector<double> logits;
  logits.reserve(inst.hidden.size());
  for (const Vec& h : inst.hidden) logits.push_back(dot(key, h));
  return softmax(logits);
}

}  // namespace

std::string_view name(Module m) {
  switch (m) {
    case Module::kSubject: return "subject";
    case Module::kLocation: return "location";
    case Module::kRelation: return "relation";
  }
  return "?";
}

void GroundingInstance::validate() const {
  if (tokens.empty()) throw ShapeError("grounding instance needs at least one token");
  if (hidden.size() != tokens.size()) {
    throw ShapeError("token embeddings and hidden states differ in count");
  }
  const std::size_t de = tokens.front().size();
  const std::size_t dh = hidden.front().size();
  if (de == 0 || dh == 0) throw ShapeError("embedding dimensions must be positive");
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    require_dim(tokens[t], de, "token " + std::to_string(t));
    require_dim(hidden[t], dh, "hidden state " + std::to_string(t));
    require_finite(tokens[t], "token " + std::to_string(t));
    require_finite(hidden[t], "hidden state " + std::to_string(t));
  }
  require_dim(operation, dh, "operation embedding");
  require_finite(operation, "operation embedding");
  double total = 0.0;
  for (Module m : kModules) {
    const auto i = static_cast<std::size_t>(m);
    const std::string mod(name(m));
    require_dim(module_keys[i], dh, mod + " key");
    require_finite(module_keys[i], mod + " key");
    if (!std::isfinite(module_weights[i]) || module_weights[i] < 0.0) {
      throw DomainError(mod + " weight must be finite and non-negative");
    }
    total += module_weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("module weights must sum to 1");
  for (std::size_t r = 0; r < regions.size(); ++r) {
    for (Module m : kModules) {
      const std::string what = "region " + std::to_string(r) + " " + std::string(name(m));
      require_dim(regions[r][static_cast<std::size_t>(m)], de, what);
      require_finite(regions[r][static_cast<std::size_t>(m)], what);
    }
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

std::vector<double> op_attention(const GroundingInstance& inst) {
  return attention(inst, inst.operation);
}

std::vector<double> module_attention(const GroundingInstance& inst, Module m) {
  return attention(inst, inst.module_keys[static_cast<std::size_t>(m)]);
}

PhraseEmbedding conditioned_phrase_embedding(const GroundingInstance& inst,
                                             Module m) {
  const std::vector<double> alpha = op_attention(inst);
  const std::vector<double> a = module_attention(inst, m);
  PhraseEmbedding out;
  out.weights.resize(alpha.size());
  double z = 0.0;
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    out.weights[t] = alpha[t] * a[t];
    z += out.weights[t];
  }
  if (!(z > 0.0)) throw DomainError("attention product underflowed to zero");
  for (double& w : out.weights) w /= z;
  out.phrase.assign(inst.tokens.front().size(), 0.0);
  for (std::size_t t = 0; t < out.weights.size(); ++t) {
    for (std::size_t d = 0; d < out.phrase.size(); ++d) {
      out.phrase[d] += out.weights[t] * inst.tokens[t][d];
    }
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("cosine of vectors of different length");
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) throw DomainError("degenerate feature: zero-norm vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double match_score(const GroundingInstance& inst, std::size_t region, double gamma) {
  if (region >= inst.regions.size()) {
    throw ShapeError("region index " + std::to_string(region) + " out of range");
  }
  double s = 0.0;
  for (Module m : kModules) {
    const auto i = static_cast<std::size_t>(m);
    const Vec q = conditioned_phrase_embedding(inst, m).phrase;
    s += inst.module_weights[i] *
         logistic(gamma * cosine_similarity(q, inst.regions[region][i]));
  }
  return s;
}

std::vector<double> match_scores(const GroundingInstance& inst, double gamma) {
  std::vector<double> out;
  for (std::size_t r = 0; r < inst.regions.size(); ++r) {
    out.push_back(match_score(inst, r, gamma));
  }
  return out;
}

double ranking_loss(std::span<const RankingSample> samples, double margin) {
  double loss = 0.0;
  for (const RankingSample& s : samples) {
    loss += std::max(0.0, margin + s.negative_region - s.positive);
    loss += std::max(0.0, margin + s.negative_query - s.positive);
  }
  return loss;
}

void RetrievalPolicy::validate() const {
  if (!(theta_ground > 0.0 && theta_ground < 1.0)) {
    throw DomainError("grounding threshold must lie in (0, 1)");
  }
  if (!(theta_gate > 0.0 && theta_gate < 1.0)) {
    throw DomainError("gate threshold must lie in (0, 1)");
  }
}

std::vector<std::size_t> retrieve_regions(std::span<const double> scores,
                                          double theta) {
  if (scores.empty()) throw ShapeError("retrieval needs at least one region");
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < scores.size(); ++r) {
    if (scores[r] >= theta) out.push_back(r);
  }
  if (out.empty()) {
    const auto best = std::max_element(scores.begin(), scores.end());
    out.push_back(static_cast<std::size_t>(best - scores.begin()));
  }
  return out;
}

Mask compose_mask(std::span<const Mask> selected, bool is_global, int width,
                  int height) {
  if (is_global) return global_mask(width, height);
  if (selected.empty()) throw DomainError("local mask requested with no selected region");
  Mask out(width, height, 0.0);
  for (const Mask& m : selected) {
    if (m.width() != width || m.height() != height) {
      throw ShapeError("region mask does not match the image size");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.values()[i] = std::max(out.values()[i], m.values()[i]);
    }
  }
  return out;
}

}  // namespace omnedit::grounding

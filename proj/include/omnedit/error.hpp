// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace omnedit {

// Operands whose dimensions or lengths do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inputs for which the requested quantity is undefined (degenerate curve,
// zero-norm feature, single-class AUC, nothing to inpaint from, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or unreadable files: scripts, bundles, annotations, images.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace omnedit

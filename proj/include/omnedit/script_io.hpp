// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "omnedit/image.hpp"
#include "omnedit/omn.hpp"

namespace omnedit::omn {

inline constexpr int kScriptVersion = 1;

// JSON edit scripts; see docs/formats.md. Throws FormatError on malformed
// documents and the validate() errors on well-formed but invalid scripts.
EditScript parse_script(std::string_view text);
std::string serialize_script(const EditScript& script);

EditScript load_script(const std::filesystem::path& path);
void save_script(const EditScript& script, const std::filesystem::path& path);

// Loads every referenced mask file (relative paths against base_dir) and
// checks it against the image extent. Global references become all-ones.
std::vector<Mask> resolve_masks(const EditScript& script,
                                const std::filesystem::path& base_dir,
                                int width, int height);

}  // namespace omnedit::omn

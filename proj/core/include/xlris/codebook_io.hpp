// SPDX-License-Identifier: Apache-2.0
//
// JSON persistence for codebooks. Complex numbers are [re, im] pairs written
// with round-trip precision, RIS phases are integer angle indices plus bits.

#pragma once

#include "xlris/codebook.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace xlris {

std::string codebook_to_json(const Codebook& book);

/// Throws InvalidInput on malformed input or when `expected_fingerprint` is given
/// and does not match the stored one.
Codebook codebook_from_json(const std::string& text, std::optional<std::uint64_t> expected_fingerprint = std::nullopt);

void save_codebook(const Codebook& book, const std::filesystem::path& path);
Codebook load_codebook(const std::filesystem::path& path,
                       std::optional<std::uint64_t> expected_fingerprint = std::nullopt);

}  // namespace xlris

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace xlris {

using CsvCell = std::variant<std::int64_t, double, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;

  void add(std::vector<CsvCell> row);
};

/// Header line, then one line per row. Reals use 12 significant digits.
std::string to_csv_string(const CsvTable& table);

/// Writes through a temporary file and a rename. Refuses an empty table.
void export_csv(const CsvTable& table, const std::filesystem::path& path);

/// Same write discipline for arbitrary text.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// FNV-1a 64-bit digest as 16 hex digits.
std::string content_hash(const std::string& bytes);

}  // namespace xlris

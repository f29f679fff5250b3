#pragma once

#include <filesystem>
#include <string>

#include "hdreg/types.hpp"

namespace hdreg {

struct ParseError : InputError {
  ParseError(const std::string& what, std::size_t row, std::size_t col)
      : InputError(what + " (row " + std::to_string(row) + ", column " +
                   std::to_string(col) + ")"),
        row(row),
        col(col) {}
  std::size_t row, col;
};

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

/// Canonical dataset layout: header row (id, column names), optional second
/// row with id "domain" carrying the grid, then one row per sample. The
/// response ships separately (see load_response_csv).
Dataset load_csv(const std::filesystem::path& path);

/// Single-value-per-sample CSV keyed by sample id (header: id,<name>).
/// Attaches y to d, matching ids; a missing id is an error naming it.
void attach_response_csv(Dataset& d, const std::filesystem::path& path);

void save_csv(const Dataset& d, const std::filesystem::path& path);
void save_response_csv(const Dataset& d, const std::filesystem::path& path,
                       const std::string& value_name = "y");

}  // namespace hdreg

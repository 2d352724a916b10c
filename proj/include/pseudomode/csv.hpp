#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace pseudomode {

/// Columnar view of a delimited numeric file.
struct Table {
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> columns;
  /// Cells in each column that failed to parse as a number and were dropped.
  std::vector<std::size_t> skipped;

  std::size_t column_count() const { return columns.size(); }
};

/// Reads a delimited table; delimiter 0 auto-detects among comma, tab, semicolon.
/// A header row is assumed unless every cell of the first row parses as a number.
Table read_table(std::istream& in, char delimiter = 0);

/// Resolves a --column argument (0-based index or header name) to an index.
std::size_t resolve_column(const Table& table, const std::string& selector);

}  // namespace pseudomode

#include "pseudomode/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <stdexcept>

namespace pseudomode {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

char detect_delimiter(const std::string& line) {
  const char candidates[] = {',', '\t', ';'};
  char best = ',';
  std::size_t best_count = 0;
  for (char c : candidates) {
    const std::size_t count = static_cast<std::size_t>(std::count(line.begin(), line.end(), c));
    if (count > best_count) {
      best_count = count;
      best = c;
    }
  }
  return best;
}

std::string strip_bom(std::string line) {
  if (line.size() >= 3 && line[0] == '\xef' && line[1] == '\xbb' && line[2] == '\xbf')
    line.erase(0, 3);
  return line;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

Table read_table(std::istream& in, char delimiter) {
  std::vector<std::string> lines;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (first) {
      line = strip_bom(line);
      first = false;
    }
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw std::invalid_argument("read_table: input holds no data rows");

  if (delimiter == 0) delimiter = detect_delimiter(lines.front());

  const std::vector<std::string> head = split(lines.front(), delimiter);
  const std::size_t width = head.size();
  double ignored;
  const bool headerless = std::all_of(head.begin(), head.end(), [&](const std::string& cell) {
    return parse_double(cell, ignored);
  });

  Table table;
  table.columns.resize(width);
  table.skipped.assign(width, 0);
  if (headerless) {
    for (std::size_t c = 0; c < width; ++c) table.column_names.push_back("col" + std::to_string(c));
  } else {
    for (std::size_t c = 0; c < width; ++c)
      table.column_names.push_back(head[c].empty() ? "col" + std::to_string(c) : head[c]);
  }

  for (std::size_t r = headerless ? 0 : 1; r < lines.size(); ++r) {
    const std::vector<std::string> cells = split(lines[r], delimiter);
    for (std::size_t c = 0; c < width; ++c) {
      double v;
      if (c < cells.size() && parse_double(cells[c], v))
        table.columns[c].push_back(v);
      else
        ++table.skipped[c];
    }
  }
  return table;
}

std::size_t resolve_column(const Table& table, const std::string& selector) {
  for (std::size_t c = 0; c < table.column_names.size(); ++c)
    if (table.column_names[c] == selector) return c;
  std::size_t index;
  const char* first = selector.data();
  const char* last = first + selector.size();
  const auto [ptr, ec] = std::from_chars(first, last, index);
  if (ec == std::errc() && ptr == last && index < table.column_count()) return index;
  throw std::invalid_argument("resolve_column: no column matches '" + selector + "'");
}

}  // namespace pseudomode

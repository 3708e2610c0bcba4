#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include "dirbr/cli.hpp"
#include "dirbr/errors.hpp"

namespace dirbr::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

}  // namespace

std::vector<std::string> CsvTable::labels() const {
  if (!header.empty()) return header;
  std::vector<std::string> out;
  for (std::size_t j = 0; j < cols(); ++j) out.push_back(fmt::format("y{}", j + 1));
  return out;
}

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);

    std::vector<double> row;
    row.reserve(cells.size());
    std::size_t bad_column = 0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto v = parse_number(cells[j]);
      if (!v) {
        bad_column = j + 1;
        break;
      }
      row.push_back(*v);
    }

    if (bad_column != 0) {
      if (first) {
        for (auto c : cells) table.header.emplace_back(c);
        first = false;
        continue;
      }
      throw DataError(fmt::format("line {}, column {}: '{}' is not a number", line_no, bad_column,
                                  cells[bad_column - 1]));
    }
    first = false;
    const std::size_t expected = table.rows.empty() ? table.header.size() : table.rows.front().size();
    if (expected != 0 && row.size() != expected) {
      throw DataError(
          fmt::format("line {}: {} columns, expected {}", line_no, row.size(), expected));
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw DataError("no data rows");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("cannot read '{}'", path));
  return parse_csv(in);
}

Dataset to_dataset(const CsvTable& table, bool renormalize) {
  std::vector<std::vector<double>> rows = table.rows;
  if (renormalize) {
    for (auto& row : rows) {
      double total = 0.0;
      for (double v : row) total += v;
      if (total > 0.0) {
        for (double& v : row) v /= total;
      }
    }
  }
  try {
    return Dataset::from_rows(rows);
  } catch (const DomainError& e) {
    throw DataError(e.what());
  } catch (const DimensionError& e) {
    throw DataError(e.what());
  }
}

}  // namespace dirbr::cli

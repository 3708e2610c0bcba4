#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirbr/estimators.hpp"
#include "dirbr/model.hpp"
#include "json.hpp"

namespace dirbr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitConvergence = 4;

/// Bad invocation: unknown option values, unreadable files, wrong column count.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that parses but is not valid data (non-numeric cells, ragged rows).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// CSV input

/// Comma separated, decimal point only. The first line is a header when any
/// of its cells is not a number. Blank lines are ignored.
struct CsvTable {
  std::vector<std::string> header;  // empty when the file has no header
  std::vector<std::vector<double>> rows;

  std::size_t cols() const { return rows.empty() ? header.size() : rows.front().size(); }
  /// Header names, or y1..ym.
  std::vector<std::string> labels() const;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// Builds a validated Dataset. With `renormalize` each row is divided by its
/// sum first; zero or negative cells are still rejected.
Dataset to_dataset(const CsvTable& table, bool renormalize);

// ---------------------------------------------------------------------------
// Fit report

struct MethodReport {
  Method method;
  std::vector<double> estimate;
  std::vector<double> std_errors;
  std::vector<double> ci_lower;
  std::vector<double> ci_upper;
  int iterations = 0;
  double final_score_norm = 0.0;
  bool converged = false;
  std::vector<double> init;
};

struct FitReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::string> labels;
  std::vector<double> column_means;
  double level = 0.95;
  std::vector<MethodReport> methods;
};

FitReport make_fit_report(const Dataset& data, std::vector<std::string> labels, double level,
                          const std::vector<FitResult>& fits);

nlohmann::json to_json(const FitReport& report);
FitReport fit_report_from_json(const nlohmann::json& j);

/// Aligned table, two decimals: parameter, method, estimate, standard error
/// and Wald interval.
std::string format_fit_table(const FitReport& report);

// ---------------------------------------------------------------------------
// Ternary plot

struct TernaryPoint {
  double x;
  double y;
};

/// Equilateral embedding x = y2 + y3 / 2, y = (sqrt(3) / 2) y3 of a closed
/// 3-part composition (rows are closed to sum 1 first). Vertices map to
/// (0, 0), (1, 0) and (1/2, sqrt(3)/2). Throws DataError on negative parts or
/// a zero total.
TernaryPoint ternary_point(const std::array<double, 3>& composition);

/// Self-contained SVG: reference triangle, vertex labels, one marker per row.
std::string ternary_svg(const std::vector<std::array<double, 3>>& rows,
                        const std::array<std::string, 3>& labels);

// ---------------------------------------------------------------------------
// Commands

/// Parses argv and dispatches to fit / simulate / ternary. Returns the exit
/// code: 0 success, 2 usage error, 3 data validation error, 4 convergence or
/// divergence error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dirbr::cli

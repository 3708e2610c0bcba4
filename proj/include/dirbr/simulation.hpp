#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dirbr/estimators.hpp"
#include "dirbr/model.hpp"
#include "json.hpp"

namespace dirbr {

struct SimulationSetting {
  std::string name;
  ParamVector alpha_true;
  std::size_t n;
  std::size_t replications;
  std::uint64_t master_seed;
  double ci_level = 0.95;

  void validate() const;
};

/// Aggregate of one estimator on one component. PU, RB and WALD are percentages.
struct MetricsRow {
  std::string setting;
  std::size_t n;
  Method estimator;
  std::size_t component;  // 1-based
  double pu;
  double rb;
  double wald;
  std::size_t replications_used;
  std::size_t failures;
};

struct SettingResult {
  std::string setting;
  std::size_t n;
  std::size_t replications;
  /// Component-major, estimator-minor (alpha_1: ML, MeanBR, MedianBR; alpha_2: ...).
  std::vector<MetricsRow> rows;
  /// Non-converged fits per estimator, indexed like kAllMethods.
  std::array<std::size_t, 3> failures{};
  /// Set when any estimator failed on more than 1% of replications.
  bool warning = false;
};

struct RunOptions {
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
  SolverConfig solver{};
};

/// Replication r draws its sample from RngStream::derive(master_seed,
/// {label_key(name), n, r}), fits all three estimators and records, per
/// component, underestimation, relative error and Wald coverage. Fits that
/// throw are tallied as failures and excluded from that estimator's
/// aggregates. Output does not depend on the thread count.
SettingResult run_setting(const SimulationSetting& setting, const RunOptions& options = {});

struct NamedAlpha {
  std::string name;
  ParamVector alpha;
};

/// S1 = (0.25, 0.25, 0.25), S2 = (0.6, 0.3, 0.1), S3 = (12, 6, 2),
/// S4 = (40/3, 40/3, 40/3).
std::vector<NamedAlpha> builtin_settings();
std::optional<NamedAlpha> builtin_setting(std::string_view name);

struct GridSpec {
  std::vector<NamedAlpha> settings;
  std::vector<std::size_t> n_values;
  std::size_t replications = 10000;
  std::uint64_t master_seed = 0;
  double ci_level = 0.95;
};

struct GridResult {
  /// Setting-major, then n in the order given.
  std::vector<SettingResult> cells;
};

GridResult run_grid(const GridSpec& spec, const RunOptions& options = {});

/// Header: setting,estimator,component,PU,RB,WALD,reps_used,failures.
/// The setting column reads "<name>/n=<n>".
void write_metrics_csv(std::ostream& out, const GridResult& grid);

struct GridRunInfo {
  unsigned threads = 1;
  double wall_seconds = 0.0;
};

/// Configuration, seed, wall time, failure tallies and every metrics row.
nlohmann::json grid_report(const GridSpec& spec, const GridResult& grid, const GridRunInfo& info,
                           const SolverConfig& solver);

}  // namespace dirbr

#include "dirbr/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "dirbr/errors.hpp"
#include "dirbr/sampling.hpp"

namespace dirbr {
namespace {

constexpr std::size_t kMethodCount = std::size(kAllMethods);

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct MethodOutcome {
  bool ok = false;
  Vector estimate;
  Vector lower;
  Vector upper;
};

using Replication = std::array<MethodOutcome, kMethodCount>;

Replication run_replication(const SimulationSetting& setting, const SolverConfig& solver,
                            std::size_t index) {
  Replication out;
  RngStream stream = RngStream::derive(
      setting.master_seed, {label_key(setting.name), setting.n, static_cast<std::uint64_t>(index)});
  std::optional<Dataset> data;
  try {
    data.emplace(draw_dataset(stream, setting.alpha_true, setting.n));
  } catch (const NumericalBreakdown&) {
    return out;
  }
  for (std::size_t k = 0; k < kMethodCount; ++k) {
    try {
      const FitResult result = fit(*data, kAllMethods[k], solver);
      out[k] = {true, result.estimate.values(), result.ci_lower, result.ci_upper};
    } catch (const SolverError&) {
    } catch (const NumericalBreakdown&) {
    }
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
}

}  // namespace

void SimulationSetting::validate() const {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (n < 2) throw std::invalid_argument("sample size n must be >= 2");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw std::invalid_argument("ci_level must lie in (0, 1)");
}

SettingResult run_setting(const SimulationSetting& setting, const RunOptions& options) {
  setting.validate();
  SolverConfig solver = options.solver;
  solver.ci_level = setting.ci_level;

  // Each replication owns its output slot; aggregation below runs in index order.
  std::vector<Replication> reps(setting.replications);
  parallel_for(setting.replications, options.threads,
               [&](std::size_t i) { reps[i] = run_replication(setting, solver, i); });

  const std::size_t m = setting.alpha_true.size();
  SettingResult result{setting.name, setting.n, setting.replications, {}, {}, false};
  result.rows.reserve(m * kMethodCount);
  for (std::size_t k = 0; k < kMethodCount; ++k) {
    for (const Replication& rep : reps) result.failures[k] += rep[k].ok ? 0 : 1;
    if (100 * result.failures[k] > setting.replications) result.warning = true;
  }

  for (std::size_t j = 0; j < m; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double truth = setting.alpha_true[j];
    for (std::size_t k = 0; k < kMethodCount; ++k) {
      std::size_t used = 0, under = 0, covered = 0;
      CompensatedSum relative;
      for (const Replication& rep : reps) {
        const MethodOutcome& o = rep[k];
        if (!o.ok) continue;
        ++used;
        under += o.estimate[jj] <= truth ? 1 : 0;
        covered += (o.lower[jj] <= truth && truth <= o.upper[jj]) ? 1 : 0;
        relative.add((o.estimate[jj] - truth) / truth);
      }
      const double denom = used > 0 ? static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
      result.rows.push_back(MetricsRow{setting.name, setting.n, kAllMethods[k], j + 1,
                                       100.0 * static_cast<double>(under) / denom,
                                       100.0 * relative.value() / denom,
                                       100.0 * static_cast<double>(covered) / denom, used,
                                       result.failures[k]});
    }
  }
  return result;
}

std::vector<NamedAlpha> builtin_settings() {
  const double third = 40.0 / 3.0;
  return {
      {"S1", ParamVector{0.25, 0.25, 0.25}},
      {"S2", ParamVector{0.6, 0.3, 0.1}},
      {"S3", ParamVector{12.0, 6.0, 2.0}},
      {"S4", ParamVector{third, third, third}},
  };
}

std::optional<NamedAlpha> builtin_setting(std::string_view name) {
  for (NamedAlpha& s : builtin_settings()) {
    if (s.name == name) return std::move(s);
  }
  return std::nullopt;
}

GridResult run_grid(const GridSpec& spec, const RunOptions& options) {
  if (spec.settings.empty() || spec.n_values.empty()) {
    throw std::invalid_argument("grid needs at least one setting and one sample size");
  }
  GridResult grid;
  grid.cells.reserve(spec.settings.size() * spec.n_values.size());
  for (const NamedAlpha& s : spec.settings) {
    for (std::size_t n : spec.n_values) {
      grid.cells.push_back(run_setting(
          SimulationSetting{s.name, s.alpha, n, spec.replications, spec.master_seed, spec.ci_level},
          options));
    }
  }
  return grid;
}

void write_metrics_csv(std::ostream& out, const GridResult& grid) {
  out << "setting,estimator,component,PU,RB,WALD,reps_used,failures\n";
  for (const SettingResult& cell : grid.cells) {
    for (const MetricsRow& row : cell.rows) {
      out << fmt::format("{}/n={},{},{},{:.6f},{:.6f},{:.6f},{},{}\n", row.setting, row.n,
                         to_string(row.estimator), row.component, row.pu, row.rb, row.wald,
                         row.replications_used, row.failures);
    }
  }
}

nlohmann::json grid_report(const GridSpec& spec, const GridResult& grid, const GridRunInfo& info,
                           const SolverConfig& solver) {
  nlohmann::json settings = nlohmann::json::array();
  for (const NamedAlpha& s : spec.settings) {
    settings.push_back({{"name", s.name},
                        {"alpha", std::vector<double>(s.alpha.values().begin(), s.alpha.values().end())}});
  }
  nlohmann::json cells = nlohmann::json::array();
  for (const SettingResult& cell : grid.cells) {
    nlohmann::json rows = nlohmann::json::array();
    for (const MetricsRow& row : cell.rows) {
      rows.push_back({{"estimator", to_string(row.estimator)},
                      {"component", row.component},
                      {"PU", row.pu},
                      {"RB", row.rb},
                      {"WALD", row.wald},
                      {"reps_used", row.replications_used},
                      {"failures", row.failures}});
    }
    nlohmann::json failures;
    for (std::size_t k = 0; k < kMethodCount; ++k) {
      failures[std::string(to_string(kAllMethods[k]))] = cell.failures[k];
    }
    cells.push_back({{"setting", cell.setting},
                     {"n", cell.n},
                     {"replications", cell.replications},
                     {"failures", failures},
                     {"warning", cell.warning},
                     {"rows", rows}});
  }
  return {
      {"config",
       {{"settings", settings},
        {"n_values", spec.n_values},
        {"replications", spec.replications},
        {"ci_level", spec.ci_level},
        {"solver",
         {{"max_iterations", solver.max_iterations},
          {"score_tolerance", solver.score_tolerance},
          {"max_step_halvings", solver.max_step_halvings},
          {"s_cap", solver.s_cap}}}}},
      {"master_seed", spec.master_seed},
      {"threads", info.threads},
      {"wall_seconds", info.wall_seconds},
      {"cells", cells},
  };
}

}  // namespace dirbr

#include <chrono>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "dirbr/cli.hpp"
#include "dirbr/errors.hpp"
#include "dirbr/simulation.hpp"

namespace dirbr::cli {
namespace {

struct FitOptions {
  std::string csv_path;
  std::vector<std::string> methods{"ml", "mean-br", "median-br"};
  double level = 0.95;
  bool renormalize = false;
  std::string format = "text";
};

struct SimulateOptions {
  std::vector<std::string> settings;
  std::vector<std::string> alphas;
  std::vector<std::size_t> n_values{10, 20, 40};
  std::size_t reps = 10000;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  double level = 0.95;
  std::string csv_path;
  std::string json_path;
};

struct TernaryOptions {
  std::string csv_path;
  std::string out_path;
};

int cmd_fit(const FitOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<Method> methods;
  for (const auto& name : opt.methods) {
    const auto m = parse_method(name);
    if (!m) throw UsageError(fmt::format("unknown method '{}'", name));
    methods.push_back(*m);
  }
  const CsvTable table = read_csv(opt.csv_path);
  const Dataset data = to_dataset(table, opt.renormalize);

  SolverConfig config;
  config.ci_level = opt.level;
  config.validate();

  std::vector<FitResult> fits;
  std::vector<std::string> failures;
  for (Method m : methods) {
    try {
      fits.push_back(fit(data, m, config));
    } catch (const SolverError& e) {
      failures.emplace_back(e.what());
    } catch (const NumericalBreakdown& e) {
      failures.push_back(fmt::format("{} fit failed: {}", to_string(m), e.what()));
    }
  }

  const FitReport report = make_fit_report(data, table.labels(), opt.level, fits);
  if (opt.format == "json") {
    out << to_json(report).dump(2) << '\n';
  } else {
    out << format_fit_table(report);
  }
  for (const auto& f : failures) err << "error: " << f << '\n';
  return failures.empty() ? kExitOk : kExitConvergence;
}

std::string simulation_table(const GridResult& grid) {
  // One block per setting; columns are the sample sizes in run order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const SettingResult*>> by_setting;
  for (const SettingResult& cell : grid.cells) {
    if (!by_setting.contains(cell.setting)) order.push_back(cell.setting);
    by_setting[cell.setting].push_back(&cell);
  }

  std::string out;
  for (const auto& name : order) {
    const auto& cells = by_setting[name];
    out += fmt::format("{}\n{:<18}", name, "");
    for (const SettingResult* c : cells) out += fmt::format(" | {:^22}", fmt::format("n={}", c->n));
    out += fmt::format("\n{:<18}", "");
    for (std::size_t i = 0; i < cells.size(); ++i) out += fmt::format(" | {:>6} {:>7} {:>7}", "PU", "RB", "WALD");
    out += '\n';
    const std::size_t rows = cells.front()->rows.size();
    for (std::size_t r = 0; r < rows; ++r) {
      const MetricsRow& head = cells.front()->rows[r];
      out += fmt::format("alpha_{} {:<10}", head.component, to_string(head.estimator));
      for (const SettingResult* c : cells) {
        const MetricsRow& row = c->rows[r];
        out += fmt::format(" | {:6.2f} {:7.2f} {:7.2f}", row.pu, row.rb, row.wald);
      }
      out += '\n';
    }
    for (const SettingResult* c : cells) {
      if (c->warning) {
        out += fmt::format("warning: {} n={} failures ml={} mean-br={} median-br={} of {}\n",
                           c->setting, c->n, c->failures[0], c->failures[1], c->failures[2],
                           c->replications);
      }
    }
    out += '\n';
  }
  return out;
}

NamedAlpha parse_inline_alpha(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--alpha '{}': '{}' is not a number", text, cell));
    }
  }
  try {
    ParamVector alpha(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
    std::string label = "alpha[";
    for (std::size_t j = 0; j < values.size(); ++j) label += fmt::format("{}{:g}", j ? ";" : "", values[j]);
    return {label + "]", std::move(alpha)};
  } catch (const DomainError& e) {
    throw UsageError(fmt::format("--alpha '{}': {}", text, e.what()));
  } catch (const DimensionError& e) {
    throw UsageError(fmt::format("--alpha '{}': {}", text, e.what()));
  }
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
  GridSpec spec;
  for (const auto& name : opt.settings) {
    if (name == "all") {
      for (auto& s : builtin_settings()) spec.settings.push_back(std::move(s));
      continue;
    }
    auto s = builtin_setting(name);
    if (!s) throw UsageError(fmt::format("unknown setting '{}' (expected S1..S4 or all)", name));
    spec.settings.push_back(std::move(*s));
  }
  for (const auto& a : opt.alphas) spec.settings.push_back(parse_inline_alpha(a));
  if (spec.settings.empty()) spec.settings = builtin_settings();
  for (std::size_t n : opt.n_values) {
    if (n < 2) throw UsageError("sample sizes must be >= 2");
  }
  if (opt.reps < 1) throw UsageError("--reps must be >= 1");
  spec.n_values = opt.n_values;
  spec.replications = opt.reps;
  spec.master_seed = opt.seed;
  spec.ci_level = opt.level;

  RunOptions run_opts;
  run_opts.threads = opt.threads;
  const auto start = std::chrono::steady_clock::now();
  const GridResult grid = run_grid(spec, run_opts);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out << simulation_table(grid);
  if (!opt.csv_path.empty()) {
    std::ofstream f(opt.csv_path, std::ios::binary);
    if (!f) throw UsageError(fmt::format("cannot write '{}'", opt.csv_path));
    write_metrics_csv(f, grid);
  }
  if (!opt.json_path.empty()) {
    std::ofstream f(opt.json_path, std::ios::binary);
    if (!f) throw UsageError(fmt::format("cannot write '{}'", opt.json_path));
    const unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    f << grid_report(spec, grid, {threads, wall}, run_opts.solver).dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_ternary(const TernaryOptions& opt, std::ostream& out) {
  const CsvTable table = read_csv(opt.csv_path);
  if (table.cols() != 3) {
    throw UsageError(fmt::format("ternary plot needs exactly 3 columns, got {}", table.cols()));
  }
  std::vector<std::array<double, 3>> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) rows.push_back({r[0], r[1], r[2]});
  const auto labels = table.labels();
  const std::string svg = ternary_svg(rows, {labels[0], labels[1], labels[2]});

  std::ofstream f(opt.out_path, std::ios::binary);
  if (!f) throw UsageError(fmt::format("cannot write '{}'", opt.out_path));
  f << svg;
  out << fmt::format("wrote {} points to {}\n", rows.size(), opt.out_path);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dirichlet parameter estimation by maximum likelihood and bias-reduced adjusted scores"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  auto* fit_cmd = app.add_subcommand("fit", "Fit estimators to compositional data in a CSV file");
  fit_cmd->add_option("csv", fit_opt.csv_path, "Input CSV (one composition per row)")->required();
  fit_cmd->add_option("-m,--method", fit_opt.methods, "Methods: ml, mean-br, median-br")
      ->delimiter(',')
      ->check(CLI::IsMember({"ml", "mean-br", "median-br"}))
      ->capture_default_str();
  fit_cmd->add_option("-l,--level", fit_opt.level, "Wald interval level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  fit_cmd->add_flag("--renormalize", fit_opt.renormalize, "Divide each row by its sum before fitting");
  fit_cmd->add_option("-f,--format", fit_opt.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  SimulateOptions sim_opt;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the Monte Carlo study of the three estimators");
  sim_cmd->add_option("-s,--setting", sim_opt.settings, "Built-in setting S1..S4 or 'all' (repeatable)");
  sim_cmd->add_option("-a,--alpha", sim_opt.alphas, "Inline true parameter, e.g. 0.5,0.5,1 (repeatable)");
  sim_cmd->add_option("-n,--n", sim_opt.n_values, "Sample sizes")->delimiter(',')->capture_default_str();
  sim_cmd->add_option("-r,--reps", sim_opt.reps, "Replications per cell")->capture_default_str();
  sim_cmd->add_option("--seed", sim_opt.seed, "Master seed")->envname("DIRBR_SEED")->capture_default_str();
  sim_cmd->add_option("-t,--threads", sim_opt.threads, "Worker threads (0 = all cores)")->capture_default_str();
  sim_cmd->add_option("-l,--level", sim_opt.level, "Wald interval level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sim_cmd->add_option("--csv", sim_opt.csv_path, "Write metrics CSV here");
  sim_cmd->add_option("--json", sim_opt.json_path, "Write JSON report here");

  TernaryOptions tern_opt;
  auto* tern_cmd = app.add_subcommand("ternary", "Write an SVG ternary plot of 3-part compositions");
  tern_cmd->add_option("csv", tern_opt.csv_path, "Input CSV with 3 columns")->required();
  tern_cmd->add_option("-o,--output", tern_opt.out_path, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_opt, out, err);
    if (*sim_cmd) return cmd_simulate(sim_opt, out);
    if (*tern_cmd) return cmd_ternary(tern_opt, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const NumericalBreakdown& e) {
    err << "error: " << e.what() << '\n';
    return kExitConvergence;
  }
  return kExitUsage;
}

}  // namespace dirbr::cli

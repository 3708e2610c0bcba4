#include <fmt/format.h>

#include "dirbr/cli.hpp"

namespace dirbr::cli {
namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

FitReport make_fit_report(const Dataset& data, std::vector<std::string> labels, double level,
                          const std::vector<FitResult>& fits) {
  FitReport report;
  report.n = data.rows();
  report.m = data.cols();
  report.labels = std::move(labels);
  report.column_means = to_std(data.values().colwise().mean().transpose());
  report.level = level;
  for (const FitResult& f : fits) {
    report.methods.push_back(MethodReport{f.method, to_std(f.estimate.values()),
                                          to_std(f.std_errors), to_std(f.ci_lower),
                                          to_std(f.ci_upper), f.iterations, f.final_score_norm,
                                          f.converged, to_std(f.init_used.values())});
  }
  return report;
}

nlohmann::json to_json(const FitReport& report) {
  nlohmann::json methods = nlohmann::json::array();
  for (const MethodReport& m : report.methods) {
    methods.push_back({{"method", to_string(m.method)},
                       {"estimate", m.estimate},
                       {"std_errors", m.std_errors},
                       {"ci_lower", m.ci_lower},
                       {"ci_upper", m.ci_upper},
                       {"diagnostics",
                        {{"iterations", m.iterations},
                         {"final_score_norm", m.final_score_norm},
                         {"converged", m.converged},
                         {"init", m.init}}}});
  }
  return {{"data", {{"n", report.n}, {"m", report.m}, {"labels", report.labels},
                    {"column_means", report.column_means}}},
          {"level", report.level},
          {"methods", methods}};
}

FitReport fit_report_from_json(const nlohmann::json& j) {
  FitReport report;
  const auto& data = j.at("data");
  report.n = data.at("n").get<std::size_t>();
  report.m = data.at("m").get<std::size_t>();
  report.labels = data.at("labels").get<std::vector<std::string>>();
  report.column_means = data.at("column_means").get<std::vector<double>>();
  report.level = j.at("level").get<double>();
  for (const auto& m : j.at("methods")) {
    const auto method = parse_method(m.at("method").get<std::string>());
    if (!method) throw DataError("unknown method in report: " + m.at("method").dump());
    const auto& diag = m.at("diagnostics");
    report.methods.push_back(MethodReport{
        *method, m.at("estimate").get<std::vector<double>>(),
        m.at("std_errors").get<std::vector<double>>(), m.at("ci_lower").get<std::vector<double>>(),
        m.at("ci_upper").get<std::vector<double>>(), diag.at("iterations").get<int>(),
        diag.at("final_score_norm").get<double>(), diag.at("converged").get<bool>(),
        diag.at("init").get<std::vector<double>>()});
  }
  return report;
}

std::string format_fit_table(const FitReport& report) {
  std::size_t label_width = 9;
  for (const auto& l : report.labels) label_width = std::max(label_width, l.size());

  std::string out = fmt::format("n = {}, m = {}\ncolumn means:", report.n, report.m);
  for (std::size_t j = 0; j < report.m; ++j) {
    out += fmt::format(" {} {:.4f}", report.labels[j], report.column_means[j]);
  }
  const std::string ci_header = fmt::format("{:g}% Wald CI", 100.0 * report.level);
  out += fmt::format("\n\n{:<{}}  {:<10}  {:>9}  {:>14}  {}\n", "parameter", label_width, "method",
                     "Estimate", "Standard error", ci_header);
  for (std::size_t j = 0; j < report.m; ++j) {
    bool first = true;
    for (const MethodReport& m : report.methods) {
      out += fmt::format("{:<{}}  {:<10}  {:>9.2f}  {:>14.2f}  {:.2f} - {:.2f}\n",
                         first ? report.labels[j] : "", label_width, to_string(m.method),
                         m.estimate[j], m.std_errors[j], m.ci_lower[j], m.ci_upper[j]);
      first = false;
    }
  }
  return out;
}

}  // namespace dirbr::cli

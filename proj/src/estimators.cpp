#include "dirbr/estimators.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <utility>

#include "dirbr/errors.hpp"

namespace dirbr {
namespace {

std::string_view kind_name(SolverError::Kind kind) {
  switch (kind) {
    case SolverError::Kind::Divergence:
      return "diverged";
    case SolverError::Kind::NoProgress:
      return "step halving exhausted";
    case SolverError::Kind::MaxIterations:
      return "iteration limit reached";
  }
  return "failed";
}

double inf_norm(const Vector& v) {
  // NaN must compare as "worse" than any finite norm.
  if (!v.allFinite()) return std::numeric_limits<double>::infinity();
  return v.cwiseAbs().maxCoeff();
}

// The ML root exists only when sum_j exp(z_j) < 1 (Jensen gap of the data).
// For large s the root satisfies s ~ (m - 1) / (2 gap), so a gap below
// (m - 1) / (2 s_cap) places the root beyond the divergence cap even though
// the score is already flatter than any absolute tolerance there.
bool ml_root_beyond_cap(const SufficientStats& stats, double s_cap) {
  const double gap = -std::expm1(std::log(stats.z.array().exp().sum()));
  const double m = static_cast<double>(stats.z.size());
  return !(gap > (m - 1.0) / (2.0 * s_cap));
}

Vector adjustment(const ParamVector& alpha, std::size_t n, Method method) {
  return method == Method::MeanBR ? mean_br_adjustment(alpha, n) : median_br_adjustment(alpha, n);
}

// Full Newton direction -J^{-1} g for an adjusted score, J = -i + dA/dalpha,
// with the adjustment Jacobian from central differences. Used when the
// Fisher direction i^{-1} g fails to reduce |g|_inf, which happens when n is
// small enough that dA/dalpha is comparable to i.
Vector newton_step(const ParamVector& alpha, const Vector& g, const SufficientStats& stats,
                   Method method) {
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Matrix jacobian = -expected_info(alpha, stats.n).matrix();
  for (Eigen::Index k = 0; k < m; ++k) {
    const double h = 1e-6 * alpha.values()[k];
    Vector up = alpha.values(), down = alpha.values();
    up[k] += h;
    down[k] -= h;
    jacobian.col(k) += (adjustment(ParamVector(up), stats.n, method) -
                        adjustment(ParamVector(down), stats.n, method)) / (2.0 * h);
  }
  return -jacobian.partialPivLu().solve(g);
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ML:
      return "ml";
    case Method::MeanBR:
      return "mean-br";
    case Method::MedianBR:
      return "median-br";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

void SolverConfig::validate() const {
  if (max_iterations <= 0) throw std::invalid_argument("max_iterations must be positive");
  if (!(score_tolerance >= 1e-14)) throw std::invalid_argument("score_tolerance must be >= 1e-14");
  if (max_step_halvings <= 0) throw std::invalid_argument("max_step_halvings must be positive");
  if (!(s_cap > 0.0)) throw std::invalid_argument("s_cap must be positive");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw std::invalid_argument("ci_level must lie in (0, 1)");
}

SolverError::SolverError(Kind kind, Method method, ParamVector last_iterate, int iterations,
                         double score_norm)
    : std::runtime_error(fmt::format("{} fit {} after {} iterations (|g|_inf = {:.3g}, sum(alpha) = {:.6g})",
                                     to_string(method), kind_name(kind), iterations, score_norm,
                                     last_iterate.sum())),
      kind_(kind),
      method_(method),
      last_iterate_(std::move(last_iterate)),
      iterations_(iterations),
      score_norm_(score_norm) {}

ParamVector initialize(const SufficientStats& stats, const Dataset& data) {
  const auto m = static_cast<Eigen::Index>(data.cols());
  const Vector ones = Vector::Ones(m);
  if (stats.n < 2) return ParamVector(ones);

  const Matrix& y = data.values();
  const Vector mean = y.colwise().mean().transpose();
  const double centered = (y.col(0).array() - mean[0]).square().sum();
  const double v1 = centered / static_cast<double>(data.rows() - 1);
  // Identical rows leave only rounding noise from the mean in v1.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * mean[0];
  if (!(v1 > noise * noise)) return ParamVector(ones);

  const double s_hat = mean[0] * (1.0 - mean[0]) / v1 - 1.0;
  if (!(s_hat > 0.0) || !std::isfinite(s_hat)) return ParamVector(ones);
  return ParamVector(mean * s_hat);
}

Vector adjusted_score(const ParamVector& alpha, const SufficientStats& stats, Method method) {
  Vector g = score(alpha, stats);
  switch (method) {
    case Method::ML:
      break;
    case Method::MeanBR:
      g += mean_br_adjustment(alpha, stats.n);
      break;
    case Method::MedianBR:
      g += median_br_adjustment(alpha, stats.n);
      break;
  }
  return g;
}

FitResult solve(const SufficientStats& stats, Method method, const SolverConfig& config,
                const ParamVector& init) {
  config.validate();
  if (static_cast<std::size_t>(stats.z.size()) != init.size()) {
    throw DimensionError(fmt::format("start point has {} components but statistics have {}",
                                     init.size(), stats.z.size()));
  }

  if (method == Method::ML && ml_root_beyond_cap(stats, config.s_cap)) {
    throw SolverError(SolverError::Kind::Divergence, method, init, 0,
                      inf_norm(adjusted_score(init, stats, method)));
  }

  ParamVector alpha = init;
  Vector g = adjusted_score(alpha, stats, method);
  double norm = inf_norm(g);
  std::vector<double> history{norm};
  int iterations = 0;

  // Halves `step` until the candidate is interior and does not increase |g|_inf.
  const auto try_step = [&](const Vector& step) {
    double scale = 1.0;
    for (int halving = 0; halving <= config.max_step_halvings; ++halving, scale *= 0.5) {
      const Vector candidate = alpha.values() + scale * step;
      if (!candidate.allFinite() || !(candidate.minCoeff() > 0.0)) continue;
      ParamVector next(candidate);
      Vector next_g;
      try {
        next_g = adjusted_score(next, stats, method);
      } catch (const NumericalBreakdown&) {
        continue;
      }
      const double next_norm = inf_norm(next_g);
      if (next_norm <= norm) {
        alpha = std::move(next);
        g = std::move(next_g);
        norm = next_norm;
        return true;
      }
    }
    return false;
  };

  while (norm > config.score_tolerance) {
    if (iterations == config.max_iterations) {
      throw SolverError(SolverError::Kind::MaxIterations, method, alpha, iterations, norm);
    }
    const Vector fisher_step = expected_info(alpha, stats.n).inverse() * g;
    bool accepted = try_step(fisher_step);
    if (!accepted && method != Method::ML) {
      accepted = try_step(newton_step(alpha, g, stats, method));
    }
    if (!accepted) {
      throw SolverError(SolverError::Kind::NoProgress, method, alpha, iterations, norm);
    }
    ++iterations;
    history.push_back(norm);
    if (alpha.sum() > config.s_cap) {
      throw SolverError(SolverError::Kind::Divergence, method, alpha, iterations, norm);
    }
  }

  const WaldInterval wald = wald_interval(alpha, stats.n, config.ci_level);
  return FitResult{method,     alpha, wald.se, wald.lower, wald.upper, config.ci_level,
                   iterations, norm,  true,    init,       std::move(history)};
}

FitResult fit(const Dataset& data, Method method, const SolverConfig& config) {
  const SufficientStats stats = suff_stats(data);
  const ParamVector init = initialize(stats, data);
  try {
    return solve(stats, method, config, init);
  } catch (const SolverError&) {
    if (method == Method::ML) throw;
    const Vector mean = data.values().colwise().mean().transpose();
    const ParamVector restart(mean * static_cast<double>(mean.size()));
    try {
      return solve(stats, method, config, restart);
    } catch (const SolverError&) {
    } catch (const NumericalBreakdown&) {
    }
    throw;
  }
}

}  // namespace dirbr

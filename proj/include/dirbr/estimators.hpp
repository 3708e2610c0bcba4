#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dirbr/model.hpp"

namespace dirbr {

/// Estimating equation solved by the Fisher scoring loop:
///   ML        U(alpha) = 0
///   MeanBR    U(alpha) + A*(alpha) = 0
///   MedianBR  U(alpha) + A~(alpha) = 0
enum class Method { ML, MeanBR, MedianBR };

inline constexpr Method kAllMethods[] = {Method::ML, Method::MeanBR, Method::MedianBR};

/// "ml", "mean-br", "median-br".
std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

struct SolverConfig {
  int max_iterations = 500;
  /// Convergence threshold on the infinity norm of the adjusted score.
  double score_tolerance = 1e-8;
  int max_step_halvings = 30;
  /// Divergence guard on s = sum(alpha).
  double s_cap = 1e8;
  /// Level of the reported Wald intervals.
  double ci_level = 0.95;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct FitResult {
  Method method;
  ParamVector estimate;
  Vector std_errors;
  Vector ci_lower;
  Vector ci_upper;
  double ci_level;
  int iterations;
  double final_score_norm;
  bool converged;
  ParamVector init_used;
  /// Adjusted-score norm at the start point and after every accepted step.
  std::vector<double> score_norm_history;
};

/// Thrown by solve() when no root is reached. Carries the last accepted iterate.
class SolverError : public std::runtime_error {
 public:
  enum class Kind { Divergence, NoProgress, MaxIterations };

  SolverError(Kind kind, Method method, ParamVector last_iterate, int iterations,
              double score_norm);

  Kind kind() const { return kind_; }
  Method method() const { return method_; }
  const ParamVector& last_iterate() const { return last_iterate_; }
  int iterations() const { return iterations_; }
  double score_norm() const { return score_norm_; }

 private:
  Kind kind_;
  Method method_;
  ParamVector last_iterate_;
  int iterations_;
  double score_norm_;
};

/// Moment-matching start point: alpha_j = ybar_j * s_hat with
/// s_hat = ybar_1 (1 - ybar_1) / v_1 - 1, v_1 the sample variance (n - 1
/// denominator) of the first column. Falls back to all ones when n = 1,
/// v_1 = 0 or s_hat <= 0.
ParamVector initialize(const SufficientStats& stats, const Dataset& data);

/// U, U + A* or U + A~ at alpha.
Vector adjusted_score(const ParamVector& alpha, const SufficientStats& stats, Method method);

/// Fisher scoring alpha <- alpha + i(alpha)^{-1} g(alpha) with step halving
/// whenever the candidate leaves the positive orthant or increases the
/// infinity norm of g. Throws SolverError on divergence (s > s_cap),
/// exhausted step halving or the iteration limit.
FitResult solve(const SufficientStats& stats, Method method, const SolverConfig& config,
                const ParamVector& init);

/// suff_stats -> initialize -> solve, with Wald intervals at config.ci_level.
/// A bias-reduced solve that fails from the moment start is retried once from
/// alpha = m * column means (sum m); the original error is rethrown if that
/// also fails.
FitResult fit(const Dataset& data, Method method, const SolverConfig& config = {});

}  // namespace dirbr

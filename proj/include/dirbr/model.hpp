#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace dirbr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Positive Dirichlet parameter vector alpha with m >= 2 components.
///
/// Construction validates the invariants and throws DomainError (a component
/// is not positive and finite) or DimensionError (fewer than two components).
class ParamVector {
 public:
  explicit ParamVector(Vector alpha);
  ParamVector(std::initializer_list<double> alpha);

  const Vector& values() const { return alpha_; }
  double operator[](std::size_t k) const { return alpha_[static_cast<Eigen::Index>(k)]; }
  std::size_t size() const { return static_cast<std::size_t>(alpha_.size()); }
  /// s = sum of the components.
  double sum() const { return sum_; }

  friend bool operator==(const ParamVector& a, const ParamVector& b) {
    return a.alpha_.size() == b.alpha_.size() && a.alpha_ == b.alpha_;
  }

 private:
  Vector alpha_;
  double sum_;
};

/// n x m matrix of compositions, each row strictly inside the open simplex.
class Dataset {
 public:
  /// Row sums must equal 1 within this tolerance.
  static constexpr double kRowSumTolerance = 1e-8;

  /// Throws DomainError naming the first offending row/column (1-based) when an
  /// entry is outside (0, 1) or a row does not sum to one.
  explicit Dataset(Matrix y);
  static Dataset from_rows(const std::vector<std::vector<double>>& rows);

  const Matrix& values() const { return y_; }
  std::size_t rows() const { return static_cast<std::size_t>(y_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(y_.cols()); }

 private:
  Matrix y_;
};

/// Sample size and per-component mean log proportions z_j.
struct SufficientStats {
  std::size_t n = 0;
  Vector z;
};

/// Expected information i(alpha) = n { diag(psi'(alpha_j)) - psi'(s) 11^T }
/// together with its inverse, obtained from the rank-one structure.
class InfoMatrix {
 public:
  /// Throws NumericalBreakdown if 1 - psi'(s) * sum_j 1/psi'(alpha_j) <= 0.
  InfoMatrix(const ParamVector& alpha, std::size_t n);

  const Matrix& matrix() const { return info_; }
  const Matrix& inverse() const { return inverse_; }
  std::size_t n() const { return n_; }

 private:
  std::size_t n_;
  Matrix info_;
  Matrix inverse_;
};

SufficientStats suff_stats(const Dataset& data);

/// l(alpha) = n { log Gamma(s) - sum_j log Gamma(alpha_j) + sum_j alpha_j z_j }.
/// This omits the data constant -n sum_j z_j of the full log-likelihood.
double loglik_kernel(const ParamVector& alpha, const SufficientStats& stats);

/// Log Dirichlet density at an interior simplex point y.
double log_density(const ParamVector& alpha, const Vector& y);

/// U_r = n { psi(s) - psi(alpha_r) + z_r }.
Vector score(const ParamVector& alpha, const SufficientStats& stats);

InfoMatrix expected_info(const ParamVector& alpha, std::size_t n);

/// P_r = E{U U^T U_r}, with entries n { psi''(alpha_a) [a = b = r] - psi''(s) }.
/// `r` is a zero-based component index.
Matrix third_cumulant_matrix(const ParamVector& alpha, std::size_t n, std::size_t r);

/// Q_r = E{-j(alpha) U_r}. The observed information does not depend on the
/// data, so this is the zero matrix.
Matrix q_matrix(const ParamVector& alpha, std::size_t n, std::size_t r);

/// A*_r = tr{ i^{-1} (P_r + Q_r) } / 2.
Vector mean_br_adjustment(const ParamVector& alpha, std::size_t n);

/// A~ = A* - i F, where F_r = [i^{-1}]_r^T F~_r,
/// F~_{r,t} = tr{ h_r (P_t / 3 + Q_t / 2) } and
/// h_r = [i^{-1}]_r [i^{-1}]_r^T / i^{rr}.
Vector median_br_adjustment(const ParamVector& alpha, std::size_t n);

struct WaldInterval {
  Vector se;
  Vector lower;
  Vector upper;
};

/// Two-sided standard normal quantile q with P(|Z| <= q) = level.
double normal_critical_value(double level);

/// se_r = sqrt([i(alpha_hat)^{-1}]_rr) and alpha_hat_r -/+ q se_r.
WaldInterval wald_interval(const ParamVector& alpha_hat, std::size_t n, double level);

}  // namespace dirbr

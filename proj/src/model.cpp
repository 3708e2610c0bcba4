#include "dirbr/model.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <fmt/format.h>
#include <utility>

#include "dirbr/errors.hpp"
#include "dirbr/polygamma.hpp"

namespace dirbr {
namespace {

Eigen::Index idx(std::size_t k) { return static_cast<Eigen::Index>(k); }

void check_dims(const ParamVector& alpha, const Vector& z) {
  if (static_cast<std::size_t>(z.size()) != alpha.size()) {
    throw DimensionError(fmt::format("parameter has {} components but statistics have {}",
                                     alpha.size(), z.size()));
  }
}

void check_n(std::size_t n) {
  if (n == 0) throw DomainError("sample size must be positive");
}

void check_component(const ParamVector& alpha, std::size_t r) {
  if (r >= alpha.size()) {
    throw DimensionError(
        fmt::format("component index {} out of range for m = {}", r, alpha.size()));
  }
}

// Validates one composition; `row` is 1-based and only used for messages.
void check_simplex_row(const Eigen::Ref<const Vector>& y, std::size_t row) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const double v = y[j];
    if (!(v > 0.0 && v < 1.0)) {
      throw DomainError(fmt::format("row {}, column {}: proportion {} is not strictly inside (0, 1)",
                                    row, j + 1, v));
    }
    total += v;
  }
  if (std::abs(total - 1.0) > Dataset::kRowSumTolerance) {
    throw DomainError(fmt::format("row {}: proportions sum to {:.12g}, expected 1", row, total));
  }
}

}  // namespace

ParamVector::ParamVector(Vector alpha) : alpha_(std::move(alpha)), sum_(0.0) {
  if (alpha_.size() < 2) {
    throw DimensionError(
        fmt::format("a Dirichlet parameter needs at least 2 components, got {}", alpha_.size()));
  }
  for (Eigen::Index k = 0; k < alpha_.size(); ++k) {
    if (!(alpha_[k] > 0.0) || !std::isfinite(alpha_[k])) {
      throw DomainError(fmt::format("alpha[{}] = {} is not positive and finite", k + 1, alpha_[k]));
    }
  }
  sum_ = alpha_.sum();
}

ParamVector::ParamVector(std::initializer_list<double> alpha)
    : ParamVector(Eigen::Map<const Vector>(alpha.begin(), static_cast<Eigen::Index>(alpha.size()))) {}

Dataset::Dataset(Matrix y) : y_(std::move(y)) {
  if (y_.rows() < 1) throw DimensionError("dataset has no rows");
  if (y_.cols() < 2) throw DimensionError("dataset needs at least 2 columns");
  for (Eigen::Index i = 0; i < y_.rows(); ++i) {
    check_simplex_row(y_.row(i).transpose(), static_cast<std::size_t>(i) + 1);
  }
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DimensionError("dataset has no rows");
  const std::size_t m = rows.front().size();
  Matrix y(idx(rows.size()), idx(m));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m) {
      throw DimensionError(
          fmt::format("row {} has {} columns, expected {}", i + 1, rows[i].size(), m));
    }
    for (std::size_t j = 0; j < m; ++j) y(idx(i), idx(j)) = rows[i][j];
  }
  return Dataset(std::move(y));
}

InfoMatrix::InfoMatrix(const ParamVector& alpha, std::size_t n) : n_(n) {
  check_n(n);
  const auto m = idx(alpha.size());
  const double nn = static_cast<double>(n);
  const double tri_s = trigamma(alpha.sum());

  Vector tri(m);
  for (Eigen::Index j = 0; j < m; ++j) tri[j] = trigamma(alpha.values()[j]);

  info_ = Matrix::Constant(m, m, -nn * tri_s);
  info_.diagonal() += nn * tri;

  // i = n (D - c 11^T)  =>  i^{-1} = (1/n) [D^{-1} + c / (1 - c t) d d^T],
  // d = D^{-1} 1, t = 1^T d.
  const Vector d = tri.cwiseInverse();
  const double t = d.sum();
  const double denom = 1.0 - tri_s * t;
  if (!(denom > 0.0)) {
    throw NumericalBreakdown(
        fmt::format("expected information is not positive definite (1 - psi'(s) t = {:.3g})", denom));
  }
  inverse_ = (tri_s / denom) * d * d.transpose();
  inverse_.diagonal() += d;
  inverse_ /= nn;
}

SufficientStats suff_stats(const Dataset& data) {
  SufficientStats stats;
  stats.n = data.rows();
  stats.z = data.values().array().log().colwise().mean().transpose();
  return stats;
}

double loglik_kernel(const ParamVector& alpha, const SufficientStats& stats) {
  check_dims(alpha, stats.z);
  double value = log_gamma(alpha.sum());
  for (std::size_t j = 0; j < alpha.size(); ++j) value -= log_gamma(alpha[j]);
  value += alpha.values().dot(stats.z);
  return static_cast<double>(stats.n) * value;
}

double log_density(const ParamVector& alpha, const Vector& y) {
  if (static_cast<std::size_t>(y.size()) != alpha.size()) {
    throw DimensionError(
        fmt::format("point has {} components but alpha has {}", y.size(), alpha.size()));
  }
  check_simplex_row(y, 1);
  SufficientStats single{1, y.array().log().matrix()};
  return loglik_kernel(alpha, single) - single.z.sum();
}

Vector score(const ParamVector& alpha, const SufficientStats& stats) {
  check_dims(alpha, stats.z);
  const double psi_s = digamma(alpha.sum());
  Vector u(stats.z.size());
  for (Eigen::Index r = 0; r < u.size(); ++r) {
    u[r] = psi_s - digamma(alpha.values()[r]) + stats.z[r];
  }
  return static_cast<double>(stats.n) * u;
}

InfoMatrix expected_info(const ParamVector& alpha, std::size_t n) { return InfoMatrix(alpha, n); }

Matrix third_cumulant_matrix(const ParamVector& alpha, std::size_t n, std::size_t r) {
  check_n(n);
  check_component(alpha, r);
  const auto m = idx(alpha.size());
  const double nn = static_cast<double>(n);
  Matrix p = Matrix::Constant(m, m, -nn * tetragamma(alpha.sum()));
  p(idx(r), idx(r)) += nn * tetragamma(alpha[r]);
  return p;
}

Matrix q_matrix(const ParamVector& alpha, std::size_t n, std::size_t r) {
  check_n(n);
  check_component(alpha, r);
  const auto m = idx(alpha.size());
  return Matrix::Zero(m, m);
}

namespace {

struct AdjustmentTerms {
  std::vector<Matrix> p;
  std::vector<Matrix> q;
};

AdjustmentTerms adjustment_terms(const ParamVector& alpha, std::size_t n) {
  AdjustmentTerms terms;
  terms.p.reserve(alpha.size());
  terms.q.reserve(alpha.size());
  for (std::size_t r = 0; r < alpha.size(); ++r) {
    terms.p.push_back(third_cumulant_matrix(alpha, n, r));
    terms.q.push_back(q_matrix(alpha, n, r));
  }
  return terms;
}

Vector mean_adjustment(const InfoMatrix& info, const AdjustmentTerms& terms) {
  const auto m = idx(terms.p.size());
  Vector a(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto k = static_cast<std::size_t>(r);
    a[r] = 0.5 * (info.inverse() * (terms.p[k] + terms.q[k])).trace();
  }
  return a;
}

}  // namespace

Vector mean_br_adjustment(const ParamVector& alpha, std::size_t n) {
  const InfoMatrix info(alpha, n);
  return mean_adjustment(info, adjustment_terms(alpha, n));
}

Vector median_br_adjustment(const ParamVector& alpha, std::size_t n) {
  const InfoMatrix info(alpha, n);
  const AdjustmentTerms terms = adjustment_terms(alpha, n);
  const Matrix& inv = info.inverse();
  const auto m = inv.rows();

  Vector f(m);
  Vector f_tilde(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Vector column = inv.col(r);
    const Matrix h = column * column.transpose() / inv(r, r);
    for (Eigen::Index t = 0; t < m; ++t) {
      const auto k = static_cast<std::size_t>(t);
      f_tilde[t] = (h * (terms.p[k] / 3.0 + terms.q[k] / 2.0)).trace();
    }
    f[r] = column.dot(f_tilde);
  }
  return mean_adjustment(info, terms) - info.matrix() * f;
}

double normal_critical_value(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError(fmt::format("confidence level must lie in (0, 1), got {}", level));
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + level));
}

WaldInterval wald_interval(const ParamVector& alpha_hat, std::size_t n, double level) {
  const double q = normal_critical_value(level);
  const InfoMatrix info(alpha_hat, n);
  WaldInterval out;
  out.se = info.inverse().diagonal().cwiseSqrt();
  out.lower = alpha_hat.values() - q * out.se;
  out.upper = alpha_hat.values() + q * out.se;
  return out;
}

}  // namespace dirbr

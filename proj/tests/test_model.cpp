#include <cmath>
#include <numbers>
#include <random>

#include "dirbr/errors.hpp"
#include "dirbr/model.hpp"
#include "dirbr/polygamma.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace dirbr;
using dirbr::testing::bumped;
using dirbr::testing::random_alpha;
using dirbr::testing::random_dataset;
using doctest::Approx;

namespace {

SufficientStats single_row(std::initializer_list<double> y) {
  return suff_stats(Dataset::from_rows({std::vector<double>(y)}));
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("suff_stats examples") {
  SUBCASE("single row (1/2, 1/2)") {
    const auto s = single_row({0.5, 0.5});
    CHECK(s.n == 1);
    CHECK(s.z[0] == Approx(-0.6931471806).epsilon(1e-10));
    CHECK(s.z[1] == Approx(-0.6931471806).epsilon(1e-10));
  }
  SUBCASE("two rows") {
    const auto s = suff_stats(Dataset::from_rows({{0.25, 0.75}, {0.75, 0.25}}));
    CHECK(s.n == 2);
    CHECK(s.z[0] == Approx(-0.8369882168).epsilon(1e-10));
    CHECK(s.z[1] == Approx(-0.8369882168).epsilon(1e-10));
  }
  SUBCASE("barycentre") {
    const double third = 1.0 / 3.0;
    const auto s = single_row({third, third, third});
    for (int j = 0; j < 3; ++j) CHECK(s.z[j] == Approx(-1.0986122887).epsilon(1e-10));
  }
}

TEST_CASE("dataset validation names row and column") {
  CHECK_THROWS_WITH_AS(Dataset::from_rows({{0.5, 0.5}, {0.0, 1.0}}), doctest::Contains("row 2, column 1"),
                       DomainError);
  CHECK_THROWS_WITH_AS(Dataset::from_rows({{0.5, 0.5}, {0.3, 0.6}}), doctest::Contains("row 2"),
                       DomainError);
  CHECK_THROWS_AS(Dataset::from_rows({{0.5, 0.5}, {0.3, 0.3, 0.4}}), DimensionError);
  CHECK_THROWS_AS(Dataset::from_rows({{1.0}}), DimensionError);
  // within the 1e-8 row-sum tolerance
  CHECK_NOTHROW(Dataset::from_rows({{0.5, 0.5 + 5e-9}}));
}

TEST_CASE("ParamVector invariants") {
  CHECK_THROWS_AS(ParamVector({1.0}), DimensionError);
  CHECK_THROWS_AS(ParamVector({1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(ParamVector({1.0, -2.0}), DomainError);
  CHECK_THROWS_AS(ParamVector({1.0, std::numeric_limits<double>::infinity()}), DomainError);
  CHECK(ParamVector({1.5, 2.5}).sum() == 4.0);
}

TEST_CASE("loglik_kernel examples") {
  CHECK(loglik_kernel({1, 1}, single_row({0.5, 0.5})) == Approx(-1.3862943611).epsilon(1e-10));
  CHECK(loglik_kernel({2, 2}, single_row({0.5, 0.5})) == Approx(-0.980829253).epsilon(1e-9));

  std::mt19937_64 rng(11);
  for (int m : {2, 3, 5}) {
    const auto data = random_dataset(rng, random_alpha(rng, m, 0.5, 5), 7);
    const auto stats = suff_stats(data);
    // Only log Gamma(s) = log (m - 1)! survives.
    CHECK(loglik_kernel(ParamVector(Vector::Ones(m)), stats) ==
          Approx(7.0 * (std::lgamma(m) + stats.z.sum())).epsilon(1e-13));
  }
  CHECK_THROWS_AS(loglik_kernel({1, 1, 1}, single_row({0.5, 0.5})), DimensionError);
}

TEST_CASE("log_density examples") {
  CHECK(log_density({1, 1}, Vector{{0.3, 0.7}}) == Approx(0.0).epsilon(1e-14));
  CHECK(log_density({2, 2}, Vector{{0.5, 0.5}}) == Approx(0.4054651081).epsilon(1e-10));
  CHECK(log_density({1, 1, 1}, Vector{{0.2, 0.5, 0.3}}) == Approx(std::log(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(log_density({1, 1}, Vector{{0.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(log_density({1, 1}, Vector{{0.3, 0.3, 0.4}}), DimensionError);
}

TEST_CASE("log_density integrates to one") {
  // Composite Simpson on (0, 1) for m = 2 (a Beta density); parameters >= 2 keep the integrand smooth at the endpoints.
  for (auto alpha : {ParamVector{2.0, 3.0}, ParamVector{2.5, 7.25}, ParamVector{12.0, 6.0}}) {
    const int cells = 20000;
    const double h = 1.0 / cells;
    double total = 0.0;
    for (int k = 1; k < cells; ++k) {
      const double x = k * h;
      const double w = (k % 2 == 1) ? 4.0 : 2.0;
      total += w * std::exp(log_density(alpha, Vector{{x, 1.0 - x}}));
    }
    CHECK(total * h / 3.0 == Approx(1.0).epsilon(1e-8));
  }
  // m = 3 uniform-in-y1 quadrature of a Dirichlet(2, 2, 3) density over the triangle.
  const ParamVector alpha{2.0, 2.0, 3.0};
  const int cells = 800;
  double total = 0.0;
  for (int a = 0; a < cells; ++a) {
    for (int b = 0; a + b < cells - 1; ++b) {
      // midpoint rule on the lower triangles of the grid plus upper ones
      const double h = 1.0 / cells;
      const double x1 = (a + 1.0 / 3.0) * h, x2 = (b + 1.0 / 3.0) * h;
      total += 0.5 * h * h * std::exp(log_density(alpha, Vector{{x1, x2, 1 - x1 - x2}}));
      const double u1 = (a + 2.0 / 3.0) * h, u2 = (b + 2.0 / 3.0) * h;
      if (a + b < cells - 2) {
        total += 0.5 * h * h * std::exp(log_density(alpha, Vector{{u1, u2, 1 - u1 - u2}}));
      }
    }
  }
  CHECK(total == Approx(1.0).epsilon(1e-3));
}

TEST_CASE("score examples") {
  const Vector u = score({1, 1}, single_row({0.5, 0.5}));
  CHECK(u[0] == Approx(0.3068528194).epsilon(1e-10));
  CHECK(u[1] == Approx(0.3068528194).epsilon(1e-10));

  const Vector v = score({2, 1}, single_row({0.5, 0.5}));
  CHECK(v[0] == Approx(-0.1931471806).epsilon(1e-10));
  CHECK(v[1] == Approx(0.8068528194).epsilon(1e-10));

  // Stationarity construction: z_r = psi(alpha_r) - psi(s).
  const ParamVector alpha{0.7, 3.1, 12.0};
  SufficientStats stats{4, Vector(3)};
  for (int r = 0; r < 3; ++r) stats.z[r] = digamma(alpha[r]) - digamma(alpha.sum());
  CHECK(score(alpha, stats).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("expected_info examples") {
  const InfoMatrix info = expected_info({1, 1}, 1);
  CHECK(info.matrix()(0, 0) == Approx(1.0).epsilon(1e-12));
  CHECK(info.matrix()(1, 1) == Approx(1.0).epsilon(1e-12));
  CHECK(info.matrix()(0, 1) == Approx(-0.6449340668).epsilon(1e-10));
  CHECK(info.matrix()(1, 0) == Approx(-0.6449340668).epsilon(1e-10));

  const ParamVector alpha{12, 6, 2};
  const Matrix one = expected_info(alpha, 1).matrix();
  CHECK(max_abs(expected_info(alpha, 17).matrix() - 17.0 * one) <= 1e-13 * 17.0 * max_abs(one));
  // psi'(12), psi'(6), psi'(2), psi'(20) from the 60-digit oracle.
  const double t12 = 0.086901872871768390750, t6 = 0.18132295573711532536,
               t2 = 0.64493406684822643647, t20 = 0.051270822935203119832;
  CHECK(one(0, 0) == Approx(t12 - t20).epsilon(1e-12));
  CHECK(one(1, 1) == Approx(t6 - t20).epsilon(1e-12));
  CHECK(one(2, 2) == Approx(t2 - t20).epsilon(1e-12));
  CHECK(one(0, 2) == Approx(-t20).epsilon(1e-12));
  CHECK_THROWS_AS(expected_info(alpha, 0), DomainError);
}

TEST_CASE("third_cumulant_matrix examples") {
  const Matrix p = third_cumulant_matrix({1, 1}, 1, 0);
  CHECK(p(0, 0) == Approx(-2.0).epsilon(1e-12));
  CHECK(p(0, 1) == Approx(0.4041138063).epsilon(1e-10));
  CHECK(p(1, 0) == Approx(0.4041138063).epsilon(1e-10));
  CHECK(p(1, 1) == Approx(0.4041138063).epsilon(1e-10));
  CHECK_THROWS_AS(third_cumulant_matrix({1, 1}, 1, 2), DimensionError);

  // Exchangeable alpha: P_1 and P_2 agree after swapping indices 1 and 2.
  const ParamVector sym{0.25, 0.25, 0.25};
  Eigen::PermutationMatrix<3> swap;
  swap.indices() << 1, 0, 2;
  const Matrix p0 = third_cumulant_matrix(sym, 10, 0);
  const Matrix p1 = third_cumulant_matrix(sym, 10, 1);
  CHECK(max_abs(swap * p0 * swap.transpose() - p1) == 0.0);
}

TEST_CASE("q_matrix is identically zero") {
  CHECK(q_matrix({1, 1}, 1, 0).isZero(0.0));
  CHECK(q_matrix({0.25, 0.25, 0.25}, 10, 1).isZero(0.0));
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const auto alpha = random_alpha(rng, 4, 1e-3, 1e3);
    CHECK(q_matrix(alpha, 1 + k, static_cast<std::size_t>(k % 4)).isZero(0.0));
  }
  CHECK_THROWS_AS(q_matrix({1, 1}, 1, 5), DimensionError);
}

TEST_CASE("mean_br_adjustment examples") {
  // mpmath straight-line evaluation (tests/oracles/model_oracle.py).
  const Vector a = mean_br_adjustment({1, 1}, 1);
  CHECK(a[0] == Approx(-0.91996762455558687242).epsilon(1e-12));
  CHECK(a[1] == Approx(-0.91996762455558687242).epsilon(1e-12));

  const Vector sym = mean_br_adjustment({0.25, 0.25, 0.25}, 10);
  CHECK(sym[0] == Approx(-3.9276678462885473302).epsilon(1e-12));
  CHECK(sym[1] == sym[0]);
  CHECK(sym[2] == sym[0]);
}

TEST_CASE("median_br_adjustment examples") {
  const Vector a = median_br_adjustment({1, 1}, 1);
  CHECK(a[0] == Approx(-0.48614722858423662499).epsilon(1e-12));
  CHECK(a[1] == Approx(-0.48614722858423662499).epsilon(1e-12));

  const Vector sym = median_br_adjustment({0.25, 0.25, 0.25}, 10);
  CHECK(sym[0] == Approx(-1.9139146580183777069).epsilon(1e-12));
  CHECK(sym[1] == Approx(sym[0]).epsilon(1e-14));
  CHECK(sym[2] == Approx(sym[0]).epsilon(1e-14));

  const Vector s3 = median_br_adjustment({12, 6, 2}, 1);
  CHECK(s3[0] == Approx(-0.055887763924414853011).epsilon(1e-10));
  CHECK(s3[1] == Approx(-0.07088196658546704862).epsilon(1e-10));
  CHECK(s3[2] == Approx(-0.14983368306822231733).epsilon(1e-10));
  const Vector s2 = median_br_adjustment({0.6, 0.3, 0.1}, 1);
  CHECK(s2[0] == Approx(-0.90491632429381812597).epsilon(1e-11));
  CHECK(s2[1] == Approx(-1.5611886226422786394).epsilon(1e-11));
  CHECK(s2[2] == Approx(-3.8486434418772044311).epsilon(1e-11));
}

TEST_CASE("median adjustment does not depend on n") {
  // Characterisation: i scales with n, h_r with 1/n, so A~ is n-free.
  for (const ParamVector& alpha :
       {ParamVector{12, 6, 2}, ParamVector{0.6, 0.3, 0.1}, ParamVector{0.25, 0.25, 0.25}}) {
    const Vector base = median_br_adjustment(alpha, 1);
    for (std::size_t n : {10u, 100u}) {
      CHECK((median_br_adjustment(alpha, n) - base).cwiseAbs().maxCoeff() <=
            1e-12 * base.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("wald_interval") {
  const ParamVector alpha{3.0, 20.0, 21.0};
  const auto w95 = wald_interval(alpha, 23, 0.95);
  const auto w99 = wald_interval(alpha, 23, 0.99);
  const Matrix inv = expected_info(alpha, 23).inverse();
  for (int r = 0; r < 3; ++r) {
    CHECK(w95.se[r] == Approx(std::sqrt(inv(r, r))).epsilon(1e-14));
    CHECK((w95.upper[r] - w95.lower[r]) / (w99.upper[r] - w99.lower[r]) ==
          Approx(1.959963984540054 / 2.5758293035489004).epsilon(1e-12));
    CHECK(w95.upper[r] - alpha[static_cast<std::size_t>(r)] ==
          Approx(alpha[static_cast<std::size_t>(r)] - w95.lower[r]).epsilon(1e-14));
  }
  const auto sym = wald_interval({2.5, 2.5, 2.5}, 10, 0.95);
  CHECK(sym.se[0] == Approx(sym.se[1]).epsilon(1e-15));
  CHECK(sym.se[1] == Approx(sym.se[2]).epsilon(1e-15));
  CHECK(normal_critical_value(0.95) == Approx(1.959963984540054).epsilon(1e-14));
  CHECK_THROWS_AS(wald_interval(alpha, 23, 1.0), DomainError);
  CHECK_THROWS_AS(wald_interval(alpha, 23, 0.0), DomainError);
}

TEST_CASE("analytic derivatives against finite differences") {
  std::mt19937_64 rng(2024);
  for (int m : {2, 3, 5}) {
    for (int trial = 0; trial < 20; ++trial) {
      const ParamVector alpha = random_alpha(rng, m, 0.05, 50);
      const int n = 1 + trial % 25;
      const auto stats = suff_stats(random_dataset(rng, random_alpha(rng, m, 0.3, 10), n));
      CAPTURE(alpha.values().transpose());
      CAPTURE(n);

      const Vector u = score(alpha, stats);
      const Matrix info = expected_info(alpha, stats.n).matrix();
      const Vector astar = mean_br_adjustment(alpha, stats.n);
      for (int r = 0; r < m; ++r) {
        const double h = 1e-5 * alpha[static_cast<std::size_t>(r)];
        const ParamVector up = bumped(alpha, r, h), down = bumped(alpha, r, -h);

        // score = gradient of the kernel
        CHECK(std::abs((loglik_kernel(up, stats) - loglik_kernel(down, stats)) / (2 * h) - u[r]) <= 1e-5);

        // P_r = d i / d alpha_r
        const Matrix fd = (expected_info(up, stats.n).matrix() - expected_info(down, stats.n).matrix()) / (2 * h);
        const Matrix p = third_cumulant_matrix(alpha, stats.n, static_cast<std::size_t>(r));
        CHECK(max_abs(fd - p) <= 1e-4 * max_abs(p));

        // A* = grad log det i / 2
        const double logdet_up = std::log(expected_info(up, stats.n).matrix().determinant());
        const double logdet_down = std::log(expected_info(down, stats.n).matrix().determinant());
        CHECK(std::abs(0.25 * (logdet_up - logdet_down) / h - astar[r]) <= 1e-5);
      }

      // i = -Hessian of the kernel (second differences of the kernel itself)
      Matrix hess(m, m);
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          const double ha = 1e-3 * alpha[static_cast<std::size_t>(a)];
          const double hb = 1e-3 * alpha[static_cast<std::size_t>(b)];
          const auto f = [&](double da, double db) {
            Vector v = alpha.values();
            v[a] += da;
            v[b] += db;
            return loglik_kernel(ParamVector(v), stats);
          };
          hess(a, b) = (f(ha, hb) - f(ha, -hb) - f(-ha, hb) + f(-ha, -hb)) / (4 * ha * hb);
        }
      }
      CHECK(max_abs(-hess - info) <= 1e-4 * max_abs(info));
    }
  }
}

TEST_CASE("closed-form information inverse") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + trial % 5;
    const ParamVector alpha = random_alpha(rng, m, 1e-3, 1e4);
    const InfoMatrix info = expected_info(alpha, 1 + trial % 40);
    const Matrix residual = info.matrix() * info.inverse() - Matrix::Identity(m, m);
    CAPTURE(alpha.values().transpose());
    CHECK(residual.cwiseAbs().rowwise().sum().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("likelihood quantities ignore row order") {
  std::mt19937_64 rng(3);
  const ParamVector truth{0.6, 0.3, 0.1};
  const Dataset data = random_dataset(rng, truth, 15);
  Matrix shuffled = data.values();
  for (int i = shuffled.rows() - 1; i > 0; --i) {
    shuffled.row(i).swap(shuffled.row(static_cast<int>(rng() % static_cast<unsigned>(i + 1))));
  }
  const auto a = suff_stats(data);
  const auto b = suff_stats(Dataset(shuffled));
  const ParamVector alpha{0.8, 0.5, 0.2};
  CHECK(loglik_kernel(alpha, a) == Approx(loglik_kernel(alpha, b)).epsilon(1e-14));
  CHECK((score(alpha, a) - score(alpha, b)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(max_abs(expected_info(alpha, a.n).matrix() - expected_info(alpha, b.n).matrix()) == 0.0);
}

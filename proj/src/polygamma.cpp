#include "dirbr/polygamma.hpp"

#include <array>
#include <cmath>
#include <string>

#include "dirbr/errors.hpp"

namespace dirbr {
namespace {

// Arguments are shifted upward by recurrence until they reach this value,
// then the asymptotic series is summed.
constexpr double kAsymptoticThreshold = 8.0;

// B_2, B_4, ..., B_14.
constexpr std::array<double, 7> kBernoulli = {
    1.0 / 6.0,  -1.0 / 30.0,     1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0,
};

void check_domain(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(name) + ": argument must be positive and finite, got " +
                      std::to_string(x));
  }
}

double digamma_asymptotic(double x) {
  const double inv2 = 1.0 / (x * x);
  double power = inv2;
  double series = 0.0;
  for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
    series += kBernoulli[k - 1] / (2.0 * static_cast<double>(k)) * power;
    power *= inv2;
  }
  return std::log(x) - 0.5 / x - series;
}

double trigamma_asymptotic(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double power = inv2 * inv;  // x^-(2k+1)
  double series = 0.0;
  for (double b : kBernoulli) {
    series += b * power;
    power *= inv2;
  }
  return inv + 0.5 * inv2 + series;
}

double tetragamma_asymptotic(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double power = inv2 * inv2;  // x^-(2k+2)
  double series = 0.0;
  for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
    series += (2.0 * static_cast<double>(k) + 1.0) * kBernoulli[k - 1] * power;
    power *= inv2;
  }
  return -inv2 - inv2 * inv - series;
}

}  // namespace

double log_gamma(double x) {
  check_domain(x, "log_gamma");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // reentrant; std::lgamma writes the global signgam
#else
  return std::lgamma(x);
#endif
}

double digamma(double x) {
  check_domain(x, "digamma");
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  return digamma_asymptotic(x) + shift;
}

double trigamma(double x) {
  check_domain(x, "trigamma");
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  return trigamma_asymptotic(x) + shift;
}

double tetragamma(double x) {
  check_domain(x, "tetragamma");
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift -= 2.0 / (x * x * x);
    x += 1.0;
  }
  return tetragamma_asymptotic(x) + shift;
}

}  // namespace dirbr

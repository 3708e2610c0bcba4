#include "dirbr/sampling.hpp"

#include <cmath>
#include <fmt/format.h>

#include "dirbr/errors.hpp"

namespace dirbr {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t label_key(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed) {
  // Expand the 64-bit seed into a full seed sequence so nearby seeds give
  // unrelated engine states.
  std::uint64_t s = seed;
  std::uint32_t words[8];
  for (auto& w : words) {
    s = mix64(s);
    w = static_cast<std::uint32_t>(s >> 32);
  }
  std::seed_seq seq(std::begin(words), std::end(words));
  engine_.seed(seq);
}

RngStream RngStream::derive(std::uint64_t master_seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t state = mix64(master_seed);
  for (std::uint64_t k : keys) state = mix64(state ^ mix64(k));
  return RngStream(state);
}

double RngStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, r2;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    r2 = u * u + v * v;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_normal_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

namespace {

double gamma_shape_ge_one(RngStream& stream, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = stream.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double gamma_draw(RngStream& stream, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError(fmt::format("gamma shape must be positive and finite, got {}", shape));
  }
  if (shape >= 1.0) return gamma_shape_ge_one(stream, shape);
  const double boosted = gamma_shape_ge_one(stream, shape + 1.0);
  return boosted * std::exp(std::log(stream.uniform()) / shape);
}

SimplexSample dirichlet_draw(RngStream& stream, const ParamVector& alpha) {
  const auto m = static_cast<Eigen::Index>(alpha.size());
  SimplexSample y(m);
  for (int attempt = 0; attempt < kMaxDirichletRetries; ++attempt) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      y[j] = gamma_draw(stream, alpha.values()[j]);
      total += y[j];
    }
    if (!(total > 0.0) || !std::isfinite(total)) continue;
    y /= total;
    if (y.minCoeff() > 0.0 && y.maxCoeff() < 1.0) return y;
  }
  throw NumericalBreakdown(
      fmt::format("Dirichlet draw failed {} times (components underflow)", kMaxDirichletRetries));
}

Dataset draw_dataset(RngStream& stream, const ParamVector& alpha, std::size_t n) {
  Matrix y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(alpha.size()));
  for (Eigen::Index i = 0; i < y.rows(); ++i) y.row(i) = dirichlet_draw(stream, alpha).transpose();
  return Dataset(std::move(y));
}

}  // namespace dirbr

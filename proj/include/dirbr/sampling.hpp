#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include "dirbr/model.hpp"

namespace dirbr {

/// Value-owned random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; uniforms, normals and gammas are
/// produced by code in this library so draws agree across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Stream keyed by a master seed and a tuple of integer keys (setting,
  /// sample size, replication index, ...). Keys are mixed with SplitMix64,
  /// so each key tuple gets its own stream regardless of execution order.
  static RngStream derive(std::uint64_t master_seed, std::initializer_list<std::uint64_t> keys);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);
/// FNV-1a hash of a label, for use as a stream key.
std::uint64_t label_key(std::string_view label);

/// Gamma(shape, 1) variate. Marsaglia-Tsang squeeze for shape >= 1; for
/// shape < 1 a Gamma(shape + 1) draw is scaled by U^(1/shape).
/// Throws DomainError for shape <= 0.
double gamma_draw(RngStream& stream, double shape);

/// Point of the open simplex with sum 1 within 1e-12.
using SimplexSample = Vector;

/// Dir(alpha) variate from normalised independent gammas. Draws in which a
/// component underflows to 0 (or rounds to 1) are redrawn up to
/// kMaxDirichletRetries times before a NumericalBreakdown is thrown.
SimplexSample dirichlet_draw(RngStream& stream, const ParamVector& alpha);

inline constexpr int kMaxDirichletRetries = 100;

/// n independent Dir(alpha) rows.
Dataset draw_dataset(RngStream& stream, const ParamVector& alpha, std::size_t n);

}  // namespace dirbr

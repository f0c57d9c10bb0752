#pragma once

#include <cstdint>
#include <random>

namespace stale {

/// Mixes a master seed and a stream index into an independent engine seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Seeded random source with platform-independent variates.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The variate transforms are implemented here because the
/// standard library distributions are not reproducible across vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);
  bool bernoulli(double p);
  double standard_normal();
  /// Gamma(shape k, scale theta) with mean k * theta.
  double gamma(double shape, double scale);

 private:
  std::mt19937_64 engine_;
};

}  // namespace stale

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tiprdc/common.hpp"

namespace tiprdc {

/// Seeded random stream. The engine is std::mt19937_64 (bit-reproducible by
/// the standard); the distributions are computed explicitly so that sampled
/// values do not depend on the standard library implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller. Each call consumes two uniforms.
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Zero-mean Laplace draw with the given scale (inverse CDF method).
  double laplace(double scale) {
    double u = uniform() - 0.5;
    double sign = u < 0.0 ? -1.0 : 1.0;
    // 1 - 2|u| is in (0, 1]; log1p keeps the tail accurate.
    return -scale * sign * std::log1p(-2.0 * std::abs(u));
  }

  /// Uniform integer in [0, n); rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ContractError("RngStream::below: n must be positive");
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  /// Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<Index> permutation(Index n) {
    std::vector<Index> p(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    for (Index i = n - 1; i > 0; --i) {
      auto j = static_cast<Index>(below(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    return p;
  }

  /// Fixed-point-free permutation, sampled by rejection. Requires n >= 2.
  std::vector<Index> derangement(Index n) {
    if (n < 2) throw DataError("derangement: need at least 2 rows, got " + std::to_string(n));
    for (;;) {
      auto p = permutation(n);
      bool ok = true;
      for (Index i = 0; i < n; ++i) {
        if (p[static_cast<std::size_t>(i)] == i) {
          ok = false;
          break;
        }
      }
      if (ok) return p;
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Fans one root seed out into independent named streams, so adding a
/// consumer never perturbs the draws seen by existing ones.
class RngPool {
 public:
  explicit RngPool(std::uint64_t root_seed) : root_(root_seed) {}

  std::uint64_t root() const { return root_; }

  std::uint64_t derive(std::string_view name) const {
    return mix64(root_ ^ fnv1a64(name));
  }

  std::uint64_t derive(std::string_view name, std::uint64_t arg) const {
    return mix64(derive(name) ^ mix64(arg));
  }

  RngStream stream(std::string_view name) const { return RngStream(derive(name)); }

  RngStream stream(std::string_view name, std::uint64_t arg) const {
    return RngStream(derive(name, arg));
  }

 private:
  std::uint64_t root_;
};

}  // namespace tiprdc

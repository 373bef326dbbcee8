#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "padicprop/rational.hpp"

namespace padicprop {

/// Deterministic rational generator. Draws come straight from the raw
/// mt19937_64 stream (no std distributions), so a seed reproduces the same
/// cases on every platform.
class RationalSampler {
 public:
  explicit RationalSampler(std::uint64_t seed) : engine_(seed) {}

  /// Derives an independent stream per (seed, label, prime).
  RationalSampler(std::uint64_t seed, std::string_view label, std::int64_t prime) : engine_(mix(seed, label, prime)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform-ish integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

  bool coin() { return (next() & 1U) != 0; }

  /// A p-adic unit n/d with 1 <= |n|, d <= bound, neither divisible by p.
  Rational unit(std::int64_t p, std::int64_t bound = 50) {
    std::int64_t n = 0, d = 0;
    do n = uniform(1, bound); while (n % p == 0);
    do d = uniform(1, bound); while (d % p == 0);
    return Rational(coin() ? -n : n, d);
  }

  /// u * p^v with v uniform in [v_lo, v_hi] and u a random unit.
  Rational with_valuation(std::int64_t p, std::int64_t v_lo, std::int64_t v_hi) {
    const std::int64_t v = uniform(v_lo, v_hi);
    return unit(p) * rational_pow(p, v);
  }

  /// Nonzero rational whose numerator and denominator are arbitrary.
  Rational any_nonzero(std::int64_t bound = 60) {
    const std::int64_t n = uniform(1, bound);
    const std::int64_t d = uniform(1, bound);
    return Rational(coin() ? -n : n, d);
  }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::string_view label, std::int64_t prime) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    return seed ^ (h + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(prime));
  }

  std::mt19937_64 engine_;
};

}  // namespace padicprop

#pragma once

/**
 * @file padic.hpp
 * @brief p-adic quantities of exact rationals.
 *
 * Every quantity here is computed from the fraction itself, never from a
 * truncated digit expansion: the valuation counts factors of p in the
 * numerator and denominator, the fractional part {a}_p is the unique
 * representative in [0, 1) with a p-power denominator such that a - {a}_p
 * is a p-adic integer, and the digits exist for display and cross-checks.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "padicprop/error.hpp"
#include "padicprop/rational.hpp"

namespace padicprop {

/// Valuation of a rational; std::nullopt stands for +infinity (the value 0).
using Valuation = std::optional<std::int64_t>;

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::int64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

/// Test-only fault switches. Both are off in normal use; the verification
/// suites flip them to show their checks are not vacuous.
struct FaultInjection {
  int lambda_eighths = 0;              // added to the phase of lambda_p(a), a != 0
  bool drop_linear_action_terms = false;  // zero b1 and c of every ActionForm
};

/// Shared configuration for all p-dependent operations.
struct PrimeContext {
  std::int64_t prime = 2;
  int digit_precision = 32;
  int max_ball_exponent = 12;
  int series_order = 24;
  FaultInjection faults{};

  PrimeContext() = default;
  explicit PrimeContext(std::int64_t p, int digits = 32, int ball_max = 12, int order = 24)
      : prime(p), digit_precision(digits), max_ball_exponent(ball_max), series_order(order) {
    if (!is_prime(p)) throw Error(ErrorCode::not_prime, "prime: " + std::to_string(p) + " is not prime");
    if (digits <= 0) throw Error(ErrorCode::parse_error, "digit_precision must be positive");
    if (ball_max < 0) throw Error(ErrorCode::parse_error, "max_ball_exponent must be non-negative");
    if (order < 2) throw Error(ErrorCode::parse_error, "series_order must be at least 2");
  }
};

inline Valuation valuation(const Rational& a, std::int64_t p) {
  if (a == 0) return std::nullopt;
  Integer num = numerator_of(a);
  Integer den = denominator_of(a);
  return remove_factor(num, p) - remove_factor(den, p);
}

inline Valuation valuation(const Rational& a, const PrimeContext& ctx) { return valuation(a, ctx.prime); }

/// True when valuation(a) >= k (always true for a = 0).
inline bool valuation_at_least(const Rational& a, std::int64_t k, std::int64_t p) {
  const auto v = valuation(a, p);
  return !v || *v >= k;
}

/// |a|_p = p^{-valuation(a)}, and 0 for a = 0.
inline Rational norm_p(const Rational& a, const PrimeContext& ctx) {
  const auto v = valuation(a, ctx);
  if (!v) return Rational(0);
  return rational_pow(ctx.prime, -*v);
}

/// Splits a nonzero a as p^v * u with u a p-adic unit and returns u.
inline Rational unit_part(const Rational& a, std::int64_t p) {
  Integer num = numerator_of(a);
  Integer den = denominator_of(a);
  remove_factor(num, p);
  remove_factor(den, p);
  return Rational(num, den);
}

/// The residue u mod p^k in [0, p^k) of a p-adic unit u = n/d.
inline Integer unit_residue(const Rational& unit, std::int64_t p, unsigned k) {
  const Integer modulus = int_pow(p, k);
  const Integer inv = mod_inverse(mod_floor(denominator_of(unit), modulus), modulus);
  return mod_floor(numerator_of(unit) * inv, modulus);
}

/// {a}_p: for a = n / (p^k d) with gcd(d, p) = 1 and k > 0, this is
/// (n d^{-1} mod p^k) / p^k; zero when a is a p-adic integer.
inline Rational frac_part(const Rational& a, std::int64_t p) {
  if (a == 0) return Rational(0);
  Integer den = denominator_of(a);
  const auto k = remove_factor(den, p);
  if (k == 0) return Rational(0);
  const Integer pk = int_pow(p, static_cast<unsigned>(k));
  const Integer residue = mod_floor(numerator_of(a) * mod_inverse(mod_floor(den, pk), pk), pk);
  return Rational(residue, pk);
}

inline Rational frac_part(const Rational& a, const PrimeContext& ctx) { return frac_part(a, ctx.prime); }

struct PadicDigits {
  std::int64_t prime = 2;
  Valuation valuation;  // nullopt for zero
  std::vector<int> digits;
  int precision = 0;

  /// p^nu * sum_i digits[i] p^i.
  Rational reconstruct() const {
    if (!valuation) return Rational(0);
    Integer sum = 0;
    Integer power = 1;
    for (int d : digits) {
      sum += power * d;
      power *= prime;
    }
    return Rational(sum) * rational_pow(prime, *valuation);
  }
};

inline PadicDigits expand_digits(const Rational& a, const PrimeContext& ctx) {
  PadicDigits out;
  out.prime = ctx.prime;
  out.precision = ctx.digit_precision;
  out.valuation = valuation(a, ctx);
  if (!out.valuation) {
    out.digits.assign(static_cast<std::size_t>(ctx.digit_precision), 0);
    return out;
  }
  const Integer p(ctx.prime);
  Rational u = unit_part(a, ctx.prime);
  out.digits.reserve(static_cast<std::size_t>(ctx.digit_precision));
  for (int i = 0; i < ctx.digit_precision; ++i) {
    const Integer digit = unit_residue(u, ctx.prime, 1);
    out.digits.push_back(digit.convert_to<int>());
    u = (u - Rational(digit)) / Rational(p);
  }
  return out;
}

/// "nu: x0 x1 x2 ..." ("inf: 0 0 ..." for zero).
inline std::string to_string(const PadicDigits& d) {
  std::string s = d.valuation ? std::to_string(*d.valuation) : std::string("inf");
  s += ":";
  for (int digit : d.digits) s += " " + std::to_string(digit);
  return s;
}

inline void check_ball_exponent(std::int64_t n, const PrimeContext& ctx, const char* what) {
  if (n > ctx.max_ball_exponent || n < -ctx.max_ball_exponent) {
    throw Error(ErrorCode::ball_exponent_out_of_range,
                std::string(what) + " = " + std::to_string(n) + " exceeds max_ball_exponent " +
                    std::to_string(ctx.max_ball_exponent));
  }
}

/// Integral of chi_p(beta x) over |x|_p <= p^N: the ball's measure p^N when
/// beta x stays in Z_p on the whole ball (valuation(beta) >= N), else 0.
inline Rational char_integral_ball(const Rational& beta, std::int64_t N, const PrimeContext& ctx) {
  check_ball_exponent(N, ctx, "ball exponent");
  if (valuation_at_least(beta, N, ctx.prime)) return rational_pow(ctx.prime, N);
  return Rational(0);
}

}  // namespace padicprop

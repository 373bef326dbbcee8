#pragma once

#include <optional>

#include "padicprop/error.hpp"
#include "padicprop/exact_complex.hpp"
#include "padicprop/padic.hpp"

namespace padicprop {

/// chi_p(a) = exp(2 pi i {a}_p), kept as its exact phase.
inline PhaseFraction chi_p(const Rational& a, const PrimeContext& ctx) {
  return PhaseFraction(frac_part(a, ctx));
}

namespace detail {

inline int legendre_symbol(const Integer& residue, std::int64_t p) {
  const Integer r = boost::multiprecision::powm(residue, Integer((p - 1) / 2), Integer(p));
  return r == 1 ? 1 : -1;
}

}  // namespace detail

/// Phase of lambda_p(a) in eighths of a turn.
///
/// Write a = p^v u with u a unit. For odd p the value is 1 when v is even;
/// for odd v it is the Legendre symbol (u mod p | p), times i when
/// p = 3 mod 4. For p = 2 it is e^{+-i pi/4} by u mod 4 when v is even and
/// e^{2 pi i (u mod 8)/8} when v is odd.
inline int lambda_eighths(const Rational& a, const PrimeContext& ctx) {
  if (a == 0) return 0;
  const std::int64_t p = ctx.prime;
  const std::int64_t v = *valuation(a, p);
  const Rational u = unit_part(a, p);
  int eighths = 0;
  if (p == 2) {
    const int u8 = unit_residue(u, 2, 3).convert_to<int>();
    if (v % 2 == 0) {
      eighths = (u8 % 4 == 1) ? 1 : 7;
    } else {
      eighths = u8;
    }
  } else if (v % 2 != 0) {
    const int legendre = detail::legendre_symbol(unit_residue(u, p, 1), p);
    eighths = legendre == 1 ? 0 : 4;
    if (p % 4 == 3) eighths += 2;
  }
  return ((eighths + ctx.faults.lambda_eighths) % 8 + 8) % 8;
}

inline ExactComplex lambda_p(const Rational& a, const PrimeContext& ctx) {
  return ExactComplex::unit(ctx.prime, PhaseFraction::eighths(lambda_eighths(a, ctx)));
}

/// Closed form of the integral of chi_p(alpha x^2 + beta x) over Q_p:
/// lambda_p(alpha) |2 alpha|_p^{-1/2} chi_p(-beta^2 / (4 alpha)).
inline ExactComplex gauss_integral(const Rational& alpha, const Rational& beta, const PrimeContext& ctx) {
  if (alpha == 0) {
    throw Error(ErrorCode::degenerate_alpha, "gauss_integral requires alpha != 0; use char_integral_ball");
  }
  // |2 alpha|^{-1/2} = p^{valuation(2 alpha) / 2}
  const auto v = *valuation(2 * alpha, ctx);
  const ExactComplex magnitude(ctx.prime, Rational(1), v);
  const PhaseFraction shift = chi_p(-beta * beta / (4 * alpha), ctx);
  return lambda_p(alpha, ctx) * magnitude * ExactComplex::unit(ctx.prime, shift);
}

/// Integral of chi_p(alpha x^2 + beta x) over the ball |x - center|_p <= p^N,
/// when it has an exact single-term value.
///
/// After shifting to the center the integrand is chi_p(alpha v^2 + b v) times
/// a constant phase. Three regimes are exact:
///   - alpha v^2 is integral on the whole ball: a linear character integral;
///   - the ball holds the critical point -b / (2 alpha): the full Gauss
///     integral, except for p = 2 with valuation(alpha) = 2N - 1 where the
///     ball integral vanishes;
///   - the critical point lies far enough outside that every sub-cell
///     integral of radius p^{-ceil(-v(alpha)/2)} cancels: zero.
/// Returns std::nullopt in the remaining transitional band.
inline std::optional<ExactComplex> ball_gauss_integral(const Rational& alpha, const Rational& beta,
                                                       const Rational& center, std::int64_t N,
                                                       const PrimeContext& ctx) {
  check_ball_exponent(N, ctx, "ball exponent");
  const std::int64_t p = ctx.prime;
  const Rational b = 2 * alpha * center + beta;
  const ExactComplex shift = ExactComplex::unit(p, chi_p(alpha * center * center + beta * center, ctx));

  if (valuation_at_least(alpha, 2 * N, p)) {
    if (valuation_at_least(b, N, p)) return shift * ExactComplex(p, rational_pow(p, N));
    return ExactComplex::zero(p);
  }

  const std::int64_t va = *valuation(alpha, p);
  const Rational critical = -b / (2 * alpha);
  if (valuation_at_least(critical, -N, p)) {
    if (p == 2 && va == 2 * N - 1) return ExactComplex::zero(p);
    return shift * gauss_integral(alpha, b, ctx);
  }

  // Critical point at distance p^k > p^N from every point of the ball.
  const std::int64_t k = -*valuation(critical, p);
  const std::int64_t cell = ceil_div(-va, 2);
  if (*valuation(2 * alpha, p) - k < -cell) return ExactComplex::zero(p);
  return std::nullopt;
}

}  // namespace padicprop

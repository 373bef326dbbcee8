#pragma once

/**
 * @file oracle.hpp
 * @brief Brute-force ball integrals of chi_p(alpha x^2 + beta x).
 *
 * The ball |x - c|_p <= p^N is cut into p^{N+M} cells x0 + p^M Z_p. Once
 * alpha p^{2M} is integral the quadratic part is invisible inside a cell and
 * the cell integral is chi_p(f(x0)) p^{-M} when f'(x0) p^M is integral, zero
 * otherwise (character orthogonality on Z_p). Nothing here uses lambda_p or
 * completing the square, so these sums check the closed forms independently.
 */

#include <cstdint>
#include <limits>
#include <optional>

#include "padicprop/characters.hpp"
#include "padicprop/error.hpp"
#include "padicprop/exact_complex.hpp"
#include "padicprop/padic.hpp"

namespace padicprop {

inline constexpr std::uint64_t kDefaultCellBudget = 10'000'000;

struct OracleResult {
  ApproxComplex value;
  std::int64_t ball_exponent = 0;   // N
  std::int64_t cell_exponent = 0;   // M
  std::uint64_t cells = 0;
  std::int64_t stabilization_bound = 0;
  bool stabilized = true;           // N >= stabilization_bound
};

namespace detail {

constexpr std::uint64_t kModulusLimit = std::uint64_t{1} << 62;

/// {q}_p as residue / p^exponent, when p^exponent fits the fast path.
struct FracResidue {
  std::uint64_t residue = 0;
  std::int64_t exponent = 0;
};

inline std::optional<FracResidue> frac_residue(const Rational& q, std::int64_t p) {
  const Rational f = frac_part(q, p);
  const Integer den = denominator_of(f);
  if (den >= Integer(kModulusLimit)) return std::nullopt;
  FracResidue out;
  out.residue = numerator_of(f).convert_to<std::uint64_t>();
  Integer d = den;
  out.exponent = remove_factor(d, p);
  return out;
}

inline std::uint64_t ipow(std::int64_t p, std::int64_t e) {
  std::uint64_t r = 1;
  for (std::int64_t i = 0; i < e; ++i) r *= static_cast<std::uint64_t>(p);
  return r;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

/// Neumaier-compensated complex accumulator; summation order is the cell
/// index order, so results are bit-reproducible.
class ComplexSum {
 public:
  void add(const ApproxComplex& z) {
    add_one(re_, re_c_, z.real());
    add_one(im_, im_c_, z.imag());
  }
  ApproxComplex value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_one(long double& sum, long double& comp, long double x) {
    const long double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  long double re_ = 0, im_ = 0, re_c_ = 0, im_c_ = 0;
};

}  // namespace detail

/// Coset sum for the integral of chi_p(alpha x^2 + beta x) over
/// |x - center|_p <= p^N, with cells of radius p^{-M}.
inline ApproxComplex ball_coset_sum(const Rational& alpha, const Rational& beta, const Rational& center,
                                    std::int64_t N, std::int64_t M, const PrimeContext& ctx,
                                    std::uint64_t cell_budget = kDefaultCellBudget) {
  const std::int64_t p = ctx.prime;
  if (N + M < 0) throw Error(ErrorCode::ball_exponent_out_of_range, "cells larger than the ball (N + M < 0)");
  if (alpha != 0 && *valuation(alpha, p) + 2 * M < 0) {
    throw Error(ErrorCode::ball_exponent_out_of_range, "cell exponent M below the quadratic conductor");
  }
  long double cells_ld = std::pow(static_cast<long double>(p), static_cast<long double>(N + M));
  if (cells_ld > static_cast<long double>(cell_budget)) {
    throw Error(ErrorCode::cell_budget_exceeded, "coset sum would need " + std::to_string(cells_ld) + " cells");
  }
  const std::uint64_t cells = detail::ipow(p, N + M);

  const Rational b = 2 * alpha * center + beta;
  const PhaseFraction shift = chi_p(alpha * center * center + beta * center, ctx);

  // f(k p^{-N}) = qa k^2 + qb k, and f'(k p^{-N}) p^M = qc k + qd.
  const Rational qa = alpha * rational_pow(p, -2 * N);
  const Rational qb = b * rational_pow(p, -N);
  const Rational qc = 2 * alpha * rational_pow(p, M - N);
  const Rational qd = b * rational_pow(p, M);

  detail::ComplexSum sum;
  const auto ra = detail::frac_residue(qa, p);
  const auto rb = detail::frac_residue(qb, p);
  const auto rc = detail::frac_residue(qc, p);
  const auto rd = detail::frac_residue(qd, p);
  const bool fast = ra && rb && rc && rd && std::max(ra->exponent, rb->exponent) <= 62 &&
                    detail::ipow(p, std::max(ra->exponent, rb->exponent)) < detail::kModulusLimit &&
                    detail::ipow(p, std::max(rc->exponent, rd->exponent)) < detail::kModulusLimit;
  if (fast) {
    const std::int64_t e_phase = std::max(ra->exponent, rb->exponent);
    const std::uint64_t mod_phase = detail::ipow(p, e_phase);
    const std::uint64_t a_scaled = ra->residue * detail::ipow(p, e_phase - ra->exponent);
    const std::uint64_t b_scaled = rb->residue * detail::ipow(p, e_phase - rb->exponent);
    const std::int64_t e_deriv = std::max(rc->exponent, rd->exponent);
    const std::uint64_t mod_deriv = detail::ipow(p, e_deriv);
    const std::uint64_t c_scaled = rc->residue * detail::ipow(p, e_deriv - rc->exponent);
    const std::uint64_t d_scaled = rd->residue * detail::ipow(p, e_deriv - rd->exponent);
    const long double inv_mod = 1.0L / static_cast<long double>(mod_phase);
    for (std::uint64_t k = 0; k < cells; ++k) {
      if ((detail::mulmod(c_scaled, k, mod_deriv) + d_scaled) % mod_deriv != 0) continue;
      const std::uint64_t km = k % mod_phase;
      const std::uint64_t phase =
          (detail::mulmod(a_scaled, detail::mulmod(km, km, mod_phase), mod_phase) +
           detail::mulmod(b_scaled, km, mod_phase)) % mod_phase;
      sum.add(unit_root(static_cast<long double>(phase) * inv_mod));
    }
  } else {
    for (std::uint64_t k = 0; k < cells; ++k) {
      const Rational kk(static_cast<unsigned long long>(k));
      if (frac_part(qc * kk + qd, p) != 0) continue;
      sum.add(unit_root(to_long_double(frac_part(qa * kk * kk + qb * kk, p))));
    }
  }
  return sum.value() * to_long_double(rational_pow(p, -M)) * shift.approx();
}

/// Ball exponent beyond which the ball integral equals the integral over
/// Q_p: the ball must hold the critical point -beta/(2 alpha), and every
/// shell outside it must oscillate enough to cancel.
inline std::int64_t gauss_stabilization_bound(const Rational& alpha, const Rational& beta, const PrimeContext& ctx) {
  std::int64_t bound = ceil_div(*valuation(alpha, ctx), 2) + 1;
  if (beta != 0) bound = std::max(bound, -*valuation(beta / (2 * alpha), ctx));
  return bound;
}

/// Smallest admissible cell exponent for a ball of radius p^N.
inline std::int64_t minimal_cell_exponent(const Rational& alpha, std::int64_t N, const PrimeContext& ctx) {
  std::int64_t m = -N;
  if (alpha != 0) m = std::max(m, ceil_div(-*valuation(alpha, ctx), 2));
  return m;
}

/// Oracle for the integral of chi_p(alpha x^2 + beta x) over Q_p evaluated
/// on the ball |x| <= p^N with cells p^M Z_p.
inline OracleResult gauss_integral_oracle(const Rational& alpha, const Rational& beta, std::int64_t N, std::int64_t M,
                                          const PrimeContext& ctx) {
  if (alpha == 0) throw Error(ErrorCode::degenerate_alpha, "gauss_integral_oracle requires alpha != 0");
  check_ball_exponent(N, ctx, "ball exponent N");
  check_ball_exponent(M, ctx, "cell exponent M");
  OracleResult out;
  out.ball_exponent = N;
  out.cell_exponent = M;
  out.value = ball_coset_sum(alpha, beta, Rational(0), N, M, ctx);
  out.cells = detail::ipow(ctx.prime, N + M);
  out.stabilization_bound = gauss_stabilization_bound(alpha, beta, ctx);
  out.stabilized = N >= out.stabilization_bound;
  return out;
}

/// gauss_integral_oracle at the stabilization bound and the coarsest exact cells.
inline OracleResult gauss_integral_oracle(const Rational& alpha, const Rational& beta, const PrimeContext& ctx) {
  if (alpha == 0) throw Error(ErrorCode::degenerate_alpha, "gauss_integral_oracle requires alpha != 0");
  const std::int64_t N = gauss_stabilization_bound(alpha, beta, ctx);
  return gauss_integral_oracle(alpha, beta, N, minimal_cell_exponent(alpha, N, ctx), ctx);
}

/// Oracle for the integral over |x - center|_p <= p^N (coarsest exact cells).
inline ApproxComplex ball_gauss_oracle(const Rational& alpha, const Rational& beta, const Rational& center,
                                       std::int64_t N, const PrimeContext& ctx) {
  check_ball_exponent(N, ctx, "ball exponent");
  return ball_coset_sum(alpha, beta, center, N, minimal_cell_exponent(alpha, N, ctx), ctx);
}

struct LambdaOracleResult {
  int eighths = 0;
  long double deviation = 0;  // distance of the normalized sum from e^{2 pi i eighths/8}
};

/// Recovers lambda_p(a) from the Gauss-sum oracle: divides out the magnitude
/// |2a|_p^{-1/2} and snaps the remaining unit to the nearest eighth root.
inline LambdaOracleResult lambda_oracle(const Rational& a, const PrimeContext& ctx) {
  if (a == 0) return {};
  const OracleResult g = gauss_integral_oracle(a, Rational(0), ctx);
  const long double magnitude =
      std::pow(static_cast<long double>(ctx.prime), static_cast<long double>(*valuation(2 * a, ctx)) / 2.0L);
  const ApproxComplex unit = g.value / magnitude;
  long double turns = std::atan2(unit.imag(), unit.real()) / (2.0L * std::numbers::pi_v<long double>);
  int eighths = static_cast<int>(std::lround(turns * 8.0L));
  eighths = ((eighths % 8) + 8) % 8;
  return {eighths, std::abs(unit - unit_root(eighths / 8.0L))};
}

}  // namespace padicprop

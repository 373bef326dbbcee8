#pragma once

/**
 * @file exact_complex.hpp
 * @brief Exact unit phases and the scalar * p^{m/2} * e^{2 pi i r} value model.
 *
 * Every value the closed-form machinery produces (lambda_p, Gauss integrals,
 * propagators) is a nonnegative rational times a half-integer power of the
 * context prime times a rational phase, so products and equality are exact.
 */

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "padicprop/error.hpp"
#include "padicprop/padic.hpp"
#include "padicprop/rational.hpp"

namespace padicprop {

/// Oracle-side complex numbers (64-bit mantissa on x86-64).
using ApproxComplex = std::complex<long double>;

inline long double to_long_double(const Integer& n) {
  if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<long double>(n.convert_to<std::int64_t>());
  }
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, n.backend().data());
  return std::ldexp(static_cast<long double>(mantissa), static_cast<int>(exponent));
}

inline long double to_long_double(const Rational& q) {
  return to_long_double(numerator_of(q)) / to_long_double(denominator_of(q));
}

/// e^{2 pi i r} for a real turn count r.
inline ApproxComplex unit_root(long double turns) {
  const long double angle = 2.0L * std::numbers::pi_v<long double> * turns;
  return {std::cos(angle), std::sin(angle)};
}

/// "re + im·i" with 15 significant digits.
inline std::string to_string(const ApproxComplex& z) {
  std::ostringstream os;
  os.precision(15);
  os << static_cast<double>(z.real()) << (z.imag() < 0 ? " - " : " + ")
     << static_cast<double>(std::abs(z.imag())) << "·i";
  return os.str();
}

/// A rational number of turns reduced into [0, 1).
class PhaseFraction {
 public:
  PhaseFraction() = default;
  explicit PhaseFraction(const Rational& r) : r_(reduce(r)) {}

  static PhaseFraction eighths(std::int64_t k) { return PhaseFraction(Rational(k, 8)); }

  const Rational& turns() const { return r_; }
  bool is_zero() const { return r_ == 0; }

  PhaseFraction operator+(const PhaseFraction& o) const { return PhaseFraction(r_ + o.r_); }
  PhaseFraction operator-(const PhaseFraction& o) const { return PhaseFraction(r_ - o.r_); }
  PhaseFraction operator-() const { return PhaseFraction(-r_); }
  PhaseFraction& operator+=(const PhaseFraction& o) { return *this = *this + o; }

  bool operator==(const PhaseFraction& o) const { return r_ == o.r_; }
  bool operator!=(const PhaseFraction& o) const { return !(*this == o); }

  ApproxComplex approx() const { return unit_root(to_long_double(r_)); }

 private:
  static Rational reduce(const Rational& r) {
    const Integer num = numerator_of(r);
    const Integer den = denominator_of(r);
    return Rational(mod_floor(num, den), den);
  }

  Rational r_{0};
};

/// scalar * p^{half_power / 2} * e^{2 pi i phase}.
///
/// Canonical form: zero has scalar 0, half_power 0, phase 0; otherwise every
/// factor of p is moved out of the scalar into half_power, so two values are
/// equal exactly when their fields are equal.
class ExactComplex {
 public:
  ExactComplex() = default;

  ExactComplex(std::int64_t prime, Rational scalar, std::int64_t half_power = 0, PhaseFraction phase = {})
      : prime_(prime), scalar_(std::move(scalar)), half_power_(half_power), phase_(std::move(phase)) {
    if (scalar_ < 0) throw Error(ErrorCode::parse_error, "ExactComplex scalar must be nonnegative");
    canonicalize();
  }

  static ExactComplex one(std::int64_t prime) { return ExactComplex(prime, Rational(1)); }
  static ExactComplex zero(std::int64_t prime) { return ExactComplex(prime, Rational(0)); }
  static ExactComplex unit(std::int64_t prime, PhaseFraction phase) {
    return ExactComplex(prime, Rational(1), 0, std::move(phase));
  }

  std::int64_t prime() const { return prime_; }
  const Rational& scalar() const { return scalar_; }
  std::int64_t half_power() const { return half_power_; }
  const PhaseFraction& phase() const { return phase_; }
  bool is_zero() const { return scalar_ == 0; }

  ExactComplex operator*(const ExactComplex& o) const {
    if (o.prime_ != prime_) {
      throw Error(ErrorCode::prime_mismatch,
                  "cannot multiply values over p=" + std::to_string(prime_) + " and p=" + std::to_string(o.prime_));
    }
    return ExactComplex(prime_, scalar_ * o.scalar_, half_power_ + o.half_power_, phase_ + o.phase_);
  }
  ExactComplex& operator*=(const ExactComplex& o) { return *this = *this * o; }

  /// Division by a nonzero value.
  ExactComplex operator/(const ExactComplex& o) const {
    if (o.is_zero()) throw Error(ErrorCode::degenerate_alpha, "division by zero ExactComplex");
    return *this * ExactComplex(prime_, 1 / o.scalar_, -o.half_power_, -o.phase_);
  }

  ExactComplex conj() const { return ExactComplex(prime_, scalar_, half_power_, -phase_); }

  /// |z|^2 = scalar^2 p^{half_power}.
  Rational modulus_squared() const { return scalar_ * scalar_ * rational_pow(prime_, half_power_); }

  ApproxComplex approx() const {
    if (is_zero()) return {0.0L, 0.0L};
    const long double magnitude =
        to_long_double(scalar_) * std::pow(static_cast<long double>(prime_), half_power_ / 2.0L);
    return magnitude * phase_.approx();
  }

  bool operator==(const ExactComplex& o) const {
    return prime_ == o.prime_ && scalar_ == o.scalar_ && half_power_ == o.half_power_ && phase_ == o.phase_;
  }
  bool operator!=(const ExactComplex& o) const { return !(*this == o); }

 private:
  void canonicalize() {
    if (scalar_ == 0) {
      half_power_ = 0;
      phase_ = PhaseFraction();
      return;
    }
    const auto v = *valuation(scalar_, prime_);
    if (v != 0) {
      scalar_ *= rational_pow(prime_, -v);
      half_power_ += 2 * v;
    }
  }

  std::int64_t prime_ = 2;
  Rational scalar_{0};
  std::int64_t half_power_ = 0;
  PhaseFraction phase_{};
};

/// "scalar · p^(m/2) · e^(2πi·r)".
inline std::string to_string(const ExactComplex& z) {
  return to_string(z.scalar()) + " · " + std::to_string(z.prime()) + "^(" + std::to_string(z.half_power()) +
         "/2) · e^(2πi·" + to_string(z.phase().turns()) + ")";
}

inline nlohmann::json to_json(const ExactComplex& z) {
  return {{"scalar", to_string(z.scalar())},
          {"half_power", z.half_power()},
          {"phase_num", numerator_of(z.phase().turns()).str()},
          {"phase_den", denominator_of(z.phase().turns()).str()},
          {"prime", z.prime()}};
}

inline ExactComplex exact_complex_from_json(const nlohmann::json& j) {
  const Rational phase(Integer(j.at("phase_num").get<std::string>()), Integer(j.at("phase_den").get<std::string>()));
  return ExactComplex(j.at("prime").get<std::int64_t>(), parse_rational(j.at("scalar").get<std::string>()),
                      j.at("half_power").get<std::int64_t>(), PhaseFraction(phase));
}

}  // namespace padicprop

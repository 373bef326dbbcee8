#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "padicprop/error.hpp"

namespace padicprop {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;

inline Integer numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

inline Integer int_pow(std::int64_t base, unsigned exponent) {
  return boost::multiprecision::pow(Integer(base), exponent);
}

/// base^exponent for any integer exponent; base must be nonzero.
inline Rational rational_pow(std::int64_t base, std::int64_t exponent) {
  if (exponent >= 0) return Rational(int_pow(base, static_cast<unsigned>(exponent)));
  return Rational(Integer(1), int_pow(base, static_cast<unsigned>(-exponent)));
}

inline Rational rational_pow(const Rational& base, std::int64_t exponent) {
  Rational out{1};
  const Rational b = exponent >= 0 ? base : Rational(1 / base);
  for (std::int64_t i = 0; i < (exponent >= 0 ? exponent : -exponent); ++i) out *= b;
  return out;
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const std::int64_t q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

/// Strips every factor of p from n (n != 0); returns the count removed.
inline std::int64_t remove_factor(Integer& n, std::int64_t p) {
  Integer out;
  const Integer prime(p);
  const auto count = mpz_remove(out.backend().data(), n.backend().data(), prime.backend().data());
  n = std::move(out);
  return static_cast<std::int64_t>(count);
}

/// Inverse of a modulo m; a must be coprime to m.
inline Integer mod_inverse(const Integer& a, const Integer& m) {
  Integer out;
  if (mpz_invert(out.backend().data(), a.backend().data(), m.backend().data()) == 0) {
    throw Error(ErrorCode::parse_error, "no modular inverse");
  }
  return out;
}

/// Non-negative residue of a modulo m (m > 0).
inline Integer mod_floor(const Integer& a, const Integer& m) {
  Integer r = a % m;
  if (r < 0) r += m;
  return r;
}

/// Renders as "num/den", omitting the denominator when it is 1.
inline std::string to_string(const Rational& q) {
  const Integer den = denominator_of(q);
  if (den == 1) return numerator_of(q).str();
  return numerator_of(q).str() + "/" + den.str();
}

namespace detail {

inline std::optional<Integer> parse_integer(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size()) return std::nullopt;
  for (std::size_t i = pos; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') return std::nullopt;
  }
  Integer value(std::string(text.substr(pos)));
  return negative ? Integer(-value) : value;
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace detail

/// Parses "num/den" or "num". Accepts an ASCII '-' or U+2212 minus sign.
inline Rational parse_rational(std::string_view input) {
  std::string text = detail::trim(input);
  static constexpr std::string_view kUnicodeMinus = "\xE2\x88\x92";
  if (text.rfind(kUnicodeMinus, 0) == 0) text = "-" + text.substr(kUnicodeMinus.size());

  const auto slash = text.find('/');
  const auto num = detail::parse_integer(std::string_view(text).substr(0, slash));
  if (!num) throw Error(ErrorCode::parse_error, "malformed rational '" + std::string(input) + "'");
  if (slash == std::string::npos) return Rational(*num);

  const auto den = detail::parse_integer(std::string_view(text).substr(slash + 1));
  if (!den || *den == 0) {
    throw Error(ErrorCode::parse_error, "malformed rational '" + std::string(input) + "'");
  }
  return Rational(*num, *den);
}

}  // namespace padicprop

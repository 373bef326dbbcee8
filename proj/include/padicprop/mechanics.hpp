#pragma once

/**
 * @file mechanics.hpp
 * @brief Classical dynamics of time-independent quadratic Lagrangians over Q_p.
 *
 * L = A/2 q'^2 + B q' + C q' q + D + E q + F/2 q^2. With constant
 * coefficients the Euler-Lagrange equation is A q'' - F q = E. Three systems
 * are supported: free (E = F = 0), constant force (F = 0, E != 0) and the
 * oscillator (F != 0, E = 0). The oscillator basis is the truncated
 * cos/sin pair in powers of kappa t^2 with kappa = F/A, valid on the disc
 * valuation(kappa t^2) >= 2 (odd p) or >= 4 (p = 2).
 */

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "padicprop/error.hpp"
#include "padicprop/padic.hpp"
#include "padicprop/rational.hpp"
#include "padicprop/series.hpp"

namespace padicprop {

enum class SystemTag { free, constant_force, oscillator, custom };

inline std::string to_string(SystemTag tag) {
  switch (tag) {
    case SystemTag::free: return "free";
    case SystemTag::constant_force: return "constant_force";
    case SystemTag::oscillator: return "oscillator";
    case SystemTag::custom: return "custom";
  }
  return "custom";
}

inline SystemTag parse_system_tag(const std::string& s) {
  if (s == "free") return SystemTag::free;
  if (s == "constant_force") return SystemTag::constant_force;
  if (s == "oscillator") return SystemTag::oscillator;
  if (s == "custom") return SystemTag::custom;
  throw Error(ErrorCode::parse_error, "tag: unknown system tag '" + s + "'");
}

struct QuadLagrangian {
  Rational A{1}, B{0}, C{0}, D{0}, E{0}, F{0};
  SystemTag tag = SystemTag::free;

  /// Checks A != 0 and that the tag matches the coefficients.
  void validate() const {
    if (A == 0) throw Error(ErrorCode::degenerate_kinetic_term, "A: kinetic coefficient must be nonzero");
    const auto fail = [&](const char* why) {
      throw Error(ErrorCode::inconsistent_system_tag, "tag: '" + to_string(tag) + "' requires " + why);
    };
    switch (tag) {
      case SystemTag::free:
        if (E != 0 || F != 0 || C != 0) fail("E = F = C = 0");
        break;
      case SystemTag::constant_force:
        if (F != 0 || C != 0 || E == 0) fail("F = C = 0 and E != 0");
        break;
      case SystemTag::oscillator:
        if (F == 0 || C != 0 || E != 0) fail("F != 0 and C = E = 0");
        break;
      case SystemTag::custom:
        break;
    }
  }

  /// The supported system these coefficients describe.
  SystemTag system() const {
    validate();
    if (C != 0) throw Error(ErrorCode::unsupported_lagrangian, "C: q' q coupling is not supported");
    if (E != 0 && F != 0) throw Error(ErrorCode::unsupported_lagrangian, "E and F both nonzero is not supported");
    if (F != 0) return SystemTag::oscillator;
    if (E != 0) return SystemTag::constant_force;
    return SystemTag::free;
  }

  static QuadLagrangian free_particle(const Rational& mass) {
    QuadLagrangian l;
    l.A = mass;
    l.tag = SystemTag::free;
    return l;
  }
  /// L = m/2 q'^2 + E q, i.e. a constant force E (E = -lambda for a potential lambda q).
  static QuadLagrangian constant_force(const Rational& mass, const Rational& force) {
    QuadLagrangian l;
    l.A = mass;
    l.E = force;
    l.tag = SystemTag::constant_force;
    return l;
  }
  /// L = m/2 q'^2 - m omega^2/2 q^2, given omega^2.
  static QuadLagrangian oscillator(const Rational& mass, const Rational& omega_squared) {
    QuadLagrangian l;
    l.A = mass;
    l.F = -mass * omega_squared;
    l.tag = SystemTag::oscillator;
    return l;
  }
};

inline nlohmann::json to_json(const QuadLagrangian& l) {
  return {{"A", to_string(l.A)}, {"B", to_string(l.B)}, {"C", to_string(l.C)}, {"D", to_string(l.D)},
          {"E", to_string(l.E)}, {"F", to_string(l.F)}, {"tag", to_string(l.tag)}};
}

/// Parses {A, B, C, D, E, F, tag}; coefficients are rational strings, missing
/// ones default to 0 except A which is required. A missing tag is inferred.
inline QuadLagrangian lagrangian_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "lagrangian: expected a JSON object");
  QuadLagrangian l;
  const auto field = [&](const char* name, Rational& out, bool required) {
    if (!j.contains(name)) {
      if (required) throw Error(ErrorCode::parse_error, std::string("lagrangian.") + name + ": missing field");
      out = 0;
      return;
    }
    const auto& v = j.at(name);
    if (v.is_string()) {
      try {
        out = parse_rational(v.get<std::string>());
      } catch (const Error& e) {
        throw Error(ErrorCode::parse_error, std::string("lagrangian.") + name + ": " + e.what());
      }
    } else if (v.is_number_integer()) {
      out = Rational(v.get<long long>());
    } else {
      throw Error(ErrorCode::parse_error, std::string("lagrangian.") + name + ": expected a rational string");
    }
  };
  field("A", l.A, true);
  field("B", l.B, false);
  field("C", l.C, false);
  field("D", l.D, false);
  field("E", l.E, false);
  field("F", l.F, false);
  if (j.contains("tag")) {
    l.tag = parse_system_tag(j.at("tag").get<std::string>());
  } else if (l.C == 0 && !(l.E != 0 && l.F != 0)) {
    l.tag = l.F != 0 ? SystemTag::oscillator : (l.E != 0 ? SystemTag::constant_force : SystemTag::free);
  } else {
    l.tag = SystemTag::custom;
  }
  l.validate();
  return l;
}

struct BasisSolutions {
  QuadLagrangian lagrangian;
  SystemTag system = SystemTag::free;
  Polynomial x1, x2, w;
  int truncation_order = 0;                         // series terms kept; 0 for closed forms
  std::optional<std::int64_t> convergence_radius_exponent;  // nullopt: entire
  Rational kappa{0};                                // F / A

  bool closed_form() const { return system != SystemTag::oscillator; }
};

/// A q''(t) - F q(t) - E: the Euler-Lagrange residual of q at t.
inline Rational euler_lagrange_residual(const QuadLagrangian& l, const Polynomial& q, const Rational& t) {
  return l.A * q.derivative().derivative()(t) - l.F * q(t) - l.E;
}

/// True when t lies in the disc where the basis series converge.
inline bool in_convergence_domain(const BasisSolutions& basis, const Rational& t, const PrimeContext& ctx) {
  if (!basis.convergence_radius_exponent) return true;
  return valuation_at_least(basis.kappa * t * t, 2 * *basis.convergence_radius_exponent, ctx.prime);
}

inline void require_in_domain(const BasisSolutions& basis, const Rational& t, const PrimeContext& ctx) {
  if (!in_convergence_domain(basis, t, ctx)) {
    throw Error(ErrorCode::outside_convergence_domain,
                "t = " + to_string(t) + " lies outside the oscillator convergence disc");
  }
}

/// Euler-Lagrange residual with the oscillator domain enforced.
inline Rational euler_lagrange_residual(const BasisSolutions& basis, const Polynomial& q, const Rational& t,
                                        const PrimeContext& ctx) {
  require_in_domain(basis, t, ctx);
  return euler_lagrange_residual(basis.lagrangian, q, t);
}

namespace detail {

inline Integer factorial(unsigned n) {
  Integer f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

/// kappa^k t^n / n! as a monomial.
inline Polynomial oscillator_term(const Rational& kappa, unsigned k, unsigned n) {
  return Polynomial::monomial(rational_pow(kappa, static_cast<std::int64_t>(k)) / Rational(factorial(n)), n);
}

}  // namespace detail

inline BasisSolutions basis_solutions(const QuadLagrangian& l, int order, const PrimeContext& ctx) {
  BasisSolutions b;
  b.lagrangian = l;
  b.system = l.system();
  b.x1 = Polynomial::constant(1);
  b.x2 = Polynomial::monomial(1, 1);
  switch (b.system) {
    case SystemTag::free:
      break;
    case SystemTag::constant_force:
      // A w'' = E
      b.w = Polynomial::monomial(l.E / (2 * l.A), 2);
      break;
    case SystemTag::oscillator: {
      if (order < 2) throw Error(ErrorCode::parse_error, "series order must be at least 2");
      b.kappa = l.F / l.A;
      b.truncation_order = order;
      b.convergence_radius_exponent = ctx.prime == 2 ? 2 : 1;
      Polynomial x1, x2;
      for (unsigned k = 0; k < static_cast<unsigned>(order); ++k) {
        x1 = x1 + detail::oscillator_term(b.kappa, k, 2 * k);
        x2 = x2 + detail::oscillator_term(b.kappa, k, 2 * k + 1);
      }
      b.x1 = x1;
      b.x2 = x2;
      break;
    }
    case SystemTag::custom:
      break;
  }
  return b;
}

/// Valuation of the first dropped series term of x1, x2 and their first
/// derivatives at t, minimized over the four; nullopt for closed forms.
inline Valuation first_dropped_valuation(const BasisSolutions& b, const Rational& t, const PrimeContext& ctx) {
  if (b.closed_form()) return std::nullopt;
  const auto K = static_cast<unsigned>(b.truncation_order);
  const Polynomial dropped_x1 = detail::oscillator_term(b.kappa, K, 2 * K);
  const Polynomial dropped_x2 = detail::oscillator_term(b.kappa, K, 2 * K + 1);
  Valuation out;
  for (const Polynomial* q : {&dropped_x1, &dropped_x2}) {
    for (const Polynomial& f : {*q, q->derivative()}) {
      const auto v = valuation(f(t), ctx);
      if (v && (!out || *v < *out)) out = v;
    }
  }
  return out;
}

/// Wronskian-like denominator x2(t_end) x1(t_start) - x1(t_end) x2(t_start).
inline Rational boundary_denominator(const BasisSolutions& b, const Rational& t_start, const Rational& t_end) {
  return b.x2(t_end) * b.x1(t_start) - b.x1(t_end) * b.x2(t_start);
}

struct ClassicalSolution {
  Rational C1, C2;
  QuadLagrangian lagrangian;
  Rational t_start, t_end, x_start, x_end;
  BasisSolutions basis;

  Polynomial trajectory() const { return basis.x1 * C1 + basis.x2 * C2 + basis.w; }
};

namespace detail {

inline void check_times(const BasisSolutions& b, const Rational& t_start, const Rational& t_end,
                        const PrimeContext& ctx) {
  if (t_start == t_end) throw Error(ErrorCode::coincident_times, "t' = t'' = " + to_string(t_start));
  require_in_domain(b, t_start, ctx);
  require_in_domain(b, t_end, ctx);
  if (boundary_denominator(b, t_start, t_end) == 0) {
    throw Error(ErrorCode::conjugate_point, "boundary-value denominator vanishes (conjugate points)");
  }
}

}  // namespace detail

/// Integration constants making C1 x1 + C2 x2 + w pass through
/// (t_start, x_start) and (t_end, x_end).
inline ClassicalSolution boundary_constants(const BasisSolutions& b, const Rational& t_start, const Rational& t_end,
                                            const Rational& x_start, const Rational& x_end, const PrimeContext& ctx) {
  detail::check_times(b, t_start, t_end, ctx);
  const Rational x1s = b.x1(t_start), x1e = b.x1(t_end);
  const Rational x2s = b.x2(t_start), x2e = b.x2(t_end);
  const Rational ws = b.w(t_start), we = b.w(t_end);
  const Rational den = x2e * x1s - x1e * x2s;
  ClassicalSolution s;
  s.C1 = ((x_start - ws) * x2e - (x_end - we) * x2s) / den;
  s.C2 = ((x_end - we) * x1s - (x_start - ws) * x1e) / den;
  s.lagrangian = b.lagrangian;
  s.t_start = t_start;
  s.t_end = t_end;
  s.x_start = x_start;
  s.x_end = x_end;
  s.basis = b;
  return s;
}

/// S(x'', x') = a11 x''^2 + a12 x'' x' + a22 x'^2 + b1 x'' + b2 x' + c,
/// with x'' the endpoint at t_end and x' the endpoint at t_start.
struct ActionForm {
  Rational a11{0}, a12{0}, a22{0}, b1{0}, b2{0}, c{0};
  Rational t_start{0}, t_end{0};
  Valuation guaranteed_valuation;  // nullopt: exact

  Rational operator()(const Rational& x_end, const Rational& x_start) const {
    return a11 * x_end * x_end + a12 * x_end * x_start + a22 * x_start * x_start + b1 * x_end + b2 * x_start + c;
  }

  bool operator==(const ActionForm& o) const {
    return a11 == o.a11 && a12 == o.a12 && a22 == o.a22 && b1 == o.b1 && b2 == o.b2 && c == o.c &&
           t_start == o.t_start && t_end == o.t_end;
  }
};

inline Rational mixed_partial(const ActionForm& f) { return f.a12; }

/// Minimum valuation of the coefficient-wise difference of two forms
/// (nullopt when they agree exactly).
inline Valuation difference_valuation(const ActionForm& x, const ActionForm& y, std::int64_t p) {
  Valuation out;
  for (const Rational& d : std::array<Rational, 6>{x.a11 - y.a11, x.a12 - y.a12, x.a22 - y.a22, x.b1 - y.b1, x.b2 - y.b2, x.c - y.c}) {
    const auto v = valuation(d, p);
    if (v && (!out || *v < *out)) out = v;
  }
  return out;
}

inline nlohmann::json to_json(const ActionForm& f) {
  nlohmann::json j = {{"a11", to_string(f.a11)}, {"a12", to_string(f.a12)}, {"a22", to_string(f.a22)},
                      {"b1", to_string(f.b1)},   {"b2", to_string(f.b2)},   {"c", to_string(f.c)},
                      {"t_start", to_string(f.t_start)}, {"t_end", to_string(f.t_end)}};
  if (f.guaranteed_valuation) {
    j["guaranteed_valuation"] = *f.guaranteed_valuation;
  } else {
    j["guaranteed_valuation"] = "inf";
  }
  return j;
}

namespace detail {

/// Integrals over [t_start, t_end] of products of the basis functions
/// y = (x1, x2, w): vv[i][j] of y_i' y_j', qq[i][j] of y_i y_j, and the
/// linear integrals of y_i' and y_i.
struct GramIntegrals {
  Rational vv[3][3], qq[3][3], v[3], q[3];
};

inline GramIntegrals polynomial_gram(const BasisSolutions& b, const Rational& t_start, const Rational& t_end) {
  const Polynomial y[3] = {b.x1, b.x2, b.w};
  const Polynomial dy[3] = {b.x1.derivative(), b.x2.derivative(), b.w.derivative()};
  GramIntegrals g;
  for (int i = 0; i < 3; ++i) {
    g.v[i] = dy[i].integrate(t_start, t_end);
    g.q[i] = y[i].integrate(t_start, t_end);
    for (int j = i; j < 3; ++j) {
      g.vv[i][j] = g.vv[j][i] = (dy[i] * dy[j]).integrate(t_start, t_end);
      g.qq[i][j] = g.qq[j][i] = (y[i] * y[j]).integrate(t_start, t_end);
    }
  }
  return g;
}

/// kappa^m t^e sum_n r_n (kappa t^2)^n.
struct ZSeries {
  int kappa_power = 0;
  int t_power = 0;
  std::vector<Rational> r;
};

inline ZSeries times(const ZSeries& a, const ZSeries& b) {
  ZSeries out;
  out.kappa_power = a.kappa_power + b.kappa_power;
  out.t_power = a.t_power + b.t_power;
  out.r.assign(a.r.size() + b.r.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.r.size(); ++i) {
    for (std::size_t j = 0; j < b.r.size(); ++j) out.r[i + j] += a.r[i] * b.r[j];
  }
  return out;
}

/// Term-by-term antiderivative without constant term.
inline ZSeries antiderivative(ZSeries s) {
  for (std::size_t n = 0; n < s.r.size(); ++n) s.r[n] /= static_cast<long>(2 * n + s.t_power + 1);
  ++s.t_power;
  return s;
}

inline Rational evaluate(const ZSeries& s, const Rational& kappa, const Rational& t) {
  const Rational z = kappa * t * t;
  Rational acc(0);
  for (auto it = s.r.rbegin(); it != s.r.rend(); ++it) acc = acc * z + *it;
  return acc * rational_pow(kappa, s.kappa_power) * rational_pow(t, s.t_power);
}

/// Antiderivatives of x1'x1', x1'x2', x2'x2', x1x1, x1x2, x2x2 for the
/// truncated cos/sin basis, independent of kappa.
struct OscillatorProducts {
  ZSeries vv11, vv12, vv22, qq11, qq12, qq22;
};

inline OscillatorProducts make_oscillator_products(int order) {
  ZSeries c, s, ds;
  c.r.resize(static_cast<std::size_t>(order));
  s.r.resize(static_cast<std::size_t>(order));
  s.t_power = 1;
  for (int k = 0; k < order; ++k) {
    c.r[static_cast<std::size_t>(k)] = Rational(Integer(1), factorial(static_cast<unsigned>(2 * k)));
    s.r[static_cast<std::size_t>(k)] = Rational(Integer(1), factorial(static_cast<unsigned>(2 * k + 1)));
  }
  // x1' = kappa t sum_{j < order - 1} z^j / (2j + 1)!, x2' = x1
  ds = s;
  ds.r.pop_back();
  ds.kappa_power = 1;
  return {antiderivative(times(ds, ds)), antiderivative(times(ds, c)), antiderivative(times(c, c)),
          antiderivative(times(c, c)),   antiderivative(times(c, s)),  antiderivative(times(s, s))};
}

inline std::shared_ptr<const OscillatorProducts> oscillator_products(int order) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const OscillatorProducts>> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_shared<const OscillatorProducts>(make_oscillator_products(order));
  return slot;
}

inline GramIntegrals oscillator_gram(const BasisSolutions& b, const Rational& t_start, const Rational& t_end) {
  const auto products = oscillator_products(b.truncation_order);
  const auto integral = [&](const ZSeries& s) -> Rational {
    return evaluate(s, b.kappa, t_end) - evaluate(s, b.kappa, t_start);
  };
  GramIntegrals g;
  g.vv[0][0] = integral(products->vv11);
  g.vv[0][1] = g.vv[1][0] = integral(products->vv12);
  g.vv[1][1] = integral(products->vv22);
  g.qq[0][0] = integral(products->qq11);
  g.qq[0][1] = g.qq[1][0] = integral(products->qq12);
  g.qq[1][1] = integral(products->qq22);
  g.v[0] = b.x1(t_end) - b.x1(t_start);
  g.v[1] = b.x2(t_end) - b.x2(t_start);
  g.q[0] = g.v[1];
  g.q[1] = b.x1.antiderivative()(t_end) - b.x1.antiderivative()(t_start);
  return g;
}

inline Rational bilinear(const Rational (&m)[3][3], const Rational (&u)[3], const Rational (&v)[3]) {
  Rational acc(0);
  for (int i = 0; i < 3; ++i) {
    if (u[i] == 0) continue;
    for (int j = 0; j < 3; ++j) {
      if (v[j] != 0) acc += u[i] * m[i][j] * v[j];
    }
  }
  return acc;
}

inline Rational dot(const Rational (&a)[3], const Rational (&u)[3]) { return a[0] * u[0] + a[1] * u[1] + a[2] * u[2]; }

}  // namespace detail

/// Classical action along the boundary-value trajectory from t_start to
/// t_end. The trajectory is C1 x1 + C2 x2 + w with C1, C2 affine in the
/// endpoints, so L integrates term by term (antiderivatives without constant
/// term) into a quadratic form in (x'', x').
inline ActionForm classical_action(const QuadLagrangian& l, const Rational& t_start, const Rational& t_end,
                                   const PrimeContext& ctx) {
  const BasisSolutions b = basis_solutions(l, ctx.series_order, ctx);
  detail::check_times(b, t_start, t_end, ctx);

  const Rational x1s = b.x1(t_start), x1e = b.x1(t_end);
  const Rational x2s = b.x2(t_start), x2e = b.x2(t_end);
  const Rational ws = b.w(t_start), we = b.w(t_end);
  const Rational den = x2e * x1s - x1e * x2s;

  // Coordinates of the trajectory in (x1, x2, w): the x'' part, the x' part
  // and the endpoint-free part.
  const Rational ue[3] = {-x2s / den, x1s / den, Rational(0)};
  const Rational us[3] = {x2e / den, -x1e / den, Rational(0)};
  const Rational u0[3] = {(we * x2s - ws * x2e) / den, (ws * x1e - we * x1s) / den, Rational(1)};

  const detail::GramIntegrals g =
      b.closed_form() ? detail::polynomial_gram(b, t_start, t_end) : detail::oscillator_gram(b, t_start, t_end);
  const auto quad = [&](const Rational(&x)[3], const Rational(&y)[3]) -> Rational {
    return l.A * detail::bilinear(g.vv, x, y) + l.F * detail::bilinear(g.qq, x, y);
  };
  const auto lin = [&](const Rational(&x)[3]) -> Rational { return l.B * detail::dot(g.v, x) + l.E * detail::dot(g.q, x); };

  ActionForm f;
  f.t_start = t_start;
  f.t_end = t_end;
  f.a11 = quad(ue, ue) / 2;
  f.a12 = quad(ue, us);
  f.a22 = quad(us, us) / 2;
  f.b1 = quad(u0, ue) + lin(ue);
  f.b2 = quad(u0, us) + lin(us);
  f.c = quad(u0, u0) / 2 + lin(u0) + l.D * (t_end - t_start);

  if (!b.closed_form()) {
    // Truncation error of the basis enters the coefficients through the
    // 1/den factors of C1, C2 (twice, since L is quadratic in them).
    const auto ds = first_dropped_valuation(b, t_start, ctx);
    const auto de = first_dropped_valuation(b, t_end, ctx);
    std::int64_t dropped = std::min(ds.value_or(INT64_MAX / 4), de.value_or(INT64_MAX / 4));
    f.guaranteed_valuation = dropped + *valuation(l.A, ctx) - 2 * *valuation(den, ctx) +
                             std::min<std::int64_t>(0, 2 * std::min(valuation(t_start, ctx).value_or(0),
                                                                    valuation(t_end, ctx).value_or(0)));
  }

  if (ctx.faults.drop_linear_action_terms) {
    f.b1 = 0;
    f.c = 0;
  }
  return f;
}

/// Stationary value over the shared endpoint of early (t' -> t) followed by
/// late (t -> t''), i.e. the additivity of classical actions.
inline ActionForm compose_actions(const ActionForm& late, const ActionForm& early) {
  if (late.t_start != early.t_end) {
    throw Error(ErrorCode::coincident_times, "compose_actions: legs do not share the middle time");
  }
  const Rational q = early.a11 + late.a22;
  if (q == 0) throw Error(ErrorCode::degenerate_composition, "middle-point quadratic coefficient vanishes");
  const Rational& u = late.a12;
  const Rational& v = early.a12;
  const Rational w = early.b1 + late.b2;
  ActionForm f;
  f.t_start = early.t_start;
  f.t_end = late.t_end;
  f.a11 = late.a11 - u * u / (4 * q);
  f.a12 = -u * v / (2 * q);
  f.a22 = early.a22 - v * v / (4 * q);
  f.b1 = late.b1 - u * w / (2 * q);
  f.b2 = early.b2 - v * w / (2 * q);
  f.c = early.c + late.c - w * w / (4 * q);
  if (late.guaranteed_valuation || early.guaranteed_valuation) {
    f.guaranteed_valuation = std::min(late.guaranteed_valuation.value_or(INT64_MAX / 4),
                                      early.guaranteed_valuation.value_or(INT64_MAX / 4));
  }
  return f;
}

}  // namespace padicprop

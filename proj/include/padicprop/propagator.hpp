#pragma once

/**
 * @file propagator.hpp
 * @brief Closed-form p-adic propagator of a quadratic Lagrangian and the
 *        kernel laws it must satisfy.
 *
 * K_p(x'', t''; x', t') = lambda_p(-a12 / 2h) |a12 / h|_p^{1/2} chi_p(-S(x'', x') / h)
 * where S is the classical action and a12 its mixed second partial.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "padicprop/characters.hpp"
#include "padicprop/error.hpp"
#include "padicprop/exact_complex.hpp"
#include "padicprop/mechanics.hpp"
#include "padicprop/oracle.hpp"
#include "padicprop/padic.hpp"

namespace padicprop {

struct PhysicsConfig {
  Rational h{1};
  PrimeContext ctx{};

  PhysicsConfig() = default;
  PhysicsConfig(Rational planck, PrimeContext context) : h(std::move(planck)), ctx(std::move(context)) {
    if (h == 0) throw Error(ErrorCode::zero_planck_constant, "h: Planck constant must be nonzero");
  }
};

struct KernelValue {
  ExactComplex value;
  ActionForm action;
  Rational x_end, x_start, t_end, t_start;
};

/// lambda_p(-a12 / 2h) |a12 / h|_p^{1/2}: the endpoint-independent factor.
inline ExactComplex normalization_factor(const ActionForm& form, const PhysicsConfig& cfg) {
  const Rational a12 = mixed_partial(form);
  if (a12 == 0) throw Error(ErrorCode::degenerate_mixed_partial, "mixed partial of the action vanishes");
  const auto v = *valuation(a12 / cfg.h, cfg.ctx);
  return lambda_p(-a12 / (2 * cfg.h), cfg.ctx) * ExactComplex(cfg.ctx.prime, Rational(1), -v);
}

inline KernelValue kernel_from_action(const ActionForm& form, const Rational& x_end, const Rational& x_start,
                                      const PhysicsConfig& cfg) {
  KernelValue k;
  k.value = normalization_factor(form, cfg) *
            ExactComplex::unit(cfg.ctx.prime, chi_p(-form(x_end, x_start) / cfg.h, cfg.ctx));
  k.action = form;
  k.x_end = x_end;
  k.x_start = x_start;
  k.t_end = form.t_end;
  k.t_start = form.t_start;
  return k;
}

inline KernelValue propagator(const QuadLagrangian& l, const Rational& t_end, const Rational& t_start,
                              const Rational& x_end, const Rational& x_start, const PhysicsConfig& cfg) {
  return kernel_from_action(classical_action(l, t_start, t_end, cfg.ctx), x_end, x_start, cfg);
}

inline nlohmann::json to_json(const KernelValue& k) {
  return {{"value", to_json(k.value)},
          {"rendered", to_string(k.value)},
          {"action", to_json(k.action)},
          {"x_end", to_string(k.x_end)},
          {"x_start", to_string(k.x_start)},
          {"t_end", to_string(k.t_end)},
          {"t_start", to_string(k.t_start)}};
}

/// One verification outcome, serializable as
/// {check, prime, params, expected, actual, equal, mode, tolerance}.
struct CheckReport {
  std::string check;
  std::int64_t prime = 2;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json expected;
  nlohmann::json actual;
  bool equal = false;
  std::string mode = "exact";
  nlohmann::json tolerance;  // null in exact mode
  nlohmann::json details = nlohmann::json::object();
};

inline nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j = {{"check", r.check},       {"prime", r.prime}, {"params", r.params},
                      {"expected", r.expected}, {"actual", r.actual}, {"equal", r.equal},
                      {"mode", r.mode},         {"tolerance", r.tolerance}};
  if (!r.details.empty()) j["details"] = r.details;
  return j;
}

namespace detail {

inline nlohmann::json common_params(const QuadLagrangian& l, const PhysicsConfig& cfg) {
  return {{"lagrangian", to_json(l)}, {"h", to_string(cfg.h)}};
}

/// alpha = -(a11(early) + a22(late)) / h: the x^2 coefficient of the
/// composed phase, i.e. -(1/2h) times the sum of the two second partials
/// in the shared endpoint.
inline Rational composition_alpha(const ActionForm& late, const ActionForm& early, const Rational& h) {
  return -(early.a11 + late.a22) / h;
}

}  // namespace detail

/// Composition law: integrates K(x'', t''; x, t) K(x, t; x', t') over x in
/// closed form (Gauss integral of the completed square) and compares with
/// K(x'', t''; x', t').
inline CheckReport check_composition(const QuadLagrangian& l, const Rational& t_end, const Rational& t_mid,
                                     const Rational& t_start, const Rational& x_end, const Rational& x_start,
                                     const PhysicsConfig& cfg) {
  CheckReport r;
  r.check = "composition";
  r.prime = cfg.ctx.prime;
  r.params = detail::common_params(l, cfg);
  r.params["t_end"] = to_string(t_end);
  r.params["t_mid"] = to_string(t_mid);
  r.params["t_start"] = to_string(t_start);
  r.params["x_end"] = to_string(x_end);
  r.params["x_start"] = to_string(x_start);

  const ActionForm early = classical_action(l, t_start, t_mid, cfg.ctx);
  const ActionForm late = classical_action(l, t_mid, t_end, cfg.ctx);
  const ActionForm direct = classical_action(l, t_start, t_end, cfg.ctx);
  const Rational& h = cfg.h;

  const Rational alpha = detail::composition_alpha(late, early, h);
  if (alpha == 0) throw Error(ErrorCode::degenerate_composition, "alpha = 0 in the composition integral");
  const Rational beta = -(early.a12 * x_start + early.b1 + late.a12 * x_end + late.b2) / h;
  const Rational gamma =
      -(early.a22 * x_start * x_start + early.b2 * x_start + early.c + late.a11 * x_end * x_end + late.b1 * x_end +
        late.c) / h;

  const std::int64_t p = cfg.ctx.prime;
  const ExactComplex composed = normalization_factor(late, cfg) * normalization_factor(early, cfg) *
                                ExactComplex::unit(p, chi_p(gamma, cfg.ctx)) * gauss_integral(alpha, beta, cfg.ctx);
  const KernelValue expected = kernel_from_action(direct, x_end, x_start, cfg);

  r.expected = to_json(expected.value);
  r.actual = to_json(composed);
  r.details["alpha"] = to_string(alpha);
  const bool values_equal = composed == expected.value;
  r.details["values_equal"] = values_equal;

  if (!direct.guaranteed_valuation) {
    r.equal = values_equal;
    return r;
  }
  // Series systems: endpoint-free factors must agree exactly and the
  // composed action must match the direct one to the guaranteed valuation.
  const ActionForm composed_form = compose_actions(late, early);
  const std::int64_t g = std::min(*direct.guaranteed_valuation, composed_form.guaranteed_valuation.value_or(INT64_MAX));
  const auto diff = difference_valuation(composed_form, direct, p);
  const ExactComplex composed_norm = normalization_factor(late, cfg) * normalization_factor(early, cfg) *
                                     lambda_p(alpha, cfg.ctx) *
                                     ExactComplex(p, Rational(1), *valuation(2 * alpha, cfg.ctx));
  const bool norm_equal = composed_norm == normalization_factor(direct, cfg);
  r.mode = "tolerance";
  r.tolerance = {{"valuation", g}};
  r.details["normalization_equal"] = norm_equal;
  r.details["action_difference_valuation"] = diff ? nlohmann::json(*diff) : nlohmann::json("inf");
  r.equal = norm_equal && (!diff || *diff >= g);
  return r;
}

/// Cocycle A(t'', t) A(t, t') lambda_p(alpha) = A(t'', t') and the norm
/// identity |a12''/h|^{1/2} |a12'/h|^{1/2} |2 alpha|^{-1/2} = |a12/h|^{1/2}
/// (compared squared, as exact rationals), with A = lambda_p(-a12 / 2h).
inline CheckReport check_cocycle(const QuadLagrangian& l, const Rational& t_end, const Rational& t_mid,
                                 const Rational& t_start, const PhysicsConfig& cfg) {
  CheckReport r;
  r.check = "cocycle";
  r.prime = cfg.ctx.prime;
  r.params = detail::common_params(l, cfg);
  r.params["t_end"] = to_string(t_end);
  r.params["t_mid"] = to_string(t_mid);
  r.params["t_start"] = to_string(t_start);

  const ActionForm early = classical_action(l, t_start, t_mid, cfg.ctx);
  const ActionForm late = classical_action(l, t_mid, t_end, cfg.ctx);
  const ActionForm direct = classical_action(l, t_start, t_end, cfg.ctx);
  const Rational& h = cfg.h;
  const Rational alpha = detail::composition_alpha(late, early, h);
  if (alpha == 0) throw Error(ErrorCode::degenerate_composition, "alpha = 0 in the cocycle condition");

  const auto A = [&](const ActionForm& f) { return lambda_p(-f.a12 / (2 * h), cfg.ctx); };
  const ExactComplex lhs = A(late) * A(early) * lambda_p(alpha, cfg.ctx);
  const ExactComplex rhs = A(direct);
  const bool cocycle = lhs == rhs;

  const Rational norm_lhs =
      norm_p(late.a12 / h, cfg.ctx) * norm_p(early.a12 / h, cfg.ctx) / norm_p(2 * alpha, cfg.ctx);
  const Rational norm_rhs = norm_p(direct.a12 / h, cfg.ctx);
  const bool norms = norm_lhs == norm_rhs;

  r.expected = {{"phase", to_json(rhs)}, {"norm_squared", to_string(norm_rhs)}};
  r.actual = {{"phase", to_json(lhs)}, {"norm_squared", to_string(norm_lhs)}};
  r.details = {{"alpha", to_string(alpha)}, {"cocycle_equal", cocycle}, {"norm_equal", norms}};
  r.equal = cocycle && norms;
  return r;
}

struct UnitarityResult {
  ExactComplex value;
  ExactComplex predicted;
  std::optional<std::int64_t> threshold;  // N0 for x != x'
  CheckReport report;
};

/// Integral over |x''|_p <= p^N of conj(K(x'', t''; x', t')) K(x'', t''; x, t').
/// The integrand is |N_p|^2 times a character linear in x'', so the ball
/// integral is exact: it vanishes for N >= N0 = valuation(a12 (x - x') / h) + 1
/// when x != x', and equals |a12 / h|_p p^N on the diagonal.
inline UnitarityResult check_unitarity(const QuadLagrangian& l, const Rational& t_end, const Rational& t_start,
                                       const Rational& x_start, const Rational& x, std::int64_t N,
                                       const PhysicsConfig& cfg) {
  check_ball_exponent(N, cfg.ctx, "ball exponent N");
  const std::int64_t p = cfg.ctx.prime;
  const ActionForm f = classical_action(l, t_start, t_end, cfg.ctx);
  const ExactComplex n = normalization_factor(f, cfg);
  const Rational dx = x - x_start;
  const PhaseFraction phase = chi_p(-(f.a22 * (x * x - x_start * x_start) + f.b2 * dx) / cfg.h, cfg.ctx);
  const Rational ball = char_integral_ball(-f.a12 * dx / cfg.h, N, cfg.ctx);

  UnitarityResult out;
  out.value = n.conj() * n * ExactComplex::unit(p, phase) * ExactComplex(p, ball);

  const Rational diagonal = norm_p(f.a12 / cfg.h, cfg.ctx) * rational_pow(p, N);
  bool equal = false;
  if (dx == 0) {
    out.predicted = ExactComplex(p, diagonal);
    equal = out.value == out.predicted;
  } else {
    out.threshold = *valuation(f.a12 * dx / cfg.h, cfg.ctx) + 1;
    if (N >= *out.threshold) {
      out.predicted = ExactComplex::zero(p);
      equal = out.value == out.predicted;
    } else {
      out.predicted = ExactComplex(p, diagonal, 0, phase);
      equal = out.value.modulus_squared() == out.predicted.modulus_squared();
    }
  }

  CheckReport& r = out.report;
  r.check = "unitarity";
  r.prime = p;
  r.params = detail::common_params(l, cfg);
  r.params["t_end"] = to_string(t_end);
  r.params["t_start"] = to_string(t_start);
  r.params["x_start"] = to_string(x_start);
  r.params["x"] = to_string(x);
  r.params["N"] = N;
  r.expected = to_json(out.predicted);
  r.actual = to_json(out.value);
  r.equal = equal;
  if (out.threshold) r.details["N0"] = *out.threshold;
  return out;
}

struct DeltaEntry {
  Rational t_start;
  std::optional<ExactComplex> exact;  // nullopt in the transitional band
  ApproxComplex approx;
  bool at_limit = false;
};

struct DeltaLimitResult {
  std::vector<DeltaEntry> entries;
  Rational limit{0};
  bool contains = false;                    // x'' lies in the ball around x'
  bool valuation_increasing = true;
  std::optional<std::size_t> reached_index;  // first index from which every entry equals the limit
  CheckReport report;
};

/// Pairs K(., t''; ., t'_k) with the indicators of the balls of radius p^N
/// around x'' and x', for a sequence t'_k approaching t'' p-adically.
/// The delta limit predicts the measure of the intersection: p^N when x''
/// lies in the ball around x', else 0. Requires a translation-invariant
/// action (a11 = a22 = -a12/2, b1 = -b2), i.e. a free particle.
inline DeltaLimitResult check_delta_limit(const QuadLagrangian& l, const Rational& t_end, const Rational& x_end,
                                          const Rational& x_start, const std::vector<Rational>& time_sequence,
                                          std::int64_t N, const PhysicsConfig& cfg) {
  check_ball_exponent(N, cfg.ctx, "ball exponent N");
  const std::int64_t p = cfg.ctx.prime;
  DeltaLimitResult out;
  out.contains = valuation_at_least(x_end - x_start, -N, p);
  out.limit = out.contains ? rational_pow(p, N) : Rational(0);
  const Rational d = x_end - x_start;
  const ExactComplex limit_value(p, out.limit);

  Valuation previous;
  for (std::size_t i = 0; i < time_sequence.size(); ++i) {
    const Rational& ts = time_sequence[i];
    const auto vt = valuation(t_end - ts, p);
    if (i > 0 && vt && previous && *vt <= *previous) out.valuation_increasing = false;
    previous = vt;

    const ActionForm f = classical_action(l, ts, t_end, cfg.ctx);
    if (f.a11 != f.a22 || f.a12 != -2 * f.a11 || f.b1 != -f.b2) {
      throw Error(ErrorCode::unsupported_pairing, "delta pairing needs a translation-invariant action");
    }
    // S = a11 u^2 + b1 u + c with u = x'' - x'; the double ball integral is
    // p^N times the integral of K(u) over |u - d| <= p^N.
    const ExactComplex n = normalization_factor(f, cfg);
    const ExactComplex outer = n * ExactComplex::unit(p, chi_p(-f.c / cfg.h, cfg.ctx)) *
                               ExactComplex(p, rational_pow(p, N));
    const Rational alpha = -f.a11 / cfg.h;
    const Rational beta = -f.b1 / cfg.h;
    DeltaEntry e;
    e.t_start = ts;
    if (auto exact = ball_gauss_integral(alpha, beta, d, N, cfg.ctx)) {
      e.exact = outer * *exact;
      e.approx = e.exact->approx();
      e.at_limit = *e.exact == limit_value;
    } else {
      e.approx = outer.approx() * ball_gauss_oracle(alpha, beta, d, N, cfg.ctx);
    }
    out.entries.push_back(std::move(e));
  }
  for (std::size_t i = out.entries.size(); i-- > 0;) {
    if (!out.entries[i].at_limit) break;
    out.reached_index = i;
  }

  CheckReport& r = out.report;
  r.check = "delta_limit";
  r.prime = p;
  r.params = detail::common_params(l, cfg);
  r.params["t_end"] = to_string(t_end);
  r.params["x_end"] = to_string(x_end);
  r.params["x_start"] = to_string(x_start);
  r.params["N"] = N;
  nlohmann::json seq = nlohmann::json::array();
  for (const auto& t : time_sequence) seq.push_back(to_string(t));
  r.params["time_sequence"] = seq;
  r.expected = to_json(limit_value);
  r.actual = out.entries.empty() ? nlohmann::json() : (out.entries.back().exact ? to_json(*out.entries.back().exact)
                                                                                : nlohmann::json(to_string(out.entries.back().approx)));
  r.equal = out.reached_index.has_value() && out.valuation_increasing;
  r.details["reached_index"] = out.reached_index ? nlohmann::json(*out.reached_index) : nlohmann::json();
  nlohmann::json values = nlohmann::json::array();
  for (const auto& e : out.entries) {
    values.push_back({{"t_start", to_string(e.t_start)},
                      {"exact", e.exact ? nlohmann::json(to_string(*e.exact)) : nlohmann::json()},
                      {"approx", to_string(e.approx)},
                      {"at_limit", e.at_limit}});
  }
  r.details["entries"] = values;
  return out;
}

/// Factorization: K / chi_p(-S/h) must not depend on the endpoints.
inline CheckReport check_factorization(const QuadLagrangian& l, const Rational& t_end, const Rational& t_start,
                                       const std::vector<std::pair<Rational, Rational>>& endpoints,
                                       const PhysicsConfig& cfg) {
  CheckReport r;
  r.check = "factorization";
  r.prime = cfg.ctx.prime;
  r.params = detail::common_params(l, cfg);
  r.params["t_end"] = to_string(t_end);
  r.params["t_start"] = to_string(t_start);
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [xe, xs] : endpoints) pts.push_back({to_string(xe), to_string(xs)});
  r.params["endpoints"] = pts;

  const ActionForm f = classical_action(l, t_start, t_end, cfg.ctx);
  std::optional<ExactComplex> first;
  bool equal = true;
  nlohmann::json seen = nlohmann::json::array();
  for (const auto& [xe, xs] : endpoints) {
    const KernelValue k = kernel_from_action(f, xe, xs, cfg);
    const ExactComplex ratio = k.value / ExactComplex::unit(cfg.ctx.prime, chi_p(-f(xe, xs) / cfg.h, cfg.ctx));
    if (!first) first = ratio;
    equal = equal && ratio == *first;
    seen.push_back(to_json(ratio));
  }
  r.expected = first ? to_json(*first) : nlohmann::json();
  r.actual = seen;
  r.equal = equal && first.has_value();
  return r;
}

/// coeff * chi_p(char_slope x) on the ball |x - center|_p <= p^radius_exponent.
struct WaveAtom {
  ApproxComplex coeff{1.0L, 0.0L};
  Rational center{0};
  std::int64_t radius_exponent = 0;
  Rational char_slope{0};

  ApproxComplex operator()(const Rational& x, const PrimeContext& ctx) const {
    if (!valuation_at_least(x - center, -radius_exponent, ctx.prime)) return {0.0L, 0.0L};
    return coeff * chi_p(char_slope * x, ctx).approx();
  }
};

/// Psi(x'', t'') = sum over atoms of the integral of K(x'', t''; x', t') atom(x') dx',
/// each atom integral evaluated by the coset-sum oracle.
inline std::vector<std::pair<Rational, ApproxComplex>> evolve(const std::vector<WaveAtom>& psi,
                                                              const QuadLagrangian& l, const Rational& t_end,
                                                              const Rational& t_start,
                                                              const std::vector<Rational>& sample_points,
                                                              const PhysicsConfig& cfg) {
  const ActionForm f = classical_action(l, t_start, t_end, cfg.ctx);
  const ApproxComplex n = normalization_factor(f, cfg).approx();
  const Rational& h = cfg.h;
  std::vector<std::pair<Rational, ApproxComplex>> out;
  out.reserve(sample_points.size());
  for (const Rational& xe : sample_points) {
    // As a function of x': -(a22 x'^2 + (a12 x'' + b2) x' + a11 x''^2 + b1 x'' + c) / h.
    const Rational alpha = -f.a22 / h;
    const Rational beta_kernel = -(f.a12 * xe + f.b2) / h;
    const ApproxComplex outer = n * chi_p(-(f.a11 * xe * xe + f.b1 * xe + f.c) / h, cfg.ctx).approx();
    ApproxComplex total{0.0L, 0.0L};
    for (const WaveAtom& atom : psi) {
      check_ball_exponent(atom.radius_exponent, cfg.ctx, "atom radius exponent");
      total += atom.coeff * outer *
               ball_gauss_oracle(alpha, beta_kernel + atom.char_slope, atom.center, atom.radius_exponent, cfg.ctx);
    }
    out.emplace_back(xe, total);
  }
  return out;
}

}  // namespace padicprop

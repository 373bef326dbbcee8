#pragma once

/**
 * @file verify.hpp
 * @brief Randomized verification suites over the kernel laws and the
 *        character identities.
 *
 * Every case is generated up front from (seed, suite, prime) and carries its
 * concrete parameters, so a single case can be serialized and replayed on
 * its own. Cases may run on several threads; results are collected by case
 * index, so the report does not depend on the thread count.
 */

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "padicprop/characters.hpp"
#include "padicprop/error.hpp"
#include "padicprop/mechanics.hpp"
#include "padicprop/oracle.hpp"
#include "padicprop/propagator.hpp"
#include "padicprop/random.hpp"

namespace padicprop::verify {

using nlohmann::json;

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"lambda",     "gauss", "composition",   "cocycle",
                                                 "unitarity",  "delta", "factorization", "mechanics"};
  return names;
}

inline bool is_suite(const std::string& name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

inline std::size_t default_case_count(const std::string& suite) {
  if (suite == "lambda") return 200;
  if (suite == "gauss") return 100;
  if (suite == "composition" || suite == "cocycle") return 120;
  if (suite == "unitarity") return 60;
  if (suite == "delta") return 12;
  if (suite == "factorization") return 10;
  return 60;
}

struct Options {
  std::vector<std::int64_t> primes{2, 3, 5, 7};
  std::uint64_t seed = 42;
  std::vector<std::string> suites = suite_names();
  std::size_t cases = 0;  // 0: per-suite default
  FaultInjection faults{};
  int series_order = 24;
  int max_ball_exponent = 12;
  unsigned jobs = 1;
  bool full = false;  // keep every report, not only failures
};

struct CaseSpec {
  std::string suite;
  std::int64_t prime = 2;
  std::size_t index = 0;
  json params;
};

struct CaseOutcome {
  bool pass = false;
  json report;
  std::string error;  // set when the check itself raised
};

inline PrimeContext make_context(std::int64_t prime, const Options& o) {
  PrimeContext ctx(prime, 32, o.max_ball_exponent, o.series_order);
  ctx.faults = o.faults;
  return ctx;
}

inline json to_json(const FaultInjection& f) {
  return {{"lambda_eighths", f.lambda_eighths}, {"drop_linear_action_terms", f.drop_linear_action_terms}};
}

inline FaultInjection faults_from_json(const json& j) {
  FaultInjection f;
  if (j.contains("lambda_eighths")) f.lambda_eighths = j.at("lambda_eighths").get<int>();
  if (j.contains("drop_linear_action_terms")) f.drop_linear_action_terms = j.at("drop_linear_action_terms").get<bool>();
  return f;
}

/// Everything needed to rerun one case in isolation.
inline json replay_record(const CaseSpec& c, const Options& o) {
  return {{"suite", c.suite},
          {"prime", c.prime},
          {"index", c.index},
          {"params", c.params},
          {"faults", to_json(o.faults)},
          {"series_order", o.series_order},
          {"max_ball_exponent", o.max_ball_exponent}};
}

namespace detail {

inline Rational R(const json& j, const char* key) {
  try {
    return parse_rational(j.at(key).get<std::string>());
  } catch (const json::exception&) {
    throw Error(ErrorCode::parse_error, std::string(key) + ": missing or not a string");
  }
}

inline std::string S(const Rational& q) { return to_string(q); }

inline QuadLagrangian sample_closed_form(RationalSampler& rng, std::int64_t p, bool force) {
  const Rational m = rng.with_valuation(p, -2, 2);
  auto l = force ? QuadLagrangian::constant_force(m, rng.with_valuation(p, -2, 2)) : QuadLagrangian::free_particle(m);
  if (rng.coin()) l.B = rng.with_valuation(p, -2, 2);
  if (rng.coin()) l.D = rng.with_valuation(p, -2, 2);
  return l;
}

struct Times {
  Rational t_start, t_mid, t_end;
};

inline Times sample_times(RationalSampler& rng, std::int64_t p, std::int64_t lo, std::int64_t hi, bool zero_start) {
  for (;;) {
    Times t;
    t.t_start = zero_start && rng.coin() ? Rational(0) : rng.with_valuation(p, lo, hi);
    t.t_mid = t.t_start + rng.with_valuation(p, lo, hi);
    t.t_end = t.t_mid + rng.with_valuation(p, lo, hi);
    if (t.t_end != t.t_start && t.t_mid != t.t_start && t.t_end != t.t_mid) return t;
  }
}

/// Oscillator with times inside the convergence disc.
inline std::pair<QuadLagrangian, Times> sample_oscillator(RationalSampler& rng, std::int64_t p) {
  const Rational omega2 = rng.with_valuation(p, -2, 2);
  const auto l = QuadLagrangian::oscillator(rng.with_valuation(p, -1, 1), omega2);
  const std::int64_t r = p == 2 ? 2 : 1;
  const std::int64_t lo = ceil_div(2 * r - *valuation(omega2, p), 2);
  return {l, sample_times(rng, p, lo, lo + 2, true)};
}

inline Rational sample_point(RationalSampler& rng, std::int64_t p) {
  return rng.coin() ? rng.any_nonzero(60) : rng.with_valuation(p, -3, 3);
}

inline json composition_params(RationalSampler& rng, std::int64_t p, std::size_t index) {
  QuadLagrangian l;
  Times t;
  if (index % 6 == 5) {
    std::tie(l, t) = sample_oscillator(rng, p);
  } else {
    l = sample_closed_form(rng, p, index % 2 == 1);
    t = sample_times(rng, p, -2, 2, false);
  }
  return {{"lagrangian", to_json(l)},          {"h", S(rng.with_valuation(p, -2, 2))},
          {"t_start", S(t.t_start)},           {"t_mid", S(t.t_mid)},
          {"t_end", S(t.t_end)},               {"x_start", S(sample_point(rng, p))},
          {"x_end", S(sample_point(rng, p))}};
}

inline json sample_params(const std::string& suite, RationalSampler& rng, std::int64_t p, std::size_t index,
                          const PrimeContext& ctx) {
  if (suite == "lambda") {
    return {{"x", S(rng.with_valuation(p, -4, 4))},
            {"y", S(rng.with_valuation(p, -4, 4))},
            {"a", S(rng.with_valuation(p, -4, 4))}};
  }
  if (suite == "gauss") {
    return {{"alpha", S(rng.with_valuation(p, -3, 3))}, {"beta", S(rng.with_valuation(p, -3, 3))}};
  }
  if (suite == "composition" || suite == "cocycle") return composition_params(rng, p, index);
  if (suite == "unitarity") {
    for (;;) {
      const auto l = sample_closed_form(rng, p, index % 2 == 1);
      const auto t = sample_times(rng, p, -2, 2, false);
      const Rational h = rng.with_valuation(p, -2, 2);
      const Rational xs = sample_point(rng, p);
      const bool diagonal = index % 6 == 5;
      const Rational x = diagonal ? xs : xs + rng.with_valuation(p, -3, 3);
      std::int64_t n_lo = -2, n_hi = 2;
      if (!diagonal) {
        const ActionForm f = classical_action(l, t.t_start, t.t_end, ctx);
        n_lo = *valuation(f.a12 * (x - xs) / h, p) + 1;
        n_hi = std::min<std::int64_t>(n_lo + 4, ctx.max_ball_exponent);
        if (n_lo < -ctx.max_ball_exponent || n_lo > n_hi) continue;
      }
      return {{"lagrangian", to_json(l)}, {"h", S(h)},         {"t_start", S(t.t_start)}, {"t_end", S(t.t_end)},
              {"x_start", S(xs)},         {"x", S(x)},         {"N_min", n_lo},           {"N_max", n_hi}};
    }
  }
  if (suite == "delta") {
    const auto l = QuadLagrangian::free_particle(rng.with_valuation(p, -1, 1));
    const Rational t_end = rng.with_valuation(p, -1, 1);
    const Rational x_end = sample_point(rng, p);
    const std::int64_t N = rng.uniform(-2, 2);
    const bool inside = rng.coin();
    const Rational x_start = x_end + (inside ? rng.with_valuation(p, -N, -N + 2) : rng.with_valuation(p, -N - 3, -N - 1));
    const Rational u = rng.unit(p);
    const std::int64_t k0 = rng.uniform(-1, 1);
    json seq = json::array();
    for (std::int64_t k = 0; k < 8; ++k) seq.push_back(S(t_end - u * rational_pow(p, k0 + k)));
    return {{"lagrangian", to_json(l)}, {"h", S(rng.with_valuation(p, -1, 1))}, {"t_end", S(t_end)},
            {"x_end", S(x_end)},        {"x_start", S(x_start)},                {"N", N},
            {"time_sequence", seq}};
  }
  if (suite == "factorization") {
    const auto l = sample_closed_form(rng, p, index % 2 == 1);
    const auto t = sample_times(rng, p, -2, 2, false);
    json pts = json::array();
    for (int i = 0; i < 12; ++i) pts.push_back({S(sample_point(rng, p)), S(sample_point(rng, p))});
    return {{"lagrangian", to_json(l)}, {"h", S(rng.with_valuation(p, -2, 2))}, {"t_start", S(t.t_start)},
            {"t_end", S(t.t_end)},      {"endpoints", pts}};
  }
  if (suite == "mechanics") {
    QuadLagrangian l;
    Times t;
    if (index % 3 == 2) {
      std::tie(l, t) = sample_oscillator(rng, p);
    } else {
      l = sample_closed_form(rng, p, index % 3 == 1);
      t = sample_times(rng, p, -2, 2, false);
    }
    return {{"lagrangian", to_json(l)},         {"t_start", S(t.t_start)}, {"t_end", S(t.t_end)},
            {"t_probe", S(t.t_mid)},            {"x_start", S(sample_point(rng, p))},
            {"x_end", S(sample_point(rng, p))}};
  }
  throw Error(ErrorCode::parse_error, "suite: unknown suite '" + suite + "'");
}

inline PhysicsConfig physics(const json& params, const PrimeContext& ctx) { return PhysicsConfig(R(params, "h"), ctx); }

inline CaseOutcome run_lambda(const json& params, const PrimeContext& ctx) {
  const Rational x = R(params, "x"), y = R(params, "y"), a = R(params, "a");
  const auto L = [&](const Rational& v) { return lambda_p(v, ctx); };
  const bool zero = L(Rational(0)) == ExactComplex::one(ctx.prime);
  const bool square = L(a * a * x) == L(x);
  const bool unit = L(x).conj() * L(x) == ExactComplex::one(ctx.prime);
  bool third = true;
  json expected, actual;
  if (x + y != 0) {
    const ExactComplex lhs = L(x) * L(y);
    const ExactComplex rhs = L(x + y) * L(1 / x + 1 / y);
    third = lhs == rhs;
    expected = padicprop::to_json(rhs);
    actual = padicprop::to_json(lhs);
  }
  CheckReport r;
  r.check = "lambda";
  r.prime = ctx.prime;
  r.params = params;
  r.expected = expected;
  r.actual = actual;
  r.equal = zero && square && unit && third;
  r.details = {{"lambda_zero", zero}, {"square_invariance", square}, {"sum_identity", third}, {"unit_modulus", unit}};
  return {r.equal, padicprop::to_json(r), {}};
}

inline CaseOutcome run_gauss(const json& params, const PrimeContext& ctx) {
  const Rational alpha = R(params, "alpha"), beta = R(params, "beta");
  const ExactComplex closed = gauss_integral(alpha, beta, ctx);
  const OracleResult oracle = gauss_integral_oracle(alpha, beta, ctx);
  const long double err = std::abs(oracle.value - closed.approx());
  CheckReport r;
  r.check = "gauss";
  r.prime = ctx.prime;
  r.params = params;
  r.expected = padicprop::to_json(closed);
  r.actual = to_string(oracle.value);
  r.mode = "tolerance";
  r.tolerance = 1e-9;
  r.equal = oracle.stabilized && err < 1e-9L;
  r.details = {{"error", static_cast<double>(err)},
               {"N", oracle.ball_exponent},
               {"M", oracle.cell_exponent},
               {"cells", oracle.cells},
               {"stabilized", oracle.stabilized}};
  return {r.equal, padicprop::to_json(r), {}};
}

inline CaseOutcome run_unitarity(const json& params, const PrimeContext& ctx) {
  const auto l = lagrangian_from_json(params.at("lagrangian"));
  const PhysicsConfig cfg = physics(params, ctx);
  const Rational ts = R(params, "t_start"), te = R(params, "t_end"), xs = R(params, "x_start"), x = R(params, "x");
  const auto lo = params.at("N_min").get<std::int64_t>(), hi = params.at("N_max").get<std::int64_t>();
  bool pass = true;
  json per_n = json::array();
  std::optional<std::int64_t> threshold;
  for (std::int64_t N = lo; N <= hi; ++N) {
    const auto u = check_unitarity(l, te, ts, xs, x, N, cfg);
    threshold = u.threshold;
    if (x != xs && (!u.threshold || N < *u.threshold)) pass = false;
    pass = pass && u.report.equal;
    per_n.push_back({{"N", N}, {"value", to_string(u.value)}, {"equal", u.report.equal}});
  }
  CheckReport r;
  r.check = "unitarity";
  r.prime = ctx.prime;
  r.params = params;
  r.expected = x == xs ? json("|a12/h| p^N") : json("0");
  r.actual = per_n;
  r.equal = pass;
  if (threshold) r.details["N0"] = *threshold;
  return {pass, padicprop::to_json(r), {}};
}

/// Second derivative at t of the dropped series term kappa^k t^n / n!.
inline Rational dropped_second_derivative(const BasisSolutions& b, unsigned k, unsigned n, const Rational& t) {
  return padicprop::detail::oscillator_term(b.kappa, k, n).derivative().derivative()(t);
}

inline CaseOutcome run_mechanics(const json& params, const PrimeContext& ctx) {
  const auto l = lagrangian_from_json(params.at("lagrangian"));
  const Rational ts = R(params, "t_start"), te = R(params, "t_end"), tp = R(params, "t_probe");
  const Rational xs = R(params, "x_start"), xe = R(params, "x_end");
  const BasisSolutions b = basis_solutions(l, ctx.series_order, ctx);
  const ClassicalSolution sol = boundary_constants(b, ts, te, xs, xe, ctx);
  const Polynomial q = sol.trajectory();
  const bool endpoints = q(ts) == xs && q(te) == xe;
  const Rational residual = euler_lagrange_residual(b, q, tp, ctx);
  bool residual_ok = false;
  json bound;
  if (b.closed_form()) {
    residual_ok = residual == 0;
    bound = "exact";
  } else {
    // A d'' of the first dropped terms of C1 x1 + C2 x2
    const auto K = static_cast<unsigned>(b.truncation_order);
    const Rational d1 = dropped_second_derivative(b, K, 2 * K, tp);
    const Rational d2 = dropped_second_derivative(b, K, 2 * K + 1, tp);
    const Rational predicted = -l.A * (sol.C1 * d1 + sol.C2 * d2);
    residual_ok = residual == predicted;
    bound = valuation(predicted, ctx) ? json(*valuation(predicted, ctx)) : json("inf");
  }
  bool additive = true;
  if (b.closed_form()) {
    const ActionForm early = classical_action(l, ts, tp, ctx), late = classical_action(l, tp, te, ctx);
    additive = compose_actions(late, early) == classical_action(l, ts, te, ctx);
  }
  CheckReport r;
  r.check = "mechanics";
  r.prime = ctx.prime;
  r.params = params;
  r.expected = {{"residual_valuation_at_least", bound}};
  r.actual = {{"residual", to_string(residual)}};
  r.mode = b.closed_form() ? "exact" : "tolerance";
  if (!b.closed_form()) r.tolerance = bound;
  r.equal = endpoints && residual_ok && additive;
  r.details = {{"endpoints", endpoints}, {"residual", residual_ok}, {"additivity", additive}};
  return {r.equal, padicprop::to_json(r), {}};
}

}  // namespace detail

/// Runs one case from its concrete parameters.
inline CaseOutcome run_case(const CaseSpec& c, const PrimeContext& ctx) {
  try {
    const json& p = c.params;
    if (c.suite == "lambda") return detail::run_lambda(p, ctx);
    if (c.suite == "gauss") return detail::run_gauss(p, ctx);
    if (c.suite == "unitarity") return detail::run_unitarity(p, ctx);
    if (c.suite == "mechanics") return detail::run_mechanics(p, ctx);

    const auto l = lagrangian_from_json(p.at("lagrangian"));
    const PhysicsConfig cfg = detail::physics(p, ctx);
    CheckReport r;
    if (c.suite == "composition") {
      r = check_composition(l, detail::R(p, "t_end"), detail::R(p, "t_mid"), detail::R(p, "t_start"),
                            detail::R(p, "x_end"), detail::R(p, "x_start"), cfg);
    } else if (c.suite == "cocycle") {
      r = check_cocycle(l, detail::R(p, "t_end"), detail::R(p, "t_mid"), detail::R(p, "t_start"), cfg);
    } else if (c.suite == "delta") {
      std::vector<Rational> seq;
      for (const auto& t : p.at("time_sequence")) seq.push_back(parse_rational(t.get<std::string>()));
      r = check_delta_limit(l, detail::R(p, "t_end"), detail::R(p, "x_end"), detail::R(p, "x_start"), seq,
                            p.at("N").get<std::int64_t>(), cfg)
              .report;
    } else if (c.suite == "factorization") {
      std::vector<std::pair<Rational, Rational>> pts;
      for (const auto& e : p.at("endpoints")) {
        pts.emplace_back(parse_rational(e.at(0).get<std::string>()), parse_rational(e.at(1).get<std::string>()));
      }
      r = check_factorization(l, detail::R(p, "t_end"), detail::R(p, "t_start"), pts, cfg);
    } else {
      throw Error(ErrorCode::parse_error, "suite: unknown suite '" + c.suite + "'");
    }
    return {r.equal, padicprop::to_json(r), {}};
  } catch (const Error& e) {
    return {false, json{{"check", c.suite}, {"prime", c.prime}, {"params", c.params}, {"error", e.what()}}, e.what()};
  }
}

/// Reruns a case from its replay record.
inline CaseOutcome replay(const json& record) {
  CaseSpec c;
  try {
    c.suite = record.at("suite").get<std::string>();
    c.prime = record.at("prime").get<std::int64_t>();
    c.index = record.value("index", std::size_t{0});
    c.params = record.at("params");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("replay: ") + e.what());
  }
  if (!is_suite(c.suite)) throw Error(ErrorCode::parse_error, "replay.suite: unknown suite '" + c.suite + "'");
  PrimeContext ctx(c.prime, 32, record.value("max_ball_exponent", 12), record.value("series_order", 24));
  if (record.contains("faults")) ctx.faults = faults_from_json(record.at("faults"));
  return run_case(c, ctx);
}

/// The case list of one suite at one prime, drawn from (seed, suite, prime).
inline std::vector<CaseSpec> generate_cases(const std::string& suite, std::int64_t prime, const Options& o) {
  if (!is_suite(suite)) throw Error(ErrorCode::parse_error, "suite: unknown suite '" + suite + "'");
  const std::size_t n = o.cases ? o.cases : default_case_count(suite);
  // composition and cocycle share their samples
  RationalSampler rng(o.seed, suite == "cocycle" ? std::string("composition") : suite, prime);
  PrimeContext ctx(prime, 32, o.max_ball_exponent, o.series_order);
  std::vector<CaseSpec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({suite, prime, i, detail::sample_params(suite, rng, prime, i, ctx)});
  return out;
}

struct SuiteResult {
  std::string suite;
  std::size_t cases = 0;
  std::size_t passed = 0;
  json failures = json::array();
  json reports = json::array();

  bool ok() const { return passed == cases; }
};

inline json to_json(const SuiteResult& s) {
  json j = {{"suite", s.suite}, {"cases", s.cases}, {"passed", s.passed}, {"failed", s.cases - s.passed},
            {"failures", s.failures}};
  if (!s.reports.empty()) j["reports"] = s.reports;
  return j;
}

/// Evaluates cases on up to `jobs` threads; outcome i belongs to case i.
inline std::vector<CaseOutcome> run_cases(const std::vector<CaseSpec>& cases, const Options& o) {
  std::vector<CaseOutcome> out(cases.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) out[i] = run_case(cases[i], make_context(cases[i].prime, o));
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(cases.size())));
  if (jobs == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

inline SuiteResult run_suite(const std::string& suite, const Options& o) {
  std::vector<CaseSpec> cases;
  for (std::int64_t p : o.primes) {
    auto more = generate_cases(suite, p, o);
    cases.insert(cases.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  }
  const auto outcomes = run_cases(cases, o);
  SuiteResult s;
  s.suite = suite;
  s.cases = cases.size();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (outcomes[i].pass) {
      ++s.passed;
    } else {
      s.failures.push_back({{"index", cases[i].index},
                            {"prime", cases[i].prime},
                            {"report", outcomes[i].report},
                            {"replay", replay_record(cases[i], o)}});
    }
    if (o.full) s.reports.push_back(outcomes[i].report);
  }
  return s;
}

struct VerifyResult {
  std::vector<SuiteResult> suites;
  bool ok() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.ok(); });
  }
};

inline json to_json(const VerifyResult& v, const Options& o) {
  json suites = json::array();
  for (const auto& s : v.suites) suites.push_back(to_json(s));
  return {{"seed", o.seed},
          {"primes", o.primes},
          {"faults", to_json(o.faults)},
          {"series_order", o.series_order},
          {"max_ball_exponent", o.max_ball_exponent},
          {"passed", v.ok()},
          {"suites", suites}};
}

inline VerifyResult run(const Options& o) {
  VerifyResult v;
  for (const auto& s : o.suites) v.suites.push_back(run_suite(s, o));
  return v;
}

}  // namespace padicprop::verify

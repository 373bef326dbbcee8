// padicprop: evaluate p-adic propagators, run the verification suites and
// emit JSON / TSV / text reports.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "padicprop/padicprop.hpp"

namespace {

using nlohmann::json;
using namespace padicprop;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path, const char* field) {
  std::ifstream in(path);
  if (!in) throw Usage(std::string(field) + ": cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Inline JSON when the argument starts with '{' or '[', otherwise a path.
json read_json_argument(const std::string& arg, const char* field) {
  const std::string trimmed = padicprop::detail::trim(arg);
  const bool inline_json = !trimmed.empty() && (trimmed[0] == '{' || trimmed[0] == '[');
  const std::string text = inline_json ? trimmed : read_file(arg, field);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string(field) + ": " + e.what());
  }
}

Rational rational_field(const std::string& text, const char* field) {
  try {
    return parse_rational(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, std::string(field) + ": " + e.what());
  }
}

std::string long_double_string(long double x) {
  std::ostringstream ss;
  ss << std::setprecision(17) << static_cast<double>(x);
  return ss.str();
}

// ---------------------------------------------------------------------------
// Flags

struct RawFlags {
  std::vector<std::int64_t> primes;
  std::string lagrangian, h, t1, t2, x1, x2;
  std::vector<std::string> suites;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  std::string format = "text";
  int series_order = 24;
  int ball_max = 12;

  std::size_t cases = 0;
  std::string inject_fault;
  std::string replay;
  unsigned jobs = 1;
  bool full = false;
  std::int64_t k_min = -1, k_max = 3;
  std::string atoms;
  std::vector<std::string> points;

  std::string spec_file;
  bool dump_spec = false;
};

void add_common(CLI::App* app, RawFlags& f) {
  app->add_option("-p,--prime", f.primes, "prime (repeatable; default 2,3,5,7)")->delimiter(',');
  app->add_option("--lagrangian", f.lagrangian, "Lagrangian as inline JSON or a file path");
  app->add_option("--h", f.h, "Planck constant (rational, default 1)");
  app->add_option("--t1", f.t1, "initial time t'");
  app->add_option("--t2", f.t2, "final time t''");
  app->add_option("--x1", f.x1, "initial position x'");
  app->add_option("--x2", f.x2, "final position x''");
  app->add_option("--suite", f.suites, "suites, comma separated")->delimiter(',');
  app->add_option("--seed", f.seed, "seed for random cases (default 42; PADIC_SEED overrides)");
  app->add_option("--out", f.out, "output path, - for stdout");
  app->add_option("--format", f.format, "json, tsv or text")->check(CLI::IsMember({"json", "tsv", "text"}));
  app->add_option("--series-order", f.series_order, "oscillator series order");
  app->add_option("--ball-max", f.ball_max, "largest admissible ball exponent");
  app->add_option("--spec", f.spec_file, "load the run from a RunSpec JSON file");
  app->add_flag("--dump-spec", f.dump_spec, "print the parsed RunSpec as JSON and exit");
}

RunSpec build_spec(const std::string& command, const RawFlags& f) {
  RunSpec s;
  if (!f.spec_file.empty()) {
    s = run_spec_from_json(read_json_argument(f.spec_file, "spec"));
  } else {
    s.command = command;
    if (!f.primes.empty()) s.primes = f.primes;
    if (!f.lagrangian.empty()) s.lagrangian = lagrangian_from_json(read_json_argument(f.lagrangian, "lagrangian"));
    if (!f.h.empty()) s.h = rational_field(f.h, "h");
    if (!f.t1.empty()) s.t1 = rational_field(f.t1, "t1");
    if (!f.t2.empty()) s.t2 = rational_field(f.t2, "t2");
    if (!f.x1.empty()) s.x1 = rational_field(f.x1, "x1");
    if (!f.x2.empty()) s.x2 = rational_field(f.x2, "x2");
    s.suites = f.suites;
    if (f.seed) s.seed = *f.seed;
    s.out = f.out;
    s.format = f.format;
    s.series_order = f.series_order;
    s.ball_max = f.ball_max;
    s.cases = f.cases;
    if (f.inject_fault == "lambda") s.faults.lambda_eighths = 1;
    if (f.inject_fault == "action") s.faults.drop_linear_action_terms = true;
    s.jobs = f.jobs;
    s.full = f.full;
    s.k_min = f.k_min;
    s.k_max = f.k_max;
    if (!f.atoms.empty()) s.atoms = read_json_argument(f.atoms, "atoms");
    for (const auto& x : f.points) s.points.push_back(rational_field(x, "points"));
  }
  if (const char* env = std::getenv("PADIC_SEED"); env != nullptr && *env != '\0') {
    const std::string text(env);
    if (text.find_first_not_of("0123456789") != std::string::npos || text.size() > 19) {
      throw Usage("PADIC_SEED: expected a non-negative integer, got '" + text + "'");
    }
    s.seed = std::stoull(text);
  }
  s.validate();
  return s;
}

const Rational& required(const std::optional<Rational>& v, const char* field) {
  if (!v) throw Usage(std::string("missing required field --") + field);
  return *v;
}

PrimeContext context_for(std::int64_t p, const RunSpec& s) { return PrimeContext(p, 32, s.ball_max, s.series_order); }

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const RunSpec& s, std::ostream& out) {
  const Rational& t1 = required(s.t1, "t1");
  const Rational& t2 = required(s.t2, "t2");
  const Rational& x1 = required(s.x1, "x1");
  const Rational& x2 = required(s.x2, "x2");

  std::vector<KernelValue> values;
  std::vector<ExactComplex> factors;
  for (auto p : s.primes) {
    const PhysicsConfig cfg(s.h, context_for(p, s));
    values.push_back(propagator(s.lagrangian, t2, t1, x2, x1, cfg));
    factors.push_back(normalization_factor(values.back().action, cfg));
  }

  if (s.format == "json") {
    json results = json::array();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& k = values[i];
      json j = to_json(k);
      j["prime"] = k.value.prime();
      j["normalization"] = to_json(factors[i]);
      j["modulus_squared"] = to_string(k.value.modulus_squared());
      results.push_back(j);
    }
    out << json{{"command", "eval"}, {"lagrangian", to_json(s.lagrangian)}, {"h", to_string(s.h)}, {"results", results}}
               .dump(2)
        << "\n";
  } else if (s.format == "tsv") {
    out << "prime\tscalar\thalf_power\tphase\tmodulus_squared\ta11\ta12\ta22\tb1\tb2\tc\n";
    for (const auto& k : values) {
      const auto& f = k.action;
      out << k.value.prime() << '\t' << to_string(k.value.scalar()) << '\t' << k.value.half_power() << '\t'
          << to_string(k.value.phase().turns()) << '\t' << to_string(k.value.modulus_squared()) << '\t'
          << to_string(f.a11) << '\t' << to_string(f.a12) << '\t' << to_string(f.a22) << '\t' << to_string(f.b1)
          << '\t' << to_string(f.b2) << '\t' << to_string(f.c) << '\n';
    }
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& k = values[i];
      const auto& f = k.action;
      out << "p = " << k.value.prime() << "\n"
          << "  K_p      = " << to_string(k.value) << "\n"
          << "  lambda_p(-a12/2h) |a12/h|_p^(1/2) = " << to_string(factors[i]) << "\n"
          << "  chi_p(-S/h) = e^(2πi·" << to_string((k.value / factors[i]).phase().turns()) << ")\n"
          << "  |K_p|^2  = " << to_string(k.value.modulus_squared()) << "\n"
          << "  S(x'', x') = " << to_string(f(x2, x1)) << "\n"
          << "  action   a11 = " << to_string(f.a11) << ", a12 = " << to_string(f.a12)
          << ", a22 = " << to_string(f.a22) << ", b1 = " << to_string(f.b1) << ", b2 = " << to_string(f.b2)
          << ", c = " << to_string(f.c) << "\n";
      if (f.guaranteed_valuation) out << "  exact to valuation " << *f.guaranteed_valuation << "\n";
    }
  }
  return kExitPass;
}

// ---------------------------------------------------------------------------
// verify

int cmd_replay(const std::string& path, const RunSpec& s, std::ostream& out) {
  json record = read_json_argument(path, "replay");
  if (record.contains("replay")) record = record.at("replay");
  const auto outcome = verify::replay(record);
  json j = {{"pass", outcome.pass}, {"report", outcome.report}};
  if (!outcome.error.empty()) j["error"] = outcome.error;
  if (s.format == "text") {
    out << (outcome.pass ? "PASS" : "FAIL") << " " << record.value("suite", "") << " p=" << record.value("prime", 0)
        << " index=" << record.value("index", 0) << "\n"
        << outcome.report.dump() << "\n";
  } else {
    out << j.dump(2) << "\n";
  }
  return outcome.pass ? kExitPass : kExitFail;
}

int cmd_verify(const RunSpec& s, std::ostream& out) {
  verify::Options o;
  o.primes = s.primes;
  o.seed = s.seed;
  if (!s.suites.empty()) o.suites = s.suites;
  o.cases = s.cases;
  o.faults = s.faults;
  o.series_order = s.series_order;
  o.max_ball_exponent = s.ball_max;
  o.jobs = s.jobs;
  o.full = s.full;

  const auto result = verify::run(o);
  if (s.format == "json") {
    out << to_json(result, o).dump(2) << "\n";
  } else if (s.format == "tsv") {
    out << "suite\tcases\tpassed\tfailed\n";
    for (const auto& r : result.suites) out << r.suite << '\t' << r.cases << '\t' << r.passed << '\t' << r.cases - r.passed << '\n';
  } else {
    out << "seed " << o.seed << "\nprimes";
    for (auto p : o.primes) out << " " << p;
    out << "\n";
    for (const auto& r : result.suites) {
      out << std::left << std::setw(14) << r.suite << std::right << std::setw(6) << r.passed << "/" << r.cases
          << (r.ok() ? "  ok" : "  FAILED") << "\n";
      for (const auto& f : r.failures) out << "  replay " << f.at("replay").dump() << "\n";
    }
    out << (result.ok() ? "PASS" : "FAIL") << "\n";
  }
  if (!result.ok()) {
    std::size_t failed = 0;
    for (const auto& r : result.suites) failed += r.cases - r.passed;
    std::cerr << "padicprop: " << failed << " check(s) failed (seed " << o.seed << ")\n";
  }
  return result.ok() ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// evolve

WaveAtom atom_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "atoms: each atom must be an object");
  WaveAtom a;
  try {
    if (j.contains("coeff")) {
      const auto& c = j.at("coeff");
      if (c.is_array()) {
        a.coeff = {c.at(0).get<long double>(), c.at(1).get<long double>()};
      } else {
        a.coeff = {c.get<long double>(), 0.0L};
      }
    }
    if (j.contains("center")) a.center = rational_field(j.at("center").get<std::string>(), "atoms.center");
    a.radius_exponent = j.value("radius_exponent", std::int64_t{0});
    if (j.contains("char_slope")) a.char_slope = rational_field(j.at("char_slope").get<std::string>(), "atoms.char_slope");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("atoms: ") + e.what());
  }
  return a;
}

int cmd_evolve(const RunSpec& s, std::ostream& out) {
  const Rational& t1 = required(s.t1, "t1");
  const Rational& t2 = required(s.t2, "t2");
  std::vector<WaveAtom> psi;
  if (s.atoms.is_array() && !s.atoms.empty()) {
    for (const auto& a : s.atoms) psi.push_back(atom_from_json(a));
  } else if (s.atoms.is_object()) {
    psi.push_back(atom_from_json(s.atoms));
  } else {
    psi.push_back(WaveAtom{});  // indicator of Z_p
  }
  std::vector<Rational> points = s.points;
  if (points.empty()) points.push_back(s.x2.value_or(Rational(0)));

  json rows = json::array();
  if (s.format == "tsv") out << "prime\tpoint\tre\tim\tabs\n";
  for (auto p : s.primes) {
    const auto values = evolve(psi, s.lagrangian, t2, t1, points, PhysicsConfig(s.h, context_for(p, s)));
    for (const auto& [x, z] : values) {
      const std::string re = long_double_string(z.real()), im = long_double_string(z.imag()),
                        mod = long_double_string(std::abs(z));
      if (s.format == "json") {
        rows.push_back({{"prime", p}, {"point", to_string(x)}, {"re", re}, {"im", im}, {"abs", mod}});
      } else if (s.format == "tsv") {
        out << p << '\t' << to_string(x) << '\t' << re << '\t' << im << '\t' << mod << '\n';
      } else {
        out << "p = " << p << "  Psi(" << to_string(x) << ") = " << re << " + " << im << "i  |Psi| = " << mod << "\n";
      }
    }
  }
  if (s.format == "json") out << json{{"command", "evolve"}, {"rows", rows}}.dump(2) << "\n";
  return kExitPass;
}

// ---------------------------------------------------------------------------
// table

int cmd_table(const RunSpec& s, std::ostream& out) {
  if (s.k_min > s.k_max) {
    throw Usage("empty sweep: k-min " + std::to_string(s.k_min) + " > k-max " + std::to_string(s.k_max));
  }
  const Rational t1 = s.t1.value_or(Rational(0));
  const Rational x1 = s.x1.value_or(Rational(0));
  const Rational x2 = s.x2.value_or(Rational(0));

  json rows = json::array();
  std::vector<std::string> warnings;
  if (s.format == "tsv") out << "prime\tk\tT\tstatus\tmodulus_squared\tmodulus\tphase\n";
  for (auto p : s.primes) {
    const PhysicsConfig cfg(s.h, context_for(p, s));
    for (std::int64_t k = s.k_min; k <= s.k_max; ++k) {
      const Rational T = rational_pow(p, k);
      json row = {{"prime", p}, {"k", k}, {"T", to_string(T)}};
      try {
        const auto kv = propagator(s.lagrangian, t1 + T, t1, x2, x1, cfg);
        const auto& z = kv.value;
        row["status"] = "ok";
        row["modulus_squared"] = to_string(z.modulus_squared());
        row["modulus"] = to_string(z.scalar()) + " · " + std::to_string(p) + "^(" + std::to_string(z.half_power()) + "/2)";
        row["phase"] = to_string(z.phase().turns());
      } catch (const Error& e) {
        row["status"] = std::string(to_string(e.code()));
        row["modulus_squared"] = nullptr;
        row["modulus"] = nullptr;
        row["phase"] = nullptr;
        warnings.push_back("p=" + std::to_string(p) + " k=" + std::to_string(k) + ": " + e.what());
      }
      if (s.format == "tsv") {
        const auto cell = [&](const char* key) { return row[key].is_null() ? std::string("-") : row[key].get<std::string>(); };
        out << p << '\t' << k << '\t' << row["T"].get<std::string>() << '\t' << row["status"].get<std::string>() << '\t'
            << cell("modulus_squared") << '\t' << cell("modulus") << '\t' << cell("phase") << '\n';
      } else if (s.format == "text") {
        out << "p = " << p << "  k = " << std::setw(3) << k << "  T = " << row["T"].get<std::string>() << "  ";
        if (row["status"] == "ok") {
          out << "|K|^2 = " << row["modulus_squared"].get<std::string>() << "  |K| = " << row["modulus"].get<std::string>()
              << "  phase = " << row["phase"].get<std::string>() << "\n";
        } else {
          out << "status = " << row["status"].get<std::string>() << "\n";
        }
      }
      rows.push_back(std::move(row));
    }
  }
  if (s.format == "json") out << json{{"command", "table"}, {"rows", rows}, {"warnings", warnings}}.dump(2) << "\n";
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return kExitPass;
}

int dispatch(const RunSpec& s, std::ostream& out, const std::string& replay) {
  if (s.command == "eval") return cmd_eval(s, out);
  if (s.command == "verify") return replay.empty() ? cmd_verify(s, out) : cmd_replay(replay, s, out);
  if (s.command == "evolve") return cmd_evolve(s, out);
  return cmd_table(s, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact p-adic Feynman propagators for quadratic Lagrangians"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(0, 1);
  RawFlags flags;

  app.add_option("--spec", flags.spec_file, "run a RunSpec JSON file");
  app.add_flag("--dump-spec", flags.dump_spec, "print the parsed RunSpec as JSON and exit");

  auto* eval = app.add_subcommand("eval", "evaluate K_p(x'', t''; x', t')");
  add_common(eval, flags);

  auto* ver = app.add_subcommand("verify", "run verification suites");
  add_common(ver, flags);
  ver->add_option("--cases", flags.cases, "cases per suite and prime (0: suite default)");
  ver->add_option("--inject-fault", flags.inject_fault, "corrupt lambda or the action terms")
      ->check(CLI::IsMember({"lambda", "action"}));
  ver->add_option("--replay", flags.replay, "rerun one serialized case");
  ver->add_option("--jobs", flags.jobs, "worker threads");
  ver->add_flag("--full", flags.full, "include every report, not only failures");

  auto* evo = app.add_subcommand("evolve", "evolve a wave function built from ball atoms");
  add_common(evo, flags);
  evo->add_option("--atoms", flags.atoms, "atoms as inline JSON or a file path");
  evo->add_option("--points", flags.points, "sample points x''")->delimiter(',');

  auto* table = app.add_subcommand("table", "sweep T = p^k and tabulate |K_p| and its phase");
  add_common(table, flags);
  table->add_option("--k-min", flags.k_min, "first exponent (default -1)");
  table->add_option("--k-max", flags.k_max, "last exponent (default 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  std::string command;
  for (const auto* sub : {eval, ver, evo, table}) {
    if (sub->parsed()) command = sub->get_name();
  }
  if (command.empty() && flags.spec_file.empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    const RunSpec spec = build_spec(command, flags);
    if (flags.dump_spec) {
      std::cout << to_json(spec).dump(2) << "\n";
      return kExitPass;
    }
    if (spec.out == "-") return dispatch(spec, std::cout, flags.replay);
    std::ofstream file(spec.out);
    if (!file) throw Usage("out: cannot open '" + spec.out + "' for writing");
    return dispatch(spec, file, flags.replay);
  } catch (const Usage& e) {
    std::cerr << "error [usage]: " << e.what() << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

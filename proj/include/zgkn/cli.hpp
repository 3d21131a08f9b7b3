#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zgkn/eigenmaps.hpp"
#include "zgkn/errors.hpp"
#include "zgkn/flows.hpp"
#include "zgkn/io.hpp"
#include "zgkn/model.hpp"
#include "zgkn/orbits.hpp"
#include "zgkn/parallel.hpp"
#include "zgkn/spectrum.hpp"
#include "zgkn/validate.hpp"
#include "zgkn/wavefunction.hpp"

namespace zgkn::cli {

enum class Command { Solve, Scan, Portrait, Validate, Explore };
using Format = io::Table::Format;

constexpr std::string_view to_string(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Scan: return "scan";
    case Command::Portrait: return "portrait";
    case Command::Validate: return "validate";
    case Command::Explore: return "explore";
  }
  return "?";
}

struct ScanRanges {
  std::string table = "pairs";  // lambda | energy | pairs
  std::vector<double> a, gamma, E;
  std::optional<std::vector<double>> lambda;  // default: 9 points on [-1-a, -1+a] per a
};

struct PortraitTarget {
  FlowKind kind = FlowKind::Theta;
  double E = 0.0, lambda = 0.0;
  int grid = 400;
};

struct RunConfig {
  Command command = Command::Solve;
  ModelParams params;
  IntegratorControls controls;
  int max_iter = 50;
  std::string output_path;  // empty: stdout
  Format format = Format::Json;
  std::optional<ScanRanges> scan;
  std::optional<PortraitTarget> portrait;
  std::string profiles_prefix;  // solve: write <prefix>_radial.csv and <prefix>_angular.csv
  ExploreOptions explore;
  std::string help;  // non-empty: print and exit 0
};

namespace detail {

inline double parse_double(const std::string& s, const std::string& what) {
  double v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  while (e > b && e[-1] == ' ') --e;
  if (b < e && *b == '+') ++b;
  auto res = std::from_chars(b, e, v);
  if (b == e || res.ec != std::errc() || res.ptr != e) throw UsageError(what + ": not a number: '" + s + "'");
  return v;
}

/// "lo:hi:n" or a comma list.
inline std::vector<double> parse_grid(const std::string& s, const std::string& what) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string t; std::getline(ss, t, ':');) parts.push_back(t);
    if (parts.size() != 3) throw UsageError(what + ": expected lo:hi:n");
    const double lo = parse_double(parts[0], what), hi = parse_double(parts[1], what);
    const double nd = parse_double(parts[2], what);
    if (nd < 1 || nd != std::floor(nd) || nd > 1e6) throw UsageError(what + ": n must be a positive integer");
    const int n = static_cast<int>(nd);
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : (i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1)));
    return out;
  }
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, ',');) out.push_back(parse_double(t, what));
  if (out.empty()) throw UsageError(what + ": empty grid");
  return out;
}

/// key=value lines, '#' starts a comment. Keys are option names without dashes.
inline std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  int line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    std::replace(k.begin(), k.end(), '_', '-');
    if (k.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(k, v);
  }
  return out;
}

struct RawOptions {
  double a = 0, m = 0, e = 0, Q = 0, I = 0, gamma = 0, kappa = 0, tol = 0, rmax = 0;
  int max_iter = 50;
  std::string out, format, config, profiles;
  // scan
  std::string table = "pairs", a_grid, gamma_grid, E_grid, lambda_grid;
  // portrait
  std::string flow;
  double E = 0, lambda = 0;
  int grid = 400;
  // explore
  int nE = 40, nl = 40;
};

struct Parser {
  CLI::App app{"Ground-state solver for the Dirac equation on the zero-gravity Kerr-Newman background", "zgkn"};
  RawOptions raw;
  std::map<std::string, CLI::App*> subs;

  Parser() {
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all", "Help for every command");
    add("solve", "Solve for the ground eigenpair (E, lambda)");
    add("scan", "Tabulate the Lambda(E) and E(lambda) maps or eigenpairs over grids");
    add("portrait", "Nullclines and distinguished orbits of the Theta or Omega flow");
    add("validate", "Run the invariant suite; exit 0 iff every check passes");
    add("explore", "List candidate excited pairs from a coarse grid (not certified)");

    auto* sc = subs["scan"];
    sc->add_option("--table", raw.table, "lambda | energy | pairs")
        ->check(CLI::IsMember({"lambda", "energy", "pairs"}));
    sc->add_option("--a-grid", raw.a_grid, "a values: lo:hi:n or comma list (normalized units)");
    sc->add_option("--gamma-grid", raw.gamma_grid, "gamma values: lo:hi:n or comma list");
    sc->add_option("--E-grid", raw.E_grid, "E values for --table lambda (default 0:1:17)");
    sc->add_option("--lambda-grid", raw.lambda_grid, "lambda values for --table energy (default 9 points on [-1-a,-1+a])");

    auto* po = subs["portrait"];
    po->add_option("flow", raw.flow, "theta | omega")->required()->check(CLI::IsMember({"theta", "omega"}));
    po->add_option("--E", raw.E, "energy")->required();
    po->add_option("--lambda", raw.lambda, "separation constant")->required();
    po->add_option("--grid", raw.grid, "nullcline columns")->check(CLI::Range(16, 100000));

    subs["solve"]->add_option("--profiles", raw.profiles, "write <prefix>_radial.csv and <prefix>_angular.csv");

    auto* ex = subs["explore"];
    ex->add_option("--nE", raw.nE, "grid cells in E")->check(CLI::Range(2, 10000));
    ex->add_option("--nl", raw.nl, "grid cells in lambda")->check(CLI::Range(2, 10000));
  }

  void add(const std::string& name, const std::string& desc) {
    auto* s = app.add_subcommand(name, desc);
    s->add_option("--a", raw.a, "ring radius");
    s->add_option("--m", raw.m, "fermion mass");
    s->add_option("--e", raw.e, "fermion charge");
    s->add_option("--Q", raw.Q, "ring charge");
    s->add_option("--I", raw.I, "ring current (default Q/(pi a))");
    s->add_option("--gamma", raw.gamma, "coupling; sets Q = -gamma/e");
    s->add_option("--kappa", raw.kappa, "azimuthal quantum number (half-integer)");
    s->add_option("--tol", raw.tol, "integrator relative tolerance")->check(CLI::PositiveNumber);
    s->add_option("--max-iter", raw.max_iter, "fixed-point iteration budget")->check(CLI::Range(1, 100000));
    s->add_option("--rmax", raw.rmax, "radial cutoff (0 = automatic)")->check(CLI::NonNegativeNumber);
    s->add_option("--out", raw.out, "output file (default stdout)");
    s->add_option("--format", raw.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("--config", raw.config, "key=value file; flags take precedence");
    subs[name] = s;
  }

  CLI::App* chosen() const {
    for (auto& [n, s] : subs)
      if (s->parsed()) return s;
    return nullptr;
  }

  // throws UsageError; returns false after --help
  bool parse(std::vector<std::string> args, std::string& help) {
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      std::ostringstream o, er;
      const int code = app.exit(e, o, er);
      if (code == 0) {
        help = o.str();
        return false;
      }
      throw UsageError(e.what());
    }
    return true;
  }
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Parses argv (without the program name). An explicit file_text replaces --config.
inline RunConfig parse_config(const std::vector<std::string>& args,
                              const std::optional<std::string>& file_text = std::nullopt) {
  RunConfig cfg;
  detail::Parser first;
  if (!first.parse(args, cfg.help)) return cfg;
  CLI::App* sub = first.chosen();
  const std::string name = sub->get_name();

  std::optional<std::string> text = file_text;
  if (!text && !first.raw.config.empty()) text = detail::read_file(first.raw.config);

  std::vector<std::string> merged = args;
  if (text) {
    std::set<std::string> seen;
    for (const auto& [k, v] : detail::parse_kv(*text)) {
      if (k == "config") throw UsageError("config: nested config files are not supported");
      const CLI::Option* opt = nullptr;
      try {
        opt = sub->get_option("--" + k);
      } catch (const CLI::OptionNotFound&) {
      }
      if (!opt) throw UsageError("config: unknown key '" + k + "' for " + name);
      if (!seen.insert(k).second) throw UsageError("config: duplicate key '" + k + "'");
      if (opt->count() > 0) continue;  // the flag wins
      if (k == "Q" && sub->count("--gamma") > 0) continue;
      if (k == "gamma" && sub->count("--Q") > 0) continue;
      merged.push_back("--" + k);
      merged.push_back(v);
    }
  }

  detail::Parser p;
  std::string ignored;
  p.parse(merged, ignored);
  sub = p.chosen();
  const auto& r = p.raw;
  auto given = [&](const char* flag) { return sub->count(flag) > 0; };

  static const std::map<std::string, Command> cmds{{"solve", Command::Solve},
                                                   {"scan", Command::Scan},
                                                   {"portrait", Command::Portrait},
                                                   {"validate", Command::Validate},
                                                   {"explore", Command::Explore}};
  cfg.command = cmds.at(name);

  if (given("--gamma") && given("--Q")) throw UsageError("conflicting flags: --gamma and --Q");
  ModelParams& mp = cfg.params;
  if (given("--a")) mp.a = r.a;
  if (given("--m")) mp.m = r.m;
  if (given("--e")) mp.e = r.e;
  if (given("--Q")) mp.Q = r.Q;
  if (given("--gamma")) {
    if (mp.e == 0) throw UsageError("--gamma needs a nonzero --e");
    mp.Q = -r.gamma / mp.e;
  }
  mp.I = given("--I") ? r.I : (mp.a != 0 ? mp.Q / (M_PI * mp.a) : 0.0);
  if (given("--kappa")) {
    if (!is_half_integer(r.kappa)) {
      std::ostringstream os;
      os << "--kappa " << r.kappa << " is not a half-integer";
      throw UsageError(os.str());
    }
    mp.kappa = r.kappa;
  }
  if (given("--tol")) {
    cfg.controls.rel_tol = r.tol;
    cfg.controls.abs_tol = r.tol * 1e-2;
  }
  if (given("--rmax")) cfg.controls.r_max = r.rmax;
  cfg.max_iter = r.max_iter;
  cfg.output_path = r.out;
  cfg.format = (cfg.command == Command::Scan || cfg.command == Command::Portrait || cfg.command == Command::Explore)
                   ? Format::Csv
                   : Format::Json;
  if (given("--format")) cfg.format = r.format == "csv" ? Format::Csv : Format::Json;

  if (cfg.command == Command::Scan) {
    ScanRanges s;
    s.table = r.table;
    const double a0 = mp.m * mp.a, g0 = -mp.e * mp.Q;
    s.a = given("--a-grid") ? detail::parse_grid(r.a_grid, "--a-grid") : std::vector<double>{a0};
    s.gamma = given("--gamma-grid") ? detail::parse_grid(r.gamma_grid, "--gamma-grid") : std::vector<double>{g0};
    s.E = given("--E-grid") ? detail::parse_grid(r.E_grid, "--E-grid") : detail::parse_grid("0:1:17", "--E-grid");
    if (given("--lambda-grid")) s.lambda = detail::parse_grid(r.lambda_grid, "--lambda-grid");
    cfg.scan = s;
  }
  if (cfg.command == Command::Portrait) {
    cfg.portrait = PortraitTarget{r.flow == "omega" ? FlowKind::Omega : FlowKind::Theta, r.E, r.lambda, r.grid};
  }
  if (cfg.command == Command::Solve) cfg.profiles_prefix = r.profiles;
  if (cfg.command == Command::Explore) {
    cfg.explore.nE = r.nE;
    cfg.explore.nl = r.nl;
  }
  return cfg;
}

inline RunConfig parse_config(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return parse_config(args);
}

namespace detail {

inline NormalizedParams prepare(const RunConfig& cfg, bool require_admissible) {
  const auto c = canonicalize(cfg.params);
  if (require_admissible) {
    const auto adm = check_admissibility(c.params);
    if (!adm.ok()) {
      std::string msg;
      for (const auto& m : adm.messages) msg += (msg.empty() ? "" : "; ") + m;
      throw AdmissibilityError(msg);
    }
  }
  return normalize(c.params);
}

inline void write_profiles(const std::string& prefix, const RadialProfile& rad, const AngularProfile& ang) {
  std::ofstream fr(prefix + "_radial.csv"), fa(prefix + "_angular.csv");
  if (!fr || !fa) throw UsageError("cannot write profiles with prefix '" + prefix + "'");
  io::Table tr(fr, Format::Csv, {"r", "Omega", "lnR"});
  for (std::size_t i = 0; i < rad.r.size(); ++i) tr.row({rad.r[i], rad.omega[i], rad.lnR[i]});
  io::Table ta(fa, Format::Csv, {"theta", "Theta", "lnS"});
  for (std::size_t j = 0; j < ang.theta.size(); ++j) ta.row({ang.theta[j], ang.Theta[j], ang.lnS[j]});
}

inline int run_solve(const RunConfig& cfg, std::ostream& out) {
  const NormalizedParams p = prepare(cfg, true);
  SolveOptions so;
  so.max_iter = cfg.max_iter;
  const EigenResult r = solve_ground_pair(p, cfg.controls, so);
  const double E_phys = r.E_star * p.E_scale;
  if (cfg.format == Format::Json) {
    io::JsonLine j;
    j.num("a", p.a).num("gamma", p.gamma).num("kappa", r.kappa).num("E", r.E_star).num("lambda", r.lambda_star);
    j.num("E_physical", E_phys).num("residual_theta", r.residual_theta).num("residual_omega", r.residual_omega);
    j.integer("iterations", r.iterations).boolean("converged", r.converged);
    j.num("rho", r.rho).num("winding_theta", r.winding_theta).num("winding_omega", r.winding_omega);
    j.boolean("mirrored", r.mirrored).boolean("near_top", r.near_top);
    out << j.str() << '\n';
  } else {
    io::Table t(out, Format::Csv,
                {"a", "gamma", "kappa", "E", "lambda", "E_physical", "residual_theta", "residual_omega",
                 "iterations", "converged", "rho", "winding_theta", "winding_omega", "mirrored", "near_top"});
    t.row({p.a, p.gamma, r.kappa, r.E_star, r.lambda_star, E_phys, r.residual_theta, r.residual_omega,
           r.iterations, r.converged, r.rho, r.winding_theta, r.winding_omega, r.mirrored, r.near_top});
  }
  if (!cfg.profiles_prefix.empty()) {
    NormalizedParams pk = p;
    pk.kappa = std::abs(p.kappa);
    const double s = r.mirrored ? -1.0 : 1.0;
    write_profiles(cfg.profiles_prefix, radial_profile(pk, s * r.E_star, s * r.lambda_star, r.controls),
                   angular_profile(pk, s * r.E_star, s * r.lambda_star, r.controls));
  }
  return 0;
}

inline std::string status_of(const std::exception& e) {
  if (auto* z = dynamic_cast<const Error*>(&e)) return std::string(to_string(z->kind()));
  return "Internal";
}

inline int run_scan(const RunConfig& cfg, std::ostream& out) {
  const ScanRanges& s = *cfg.scan;
  const double kappa = cfg.params.kappa;
  const double nan = std::nan("");
  std::vector<std::vector<io::Cell>> rows;
  std::vector<std::string> cols;

  if (s.table == "lambda") {
    cols = {"a", "kappa", "E", "Lambda", "status"};
    std::vector<std::pair<double, double>> jobs;
    for (double a : s.a)
      for (double E : s.E) jobs.emplace_back(a, E);
    rows.resize(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
      const auto [a, E] = jobs[i];
      try {
        const auto m = lambda_of_E({a, 0.0, kappa, 1.0}, E, cfg.controls);
        rows[i] = {a, kappa, E, m.value, "ok"};
      } catch (const std::exception& e) {
        rows[i] = {a, kappa, E, nan, status_of(e)};
      }
    });
  } else if (s.table == "energy") {
    cols = {"a", "gamma", "kappa", "lambda", "Energy", "near_top", "status"};
    std::vector<std::array<double, 3>> jobs;
    for (double a : s.a)
      for (double g : s.gamma) {
        std::vector<double> ls = s.lambda ? *s.lambda : parse_grid(io::fmt(-1 - a) + ":" + io::fmt(-1 + a) + ":9", "");
        for (double l : ls) jobs.push_back({a, g, l});
      }
    rows.resize(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
      const auto [a, g, l] = jobs[i];
      try {
        const auto m = energy_of_lambda({a, g, kappa, 1.0}, l, cfg.controls);
        rows[i] = {a, g, kappa, l, m.value, m.near_top, "ok"};
      } catch (const std::exception& e) {
        rows[i] = {a, g, kappa, l, nan, false, status_of(e)};
      }
    });
  } else {
    cols = {"a", "gamma", "kappa", "E", "lambda", "residual_theta", "residual_omega", "iterations", "converged",
            "status"};
    std::vector<std::pair<double, double>> jobs;
    for (double a : s.a)
      for (double g : s.gamma) jobs.emplace_back(a, g);
    rows.resize(jobs.size());
    SolveOptions so;
    so.max_iter = cfg.max_iter;
    parallel_for(jobs.size(), [&](std::size_t i) {
      const auto [a, g] = jobs[i];
      try {
        const auto r = solve_ground_pair({a, g, kappa, 1.0}, cfg.controls, so);
        rows[i] = {a, g, kappa, r.E_star, r.lambda_star, r.residual_theta, r.residual_omega, r.iterations,
                   r.converged, "ok"};
      } catch (const std::exception& e) {
        rows[i] = {a, g, kappa, nan, nan, nan, nan, 0, false, status_of(e)};
      }
    });
  }
  io::Table t(out, cfg.format, cols);
  for (const auto& row : rows) t.row(row);
  return 0;
}

inline int run_portrait(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const NormalizedParams p = prepare(cfg, false);
  const PortraitTarget& pt = *cfg.portrait;
  const FlowParams fp{p.a, p.kappa, p.gamma, pt.E, pt.lambda};
  try {
    const auto rep = classify_nullclines(pt.kind, fp);
    err << "regime: " << to_string(rep.regime);
    if (pt.kind == FlowKind::Theta) err << " (lambda_c = " << io::fmt(rep.lambda_c) << ")\n";
    else err << " (E_l = " << io::fmt(rep.E_l) << ", E_h = " << io::fmt(rep.E_h) << ")\n";
  } catch (const RangeError& e) {
    err << "regime: not classified (" << e.what() << ")\n";
  }
  const auto lines = sample_nullclines(pt.kind, fp, pt.grid);
  const auto om = integrate_distinguished(pt.kind, fp, Which::Wminus, cfg.controls);
  const auto op = integrate_distinguished(pt.kind, fp, Which::Wplus, cfg.controls);

  io::Table t(out, cfg.format, {"series", "id", "x", "y", "y_mod_2pi"});
  auto wrap = [](double y) {
    const double w = y - 2 * M_PI * std::floor(y / (2 * M_PI));
    return w >= 2 * M_PI ? 0.0 : w;
  };
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (const auto& q : lines[i].points) t.row({"nullcline", std::to_string(i), q[0], q[1], wrap(q[1])});
  for (const Orbit* o : {&om, &op})
    for (const auto& s : o->samples) t.row({"orbit", std::string(to_string(o->which)), s.x, s.y, wrap(s.y)});
  return 0;
}

inline int run_validate(const RunConfig& cfg, std::ostream& out) {
  const NormalizedParams p = prepare(cfg, false);
  const auto checks = validate(p, cfg.controls);
  io::Table t(out, cfg.format, {"check", "passed", "value", "limit", "message"});
  for (const auto& c : checks) t.row({c.name, c.passed, c.value, c.limit, c.message});
  return all_passed(checks) ? 0 : 1;
}

inline int run_explore(const RunConfig& cfg, std::ostream& out) {
  const NormalizedParams p = prepare(cfg, true);
  const auto cs = zgkn::explore(p, cfg.controls, cfg.explore);
  io::Table t(out, cfg.format, {"E", "lambda", "dE", "dlambda", "k_theta", "k_omega", "guaranteed"});
  for (const auto& c : cs) t.row({c.E, c.lambda, c.dE, c.dlambda, c.k_theta, c.k_omega, c.guaranteed});
  return 0;
}

}  // namespace detail

/// Exit codes: 0 success, 1 numerical failure (error record on out), 2 usage.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.help.empty()) {
    out << cfg.help;
    return 0;
  }
  try {
    switch (cfg.command) {
      case Command::Solve: return detail::run_solve(cfg, out);
      case Command::Scan: return detail::run_scan(cfg, out);
      case Command::Portrait: return detail::run_portrait(cfg, out, err);
      case Command::Validate: return detail::run_validate(cfg, out);
      case Command::Explore: return detail::run_explore(cfg, out);
    }
  } catch (const UsageError& e) {
    err << "zgkn: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    const std::string kind = detail::status_of(e);
    err << "zgkn " << to_string(cfg.command) << ": " << kind << ": " << e.what() << '\n';
    out << io::JsonLine().str("error", kind).str("message", e.what()).str("command", to_string(cfg.command)).str()
        << '\n';
    return 1;
  }
  return 1;
}

/// argv in, exit code out. Data goes to --out or `out`, diagnostics to `err`.
inline int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const UsageError& e) {
    err << "zgkn: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }
  if (cfg.output_path.empty() || !cfg.help.empty()) return run(cfg, out, err);
  std::ofstream f(cfg.output_path);
  if (!f) {
    err << "zgkn: cannot open '" << cfg.output_path << "' for writing\n";
    return 2;
  }
  return run(cfg, f, err);
}

}  // namespace zgkn::cli

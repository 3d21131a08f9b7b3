// One PASS/FAIL line per acceptance criterion. Exit status reflects the
// gating criteria only; the last one is exploratory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scan_oracle.hpp"
#include "zgkn/zgkn.hpp"

using namespace zgkn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  bool gating;
  std::function<Outcome()> body;
};

std::string g(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

IntegratorControls tight() { return IntegratorControls{}.tightened(100); }

Outcome explicit_connector() {
  Outcome o{true, ""};
  for (double a : {0.1, 0.2, 0.4}) {
    const FlowParams fp{a, 0.5, 0.0, 1.0, -1 + a};
    const auto orb = integrate_distinguished(FlowKind::Theta, fp, Which::Wminus, tight());
    double m = 0;
    for (const auto& s : orb.samples) m = std::max(m, std::abs(s.y + s.x));
    o.pass &= m < 1e-6;
    o.detail += "a=" + g(a) + ": " + g(m) + "  ";
  }
  return o;
}

Outcome lambda_suite() {
  const NormalizedParams p{0.1, 0.0, 0.5, 1.0};
  const double top = lambda_of_E(p, 1.0).value;
  bool ok = std::abs(top + 0.9) < 1e-9;
  std::vector<double> L;
  for (int i = 0; i <= 16; ++i) L.push_back(lambda_of_E(p, i / 16.0).value);
  double min_sec = INFINITY, max_sec = -INFINITY;
  for (std::size_t i = 0; i < L.size(); ++i) {
    ok &= L[i] >= -1.1 && L[i] <= -0.9;
    if (i) {
      const double sec = (L[i] - L[i - 1]) * 16.0;
      min_sec = std::min(min_sec, sec), max_sec = std::max(max_sec, sec);
    }
  }
  ok &= min_sec >= 0 && max_sec < 0.1;
  double worst = 0;
  for (double E : {0.25, 0.5, 0.75, 0.95}) {
    const double l = lambda_of_E(p, E, tight()).value;
    const double d = dLambda_dE(make_connector(FlowKind::Theta, flow_params(p, E, l), tight()));
    const double fd =
        oracle::central_diff([&](double e) { return lambda_of_E(p, e, tight()).value; }, E, 1e-4);
    worst = std::max(worst, std::abs(d - fd) / std::abs(fd));
  }
  ok &= worst < 1e-4;
  return {ok, "Lambda(1)+0.9=" + g(top + 0.9) + " secants in [" + g(min_sec) + "," + g(max_sec) +
                  "] derivative rel err " + g(worst)};
}

Outcome energy_suite() {
  const NormalizedParams p{0.1, -0.2, 0.5, 1.0};
  bool ok = true;
  double lo = INFINITY, hi = -INFINITY, max_slope = 0, worst = 0;
  for (int j = 0; j <= 8; ++j) {
    const double l = -1.1 + 0.2 * j / 8.0;
    const double E = energy_of_lambda(p, l, tight()).value;
    ok &= E > 0 && E < 1;
    lo = std::min(lo, E), hi = std::max(hi, E);
    const double d = dE_dlambda(make_connector(FlowKind::Omega, flow_params(p, E, l), tight()));
    max_slope = std::max(max_slope, std::abs(d));
    if (j % 2 == 1) {
      const double fd =
          oracle::central_diff([&](double x) { return energy_of_lambda(p, x, tight()).value; }, l, 1e-4);
      worst = std::max(worst, std::abs(d - fd) / std::abs(fd));
    }
  }
  ok &= max_slope < 10 && worst < 1e-4;
  return {ok, "E in [" + g(lo) + "," + g(hi) + "] max|dE/dl|=" + g(max_slope) + " derivative rel err " + g(worst)};
}

Outcome fixed_points() {
  Outcome o{true, ""};
  for (auto [a, gm] : {std::pair{0.1, -0.2}, std::pair{0.2, -0.3}, std::pair{0.05, -0.1}}) {
    const auto r = solve_ground_pair({a, gm, 0.5, 1.0});
    bool ok = r.converged && r.residual_theta < 1e-8 && r.residual_omega < 1e-8;
    ok &= r.E_star > 0 && r.E_star < 1 && r.lambda_star >= -1 - a && r.lambda_star <= -1 + a;
    ok &= !r.ratios.empty() && r.ratios.back() < 1;
    const auto box = oracle::ground_scan(a, gm);
    ok &= box.contains(r.E_star, r.lambda_star);
    o.pass &= ok;
    std::ostringstream os;
    os.precision(10);
    os << "(" << a << "," << gm << "): E*=" << r.E_star << " l*=" << r.lambda_star << (ok ? "" : " [bad]") << "  ";
    o.detail += os.str();
  }
  return o;
}

Outcome mirror() {
  const auto r = solve_ground_pair({0.1, -0.2, 0.5, 1.0});
  const auto m = mirror_eigenvalue(r);
  // evaluated directly at (-E*, -l*, kappa = -1/2), not through the mirror map
  const FlowParams fp{0.1, -0.5, -0.2, m.E_star, m.lambda_star};
  const double pt = std::abs(mismatch_value(FlowKind::Theta, fp, r.controls));
  const double po = std::abs(mismatch_value(FlowKind::Omega, fp, r.controls));
  return {pt < 1e-7 && po < 1e-7, "|Phi_Theta|=" + g(pt) + " |Phi_Omega|=" + g(po)};
}

Outcome wavefunction() {
  const NormalizedParams p{0.1, -0.2, 0.5, 1.0};
  const auto r = solve_ground_pair(p);
  const auto rad = radial_profile(p, r.E_star, r.lambda_star, r.controls);
  const auto ang = angular_profile(p, r.E_star, r.lambda_star, r.controls);
  const auto res = residuals(rad, ang, p, r.E_star, r.lambda_star);
  const double rmax = std::max({res.max_radial, res.max_angular, res.max_hamiltonian});
  const double k = std::sqrt(1 - r.E_star * r.E_star);
  const double dec = std::abs(rad.decay_exponent_fit - k) / k;
  const double ex = std::abs(ang.endpoint_exponent_fit - 0.5) / 0.5;
  const auto n = hilbert_norm(rad, ang);
  ProfileOptions fine;
  fine.ds /= 2;
  fine.dtau /= 2;
  const auto n2 = hilbert_norm(radial_profile(p, r.E_star, r.lambda_star, r.controls, fine),
                               angular_profile(p, r.E_star, r.lambda_star, r.controls, fine));
  const double stab = std::abs(n2.norm_squared / n.norm_squared - 1);
  const bool nok = n.norm_squared > 0 && std::isfinite(n.norm_squared) &&
                   n.norm_squared <= 8 * M_PI * n.R_norm2 * n.S_norm2;
  return {rmax < 1e-6 && dec < 0.01 && ex < 0.02 && nok && stab < 1e-8,
          "residual " + g(rmax) + " decay " + g(dec) + " exponent " + g(ex) + " norm^2 " + g(n.norm_squared) +
              " doubling " + g(stab)};
}

Outcome nullclines() {
  const FlowParams t{0.1, 0.5, -0.2, 0.95, -0.4};
  const auto sub = classify_nullclines(FlowKind::Theta, t);
  FlowParams t2 = t;
  t2.lambda = -0.9;
  const auto sup = classify_nullclines(FlowKind::Theta, t2);
  const FlowParams w{0.1, 0.5, -0.4, 0.93, -0.9};
  const auto om = classify_nullclines(FlowKind::Omega, w);
  const bool ok = std::abs(sub.lambda_c + 0.405) < 1e-12 && sub.regime == Regime::SubCritical &&
                  sup.regime == Regime::SuperCritical && std::abs(om.E_l - 0.6993) < 5e-5 &&
                  std::abs(om.E_h - 0.9113) < 5e-5 && om.regime == Regime::SuperCritical;
  return {ok, "lambda_c=" + g(sub.lambda_c) + " E_l=" + std::to_string(om.E_l) + " E_h=" + std::to_string(om.E_h)};
}

Outcome rhs_identities() {
  std::mt19937_64 rng(7);
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const int N = 10000;
  double sym = 0, t1 = 0, t2 = 0, mono = -INFINITY;
  for (int i = 0; i < N; ++i) {
    const FlowParams p{U(0.01, 0.49), 0.5, U(-0.5, 0), U(-1, 1), U(-1.5, -0.5)};
    const double th = U(0, M_PI), Th = U(-7, 7);
    const auto u = theta_rhs(th, Th, p), v = theta_rhs(M_PI - th, M_PI - Th, p);
    sym = std::max({sym, std::abs(u[0] - v[0]), std::abs(u[1] - v[1])});
  }
  for (int i = 0; i < N; ++i) {
    const FlowParams p{U(0.01, 0.49), 0.5, U(-0.5, 0), U(-1, 1), U(-1.5, -0.5)};
    FlowParams m = p;
    m.kappa = -p.kappa, m.lambda = -p.lambda, m.E = -p.E;
    const double r = U(-20, 20), Om = U(-7, 7), th = U(0.05, M_PI - 0.05), Th = U(-7, 7);
    t1 = std::max(t1, std::abs(radial_rhs(-r, Om, m) + radial_rhs(r, Om, p)));
    t1 = std::max(t1, std::abs(angular_rhs(M_PI - th, Th, m) + angular_rhs(th, Th, p)));
  }
  for (int i = 0; i < N; ++i) {
    const FlowParams p{U(0.01, 0.49), 0.5, U(-0.5, 0), U(-1, 1), U(-1.5, -0.5)};
    FlowParams m = p;
    m.kappa = -p.kappa, m.lambda = -p.lambda, m.E = -p.E, m.gamma = -p.gamma;
    const double r = U(-20, 20), Om = U(-7, 7), th = U(0.05, M_PI - 0.05), Th = U(-7, 7);
    t2 = std::max(t2, std::abs(radial_rhs(r, M_PI - Om, m) + radial_rhs(r, Om, p)));
    t2 = std::max(t2, std::abs(angular_rhs(th, M_PI - Th, m) + angular_rhs(th, Th, p)));
  }
  for (int i = 0; i < N; ++i) {
    const FlowParams p{U(0.01, 0.49), 0.5, U(-0.5, 0), U(0, 1), U(-1.5, -0.5)};
    const double th = U(0, M_PI), Th = U(-7, 7), xi = U(-M_PI / 2, M_PI / 2), Om = U(-7, 7);
    FlowParams q = p;
    q.lambda -= 1e-3;
    mono = std::max(mono, theta_rhs(th, Th, q)[1] - theta_rhs(th, Th, p)[1]);
    q = p;
    q.E += 1e-3;
    mono = std::max(mono, omega_rhs(xi, Om, q)[1] - omega_rhs(xi, Om, p)[1]);
  }
  return {sym < 1e-12 && t1 < 1e-12 && t2 < 1e-12 && mono <= 1e-12,
          "symmetry " + g(sym) + " trans1 " + g(t1) + " trans2 " + g(t2) + " max increment " + g(mono)};
}

Outcome coulomb_limit() {
  SolveOptions o;
  o.require_admissible = false;
  o.residual_tol = 1e-6;
  const auto r = solve_ground_pair({1e-3, -0.2, 0.5, 1.0}, {}, o);
  const double ref = std::sqrt(1 - 0.2 * 0.2);
  return {std::abs(r.E_star - ref) < 1e-2, "E*=" + std::to_string(r.E_star) + " reference " + std::to_string(ref)};
}

}  // namespace

int main() {
  const std::vector<Criterion> cs{
      {1, "explicit connector", 3.0, true, explicit_connector},
      {2, "Lambda map", 30.0, true, lambda_suite},
      {3, "energy map", 30.0, true, energy_suite},
      {4, "fixed point", 360.0, true, fixed_points},
      {5, "mirror symmetry", 30.0, true, mirror},
      {6, "wavefunction", 60.0, true, wavefunction},
      {7, "nullcline regimes", 1.0, true, nullclines},
      {8, "rhs identities", 5.0, true, rhs_identities},
      {9, "Coulomb limit (non-gating)", 600.0, false, coulomb_limit},
  };
  int failed = 0;
  for (const auto& c : cs) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > c.budget_s) {
      o.pass = false;
      o.detail += " [over time budget " + g(c.budget_s) + " s]";
    }
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), s);
    std::fflush(stdout);
    if (!o.pass && c.gating) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

#pragma once

// Invariant suite behind `zgkn validate`. Each check is self-contained and
// reports a measured value against its limit; exceptions count as failures.

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "zgkn/eigenmaps.hpp"
#include "zgkn/flows.hpp"
#include "zgkn/orbits.hpp"
#include "zgkn/spectrum.hpp"
#include "zgkn/wavefunction.hpp"

namespace zgkn {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string message;
};

struct ValidateOptions {
  int samples = 10000;
  unsigned seed = 20240611u;
  bool wavefunction = true;
};

namespace detail {

inline CheckResult run_check(const std::string& name, double limit, const std::function<double()>& measure,
                             bool below = true) {
  CheckResult r;
  r.name = name;
  r.limit = limit;
  try {
    r.value = measure();
    r.passed = std::isfinite(r.value) && (below ? r.value < limit : r.value >= limit);
  } catch (const std::exception& e) {
    r.value = std::nan("");
    r.message = e.what();
  }
  return r;
}

}  // namespace detail

/// Runs every check at the given parameters. Order of the results is fixed.
inline std::vector<CheckResult> validate(const NormalizedParams& p, const IntegratorControls& c = {},
                                         const ValidateOptions& o = {}) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(o.seed);
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const double a = p.a, k = std::abs(p.kappa);

  out.push_back(detail::run_check("admissibility", 0.5, [&] { return check_admissibility(p).ok() ? 1.0 : 0.0; },
                                  false));

  out.push_back(detail::run_check("rhs_discrete_symmetry", 1e-12, [&] {
    double m = 0;
    for (int i = 0; i < o.samples; ++i) {
      const FlowParams fp{a, k, p.gamma, U(-1, 1), U(-1 - a, -1 + a)};
      const double th = U(0, M_PI), Th = U(-7, 7);
      const auto u = theta_rhs(th, Th, fp), v = theta_rhs(M_PI - th, M_PI - Th, fp);
      m = std::max({m, std::abs(u[0] - v[0]), std::abs(u[1] - v[1])});
    }
    return m;
  }));

  // relative to the size of the terms, the 1/sin theta piece can be large
  auto mirror_check = [&](bool flip_gamma) {
    double m = 0;
    for (int i = 0; i < o.samples; ++i) {
      const FlowParams fp{a, k, p.gamma, U(-1, 1), U(-1 - a, -1 + a)};
      FlowParams q = fp;
      q.kappa = -fp.kappa, q.lambda = -fp.lambda, q.E = -fp.E;
      if (flip_gamma) q.gamma = -fp.gamma;
      const double r = U(-20, 20), Om = U(-7, 7), th = U(0.01, M_PI - 0.01), Th = U(-7, 7);
      const double sr = 1 + std::abs(radial_rhs(r, Om, fp));
      const double sa = 1 + 2 * k / std::sin(th) + std::abs(angular_rhs(th, Th, fp));
      if (flip_gamma) {
        m = std::max(m, std::abs(radial_rhs(r, M_PI - Om, q) + radial_rhs(r, Om, fp)) / sr);
        m = std::max(m, std::abs(angular_rhs(th, M_PI - Th, q) + angular_rhs(th, Th, fp)) / sa);
      } else {
        m = std::max(m, std::abs(radial_rhs(-r, Om, q) + radial_rhs(r, Om, fp)) / sr);
        m = std::max(m, std::abs(angular_rhs(M_PI - th, Th, q) + angular_rhs(th, Th, fp)) / sa);
      }
    }
    return m;
  };
  out.push_back(detail::run_check("rhs_trans1", 1e-12, [&] { return mirror_check(false); }));
  out.push_back(detail::run_check("rhs_trans2", 1e-12, [&] { return mirror_check(true); }));

  // the Theta field is nonincreasing in -lambda, the Omega field in E; both are affine
  out.push_back(detail::run_check("rhs_monotonicity", 1e-12, [&] {
    double worst = 0;
    for (int i = 0; i < o.samples; ++i) {
      const double th = U(0, M_PI), Th = U(-7, 7), xi = U(-M_PI / 2, M_PI / 2), Om = U(-7, 7);
      const FlowParams fp{a, k, p.gamma, U(0, 1), U(-1 - a, -1 + a)};
      FlowParams g = fp;
      g.lambda -= 0.5;
      worst = std::max(worst, theta_rhs(th, Th, g)[1] - theta_rhs(th, Th, fp)[1]);
      g = fp;
      g.E += 0.5;
      worst = std::max(worst, omega_rhs(xi, Om, g)[1] - omega_rhs(xi, Om, fp)[1]);
    }
    return worst;
  }));

  out.push_back(detail::run_check("explicit_connector", 1e-6, [&] {
    IntegratorControls t = c.tightened(100);
    const FlowParams fp{a, 0.5, 0.0, 1.0, -1 + a};
    const auto orb = integrate_distinguished(FlowKind::Theta, fp, Which::Wminus, t);
    double m = 0;
    for (const auto& s : orb.samples) m = std::max(m, std::abs(s.y + s.x));
    return m;
  }));

  NormalizedParams pk = p;
  pk.kappa = k;
  out.push_back(detail::run_check("lambda_map_top", 1e-9, [&] {
    return std::abs(lambda_of_E(pk, 1.0, c).value - (-1 + a));
  }));

  // range violation plus the largest downward step on a 17-point grid
  out.push_back(detail::run_check("lambda_map_monotone", 1e-12, [&] {
    double prev = -INFINITY, worst = 0;
    for (int i = 0; i <= 16; ++i) {
      const double E = i / 16.0;
      const double l = lambda_of_E(pk, E, c).value;
      worst = std::max({worst, (-1 - a) - l, l - (-1 + a), prev - l});
      prev = l;
    }
    return worst;
  }));

  out.push_back(detail::run_check("energy_map_range", 0.5, [&] {
    for (int j = 0; j <= 8; ++j) {
      const double l = -1 - a + 2 * a * j / 8.0;
      const double E = energy_of_lambda(pk, l, c).value;
      if (!(E > 0 && E < 1)) return 0.0;
    }
    return 1.0;
  }, false));

  EigenResult er;
  bool solved = false;
  out.push_back(detail::run_check("fixed_point_residual", 1e-8, [&] {
    er = solve_ground_pair(p, c);
    solved = true;
    return std::max(er.residual_theta, er.residual_omega);
  }));
  out.push_back(detail::run_check("fixed_point_contraction", 1.0, [&] {
    if (!solved) throw NonConvergenceError("no fixed point");
    double m = 0;
    for (double q : er.ratios) m = std::max(m, q);
    return er.ratios.empty() ? 0.0 : m;
  }));
  out.push_back(detail::run_check("mirror", 1e-7, [&] {
    if (!solved) throw NonConvergenceError("no fixed point");
    const auto chk = verify_mirror(er, 1e-8, false);
    return std::max(chk.phi_theta, chk.phi_omega);
  }));

  if (!o.wavefunction) return out;
  RadialProfile rad;
  AngularProfile ang;
  bool prof = false;
  auto need = [&] {
    if (!solved) throw NonConvergenceError("no fixed point");
    if (prof) return;
    // profiles live at kappa = +1/2; a negative-kappa result is its mirror
    const double s = er.mirrored ? -1.0 : 1.0;
    rad = radial_profile(pk, s * er.E_star, s * er.lambda_star, er.controls);
    ang = angular_profile(pk, s * er.E_star, s * er.lambda_star, er.controls);
    prof = true;
  };
  out.push_back(detail::run_check("separated_residuals", 1e-6, [&] {
    need();
    const auto rr = residuals(rad, ang, pk, rad.E, rad.lambda);
    return std::max({rr.max_radial, rr.max_angular, rr.max_hamiltonian});
  }));
  out.push_back(detail::run_check("radial_decay", 0.01, [&] {
    need();
    const double kk = std::sqrt(1 - rad.E * rad.E);
    return std::abs(rad.decay_exponent_fit - kk) / kk;
  }));
  out.push_back(detail::run_check("angular_exponent", 0.02, [&] {
    need();
    return std::abs(ang.endpoint_exponent_fit - k) / k;
  }));
  out.push_back(detail::run_check("norm_bound", 0.5, [&] {
    need();
    const auto n = hilbert_norm(rad, ang);
    return n.norm_squared > 0 && std::isfinite(n.norm_squared) && n.bound_ok() ? 1.0 : 0.0;
  }, false));
  return out;
}

inline bool all_passed(const std::vector<CheckResult>& v) {
  for (const auto& r : v)
    if (!r.passed) return false;
  return true;
}

}  // namespace zgkn

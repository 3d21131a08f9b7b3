#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zgkn/eigenmaps.hpp"
#include "zgkn/errors.hpp"
#include "zgkn/model.hpp"
#include "zgkn/orbits.hpp"
#include "zgkn/parallel.hpp"

namespace zgkn {

struct SolveOptions {
  int max_iter = 50;
  double fix_tol = 1e-10;
  double residual_tol = 1e-8;
  std::optional<double> lambda0;  // defaults to -1 + a
  RootOptions root;
  bool require_admissible = true;  // off only for exploratory runs outside the guaranteed region
  EnergyOptions energy;
};

struct EigenResult {
  double E_star = 0.0;
  double lambda_star = 0.0;
  double kappa = 0.5;
  int iterations = 0;
  double residual_theta = 0.0;
  double residual_omega = 0.0;
  std::vector<double> steps;   // |E_{n+1} - E_n|
  std::vector<double> ratios;  // steps[n+1] / steps[n]
  double rho = std::numeric_limits<double>::quiet_NaN();  // fitted tail rate
  double winding_theta = std::numeric_limits<double>::quiet_NaN();
  double winding_omega = std::numeric_limits<double>::quiet_NaN();
  NormalizedParams params;
  IntegratorControls controls;  // accuracy used for the residual check
  bool converged = false;
  bool mirrored = false;
  bool near_top = false;
};

/// Admissibility in normalized units: 0 < 2a < 1 and |gamma| below the coupling bound.
inline AdmissibilityReport check_admissibility(const NormalizedParams& p) {
  ModelParams mp = params_from_gamma(p.a, p.gamma, p.kappa);
  return check_admissibility(mp);
}

namespace detail {

/// exp of the least-squares slope of log(step) over the last five steps.
inline double fit_rate(const std::vector<double>& steps) {
  std::vector<double> x, y;
  const std::size_t n = steps.size(), start = n > 5 ? n - 5 : 0;
  for (std::size_t i = start; i < n; ++i)
    if (steps[i] > 0) {
      x.push_back(static_cast<double>(i));
      y.push_back(std::log(steps[i]));
    }
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return std::exp(sxy / sxx);
}

inline IntegratorControls finer(const IntegratorControls& a, const IntegratorControls& b) {
  return a.rel_tol <= b.rel_tol ? a : b;
}

}  // namespace detail

inline EigenResult mirror_eigenvalue(const EigenResult& r);

/// Fixed-point iteration E_n = E(lambda_{n-1}), lambda_n = Lambda(E_n) from lambda_0 = -1 + a.
inline EigenResult solve_ground_pair(const NormalizedParams& p, const IntegratorControls& c = {},
                                     const SolveOptions& opt = {}) {
  const auto adm = check_admissibility(p);
  SolveOptions o = opt;
  if (!opt.require_admissible) o.energy.check_range = false;
  if (opt.require_admissible && !adm.ok()) {
    std::string msg;
    for (const auto& m : adm.messages) msg += (msg.empty() ? "" : "; ") + m;
    throw AdmissibilityError(msg);
  }
  detail::require_ground_kappa(p.kappa);
  if (p.kappa < 0) {
    NormalizedParams q = p;
    q.kappa = -p.kappa;
    if (o.lambda0) o.lambda0 = -*o.lambda0;
    return mirror_eigenvalue(solve_ground_pair(q, c, o));
  }

  EigenResult r;
  r.params = p;
  r.kappa = p.kappa;
  double lambda = opt.lambda0.value_or(-1 + p.a);
  double E_prev = std::numeric_limits<double>::quiet_NaN();
  MapResult em, lm;
  for (int n = 1; n <= opt.max_iter; ++n) {
    em = energy_of_lambda(p, lambda, c, o.root, o.energy);
    r.iterations = n;
    if (!std::isnan(E_prev)) {
      r.steps.push_back(std::abs(em.value - E_prev));
      if (r.steps.size() >= 2 && r.steps[r.steps.size() - 2] > 0)
        r.ratios.push_back(r.steps.back() / r.steps[r.steps.size() - 2]);
      if (r.steps.back() < opt.fix_tol) {
        r.converged = true;
        break;
      }
    }
    E_prev = em.value;
    lm = lambda_of_E(p, em.value, c, opt.root);
    lambda = lm.value;
  }
  if (!r.converged) {
    std::ostringstream os;
    os << "fixed-point iteration did not converge in " << opt.max_iter << " steps (last step "
       << (r.steps.empty() ? NAN : r.steps.back()) << ")";
    throw NonConvergenceError(os.str());
  }
  // (E(lambda_n), lambda_n): the Omega residual is a certified root, the Theta one is O(fix_tol)
  r.E_star = em.value;
  r.lambda_star = lambda;
  r.near_top = em.near_top;
  r.rho = detail::fit_rate(r.steps);
  r.controls = detail::finer(em.controls, lm.controls);

  const FlowParams fp = flow_params(p, r.E_star, r.lambda_star);
  r.residual_theta = std::abs(mismatch_value(FlowKind::Theta, fp, r.controls));
  r.residual_omega = std::abs(mismatch_value(FlowKind::Omega, fp, r.controls));
  if (!(r.residual_theta < opt.residual_tol && r.residual_omega < opt.residual_tol)) {
    std::ostringstream os;
    os << "residual check failed at E=" << r.E_star << ", lambda=" << r.lambda_star
       << ": |Phi_Theta|=" << r.residual_theta << ", |Phi_Omega|=" << r.residual_omega;
    throw VerificationError(os.str());
  }
  r.winding_theta = mismatch(FlowKind::Theta, fp, r.controls).winding_minus;
  r.winding_omega = mismatch(FlowKind::Omega, fp, r.controls).winding_minus;
  return r;
}

/// (E, lambda, kappa) -> (-E, -lambda, -kappa), residuals carried over.
inline EigenResult mirror_eigenvalue(const EigenResult& r) {
  EigenResult m = r;
  m.E_star = -r.E_star;
  m.lambda_star = -r.lambda_star;
  m.kappa = -r.kappa;
  m.params.kappa = -r.params.kappa;
  m.mirrored = !r.mirrored;
  return m;
}

struct MirrorCheck {
  double phi_theta = 0.0;
  double phi_omega = 0.0;
  double threshold = 0.0;
  bool ok() const { return phi_theta < threshold && phi_omega < threshold; }
};

/// Re-runs both mismatches directly at the mirrored parameters.
inline MirrorCheck verify_mirror(const EigenResult& r, double tol = 1e-8, bool throw_on_failure = true) {
  const EigenResult m = mirror_eigenvalue(r);
  const FlowParams fp = flow_params(m.params, m.E_star, m.lambda_star);
  MirrorCheck chk;
  chk.phi_theta = std::abs(mismatch_value(FlowKind::Theta, fp, r.controls));
  chk.phi_omega = std::abs(mismatch_value(FlowKind::Omega, fp, r.controls));
  chk.threshold = 10 * tol;
  if (throw_on_failure && !chk.ok()) {
    std::ostringstream os;
    os << "mirror check failed: |Phi_Theta|=" << chk.phi_theta << ", |Phi_Omega|=" << chk.phi_omega
       << " (threshold " << chk.threshold << ")";
    throw VerificationError(os.str());
  }
  return chk;
}

struct SpectralPoint {
  double E = 0.0;  // physical units
  double kappa = 0.0;
};

struct SpectrumSummary {
  double m = 1.0;
  // continuous spectrum is (-inf, -m] U [m, inf); the gap is (-m, m)
  double gap_lo = -1.0, gap_hi = 1.0;
  std::vector<SpectralPoint> eigenvalues;  // closed under E -> -E
};

inline SpectrumSummary spectrum_summary(const ModelParams& mp, const std::vector<EigenResult>& results) {
  SpectrumSummary s;
  s.m = mp.m;
  s.gap_lo = -mp.m;
  s.gap_hi = mp.m;
  auto add = [&](double E, double kappa) {
    for (const auto& q : s.eigenvalues)
      if (q.kappa == kappa && std::abs(q.E - E) <= 1e-12 * std::max(1.0, std::abs(E))) return;
    s.eigenvalues.push_back({E, kappa});
  };
  for (const auto& r : results) {
    const double E = r.E_star * mp.m;
    add(E, r.kappa);
    add(-E, -r.kappa);
  }
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(),
            [](const SpectralPoint& x, const SpectralPoint& y) { return x.E < y.E; });
  return s;
}

// --- exploratory scan ---------------------------------------------------------------

struct ExploreOptions {
  int nE = 40, nl = 40;
  double E_lo = 0.0, E_hi = 0.999;
  std::optional<double> lambda_lo, lambda_hi;  // defaults -3 - a, -1 + a
};

/// A grid cell where both mismatches cross a multiple of 2 pi. Not refined or certified.
struct Candidate {
  double E = 0.0, lambda = 0.0;
  double dE = 0.0, dlambda = 0.0;  // cell size
  int k_theta = 0, k_omega = 0;    // which multiple of 2 pi each mismatch crosses
  bool guaranteed = false;
};

namespace detail {

/// Multiple of 2 pi between two unwrapped mismatch values (the one nearest zero).
inline std::optional<int> level_crossing(double u, double v) {
  const double lo = std::min(u, v) / (2 * M_PI), hi = std::max(u, v) / (2 * M_PI);
  const double k = std::clamp(0.0, std::ceil(lo), std::floor(hi));
  if (k < lo || k > hi) return std::nullopt;
  return static_cast<int>(k);
}

}  // namespace detail

inline std::vector<Candidate> explore(const NormalizedParams& p, const IntegratorControls& c = {},
                                      const ExploreOptions& o = {}) {
  detail::require_ground_kappa(p.kappa);
  const double l_lo = o.lambda_lo.value_or(-3 - p.a), l_hi = o.lambda_hi.value_or(-1 + p.a);
  const int nE = o.nE, nl = o.nl;
  std::vector<double> th((nE + 1) * (nl + 1)), om(th.size());
  auto Eat = [&](int i) { return o.E_lo + (o.E_hi - o.E_lo) * i / nE; };
  auto lat = [&](int j) { return l_lo + (l_hi - l_lo) * j / nl; };
  parallel_for(th.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k) / (nl + 1), j = static_cast<int>(k) % (nl + 1);
    const FlowParams fp = flow_params(p, Eat(i), lat(j));
    th[k] = mismatch_value(FlowKind::Theta, fp, c);
    om[k] = mismatch_value(FlowKind::Omega, fp, c);
  });
  auto at = [&](const std::vector<double>& v, int i, int j) { return v[i * (nl + 1) + j]; };
  auto cell_level = [&](const std::vector<double>& v, int i, int j) -> std::optional<int> {
    const double c4[4] = {at(v, i, j), at(v, i + 1, j), at(v, i + 1, j + 1), at(v, i, j + 1)};
    for (int e = 0; e < 4; ++e)
      if (auto k = detail::level_crossing(c4[e], c4[(e + 1) % 4])) return k;
    return std::nullopt;
  };
  std::vector<Candidate> out;
  for (int i = 0; i < nE; ++i)
    for (int j = 0; j < nl; ++j) {
      auto kt = cell_level(th, i, j), ko = cell_level(om, i, j);
      if (!kt || !ko) continue;
      Candidate cd;
      cd.E = 0.5 * (Eat(i) + Eat(i + 1));
      cd.lambda = 0.5 * (lat(j) + lat(j + 1));
      cd.dE = Eat(i + 1) - Eat(i);
      cd.dlambda = lat(j + 1) - lat(j);
      cd.k_theta = *kt;
      cd.k_omega = *ko;
      out.push_back(cd);
    }
  return out;
}

}  // namespace zgkn

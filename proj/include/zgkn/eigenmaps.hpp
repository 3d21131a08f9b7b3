#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "zgkn/errors.hpp"
#include "zgkn/flows.hpp"
#include "zgkn/model.hpp"
#include "zgkn/ode.hpp"
#include "zgkn/orbits.hpp"

namespace zgkn {

struct RootBracket {
  double lo = 0.0, hi = 0.0;
  double f_lo = 0.0, f_hi = 0.0;

  bool valid() const { return (f_lo < 0) != (f_hi < 0); }
};

/// A returned root with the evidence for it.
struct RootCertificate {
  double value = 0.0;
  double residual = 0.0;  // |Phi(value)|
  RootBracket bracket;    // final bracket, opposite signs
  int evaluations = 0;
  bool converged = false;
  bool ulp_limited = false;  // sign change between adjacent doubles, |f| still above tol

  bool certified() const { return converged || ulp_limited; }
};

struct RootOptions {
  double tol = 1e-10;            // target |f|
  double bisect_until = 1e-3;    // bracket width before secant steps start
  int max_evaluations = 200;
};

/// Bisection down to a narrow bracket, then secant steps kept inside the
/// bracket (Illinois weighting). Stops at |f| < tol or when the bracket has
/// shrunk to adjacent doubles.
inline RootCertificate find_root(const std::function<double(double)>& f, RootBracket b,
                                 const RootOptions& opt = {}) {
  if (!b.valid()) {
    std::ostringstream os;
    os.precision(17);
    os << "no sign change on [" << b.lo << ", " << b.hi << "]: f=" << b.f_lo << ", " << b.f_hi;
    throw NoSignChangeError(os.str());
  }
  RootCertificate c;
  auto finish = [&](double x, double fx) {
    c.value = x;
    c.residual = std::abs(fx);
    c.bracket = b;
    c.converged = c.residual < opt.tol;
    return c;
  };
  if (std::abs(b.f_lo) < opt.tol) return finish(b.lo, b.f_lo);
  if (std::abs(b.f_hi) < opt.tol) return finish(b.hi, b.f_hi);

  int side = 0;  // which end was retained last, for the Illinois halving
  double best_x = std::abs(b.f_lo) < std::abs(b.f_hi) ? b.lo : b.hi;
  double best_f = std::min(std::abs(b.f_lo), std::abs(b.f_hi));
  while (c.evaluations < opt.max_evaluations) {
    const double width = b.hi - b.lo;
    const double mid = 0.5 * (b.lo + b.hi);
    if (mid <= b.lo || mid >= b.hi) break;  // adjacent doubles
    double x;
    if (width > opt.bisect_until) {
      x = mid;
    } else {
      x = b.hi - b.f_hi * (b.hi - b.lo) / (b.f_hi - b.f_lo);
      // keep the step strictly inside and away from the ends
      const double guard = 1e-3 * width;
      if (!(x > b.lo + guard && x < b.hi - guard)) x = mid;
    }
    const double fx = f(x);
    ++c.evaluations;
    if (!std::isfinite(fx)) throw IntegrationError("non-finite mismatch during root refinement");
    if (std::abs(fx) <= best_f) {
      best_f = std::abs(fx);
      best_x = x;
    }
    if (std::abs(fx) < opt.tol) {
      c.bracket = b;
      c.value = x;
      c.residual = std::abs(fx);
      c.converged = true;
      return c;
    }
    if ((fx < 0) == (b.f_lo < 0)) {
      b.lo = x;
      b.f_lo = fx;
      if (side == -1) b.f_hi *= 0.5;
      side = -1;
    } else {
      b.hi = x;
      b.f_hi = fx;
      if (side == 1) b.f_lo *= 0.5;
      side = 1;
    }
  }
  // Illinois scaling changes the stored end values; report the true best point
  c.bracket = b;
  c.value = best_x;
  c.residual = best_f;
  c.converged = best_f < opt.tol;
  c.ulp_limited = !c.converged && std::nextafter(b.lo, b.hi) >= b.hi;
  return c;
}

struct MapResult {
  double value = 0.0;
  RootCertificate certificate;
  bool analytic = false;  // returned in closed form (E = 1 for Lambda)
  bool near_top = false;  // energy within 1e-6 of the gap edge
  bool mirrored = false;  // computed at |kappa| and mapped back
  IntegratorControls controls;  // accuracy at which the certificate holds
};

inline FlowParams flow_params(const NormalizedParams& p, double E, double lambda) {
  return {p.a, p.kappa, p.gamma, E, lambda};
}

namespace detail {

inline void require_ground_kappa(double kappa) {
  if (std::abs(std::abs(kappa) - 0.5) > 1e-12) {
    std::ostringstream os;
    os << "eigenvalue maps are bracketed for |kappa| = 1/2 only (kappa=" << kappa << ")";
    throw InvalidParameterError(os.str());
  }
}

inline void require_ring(double a) {
  if (!(a > 0 && a < 0.5)) {
    std::ostringstream os;
    os << "a=" << a << " outside (0, 1/2)";
    throw RangeError(os.str());
  }
}

inline NormalizedParams mirrored(NormalizedParams p) {
  p.kappa = -p.kappa;
  return p;
}

/// Runs find_root with the given controls; on a noise-limited miss the
/// bracket is refined again with tighter integration, twice at most.
template <class MakePhi>
RootCertificate certified_root(MakePhi make_phi, const IntegratorControls& c, RootBracket b,
                               const RootOptions& opt, IntegratorControls* used = nullptr) {
  RootCertificate cert = find_root(make_phi(c), b, opt);
  IntegratorControls cc = c;
  for (int attempt = 0; attempt < 2 && !cert.converged; ++attempt) {
    cc = cc.tightened(100.0);
    auto phi = make_phi(cc);
    // a slightly widened copy of the last bracket, re-evaluated at the new accuracy
    const double pad = std::max(64 * (cert.bracket.hi - cert.bracket.lo), 1e-9);
    RootBracket nb{std::max(cert.bracket.lo - pad, b.lo), std::min(cert.bracket.hi + pad, b.hi), 0, 0};
    nb.f_lo = phi(nb.lo);
    nb.f_hi = phi(nb.hi);
    if (!nb.valid()) nb = {b.lo, b.hi, phi(b.lo), phi(b.hi)};
    const int before = cert.evaluations;
    cert = find_root(phi, nb, opt);
    cert.evaluations += before + 2;
  }
  if (used) *used = cc;
  return cert;
}

}  // namespace detail

/// Lambda(E): the lambda in [-1-a, -1+a] where the Theta-flow has a connector.
inline MapResult lambda_of_E(const NormalizedParams& p, double E, const IntegratorControls& c = {},
                             const RootOptions& opt = {}) {
  detail::require_ground_kappa(p.kappa);
  detail::require_ring(p.a);
  if (p.kappa < 0) {
    MapResult m = lambda_of_E(detail::mirrored(p), -E, c, opt);
    m.value = -m.value;
    m.certificate.value = -m.certificate.value;
    m.mirrored = true;
    return m;
  }
  if (!(E >= -1.0 && E <= 1.0)) throw RangeError("lambda_of_E: E outside [-1, 1]");
  const double a = p.a;
  MapResult m;
  m.controls = c;
  if (E == 1.0) {
    m.value = -1 + a;
    m.analytic = true;
    m.certificate.value = m.value;
    m.certificate.residual = std::abs(mismatch_value(FlowKind::Theta, flow_params(p, E, m.value), c));
    m.certificate.converged = true;
    return m;
  }
  auto make_phi = [&](const IntegratorControls& cc) {
    return [&p, E, cc](double l) { return mismatch_value(FlowKind::Theta, flow_params(p, E, l), cc); };
  };
  auto phi = make_phi(c);
  RootBracket b{-1 - a, -1 + a, 0, 0};
  b.f_lo = phi(b.lo);
  b.f_hi = phi(b.hi);
  m.certificate = detail::certified_root(make_phi, c, b, opt, &m.controls);
  m.certificate.evaluations += 2;
  if (!m.certificate.certified()) {
    std::ostringstream os;
    os << "Lambda(" << E << "): |Phi| = " << m.certificate.residual << " after " << m.certificate.evaluations
       << " evaluations";
    throw NonConvergenceError(os.str());
  }
  m.value = m.certificate.value;
  return m;
}

struct EnergyOptions {
  double growth = 1.2;
  double top_wall = 1.0 - 1e-9;
  int max_growth = 60;
  bool check_range = true;  // off for exploratory runs outside the guaranteed parameter range
};

/// E(lambda): the energy in (0, 1) where the Omega-flow has a connector.
inline MapResult energy_of_lambda(const NormalizedParams& p, double lambda, const IntegratorControls& c = {},
                                  const RootOptions& opt = {}, const EnergyOptions& eo = {}) {
  detail::require_ground_kappa(p.kappa);
  if (p.kappa < 0) {
    MapResult m = energy_of_lambda(detail::mirrored(p), -lambda, c, opt, eo);
    m.value = -m.value;
    m.certificate.value = -m.certificate.value;
    m.mirrored = true;
    return m;
  }
  if (eo.check_range) check_param_range(p.a, p.gamma, lambda);
  auto make_phi = [&](const IntegratorControls& cc) {
    return [&p, lambda, cc](double E) { return mismatch_value(FlowKind::Omega, flow_params(p, E, lambda), cc); };
  };
  auto phi = make_phi(c);

  double lo = energy_lower(p.a, p.gamma, lambda), hi = energy_upper(p.a, p.gamma, lambda);
  lo = std::max(lo, 0.0);
  hi = std::min(hi, eo.top_wall);
  if (!(lo < hi)) lo = 0.0, hi = eo.top_wall;  // closed forms unusable outside the range
  RootBracket b{lo, hi, phi(lo), phi(hi)};
  int evals = 2;
  double step = 0.5 * (eo.growth - 1.0) * std::max(hi - lo, 1e-3);
  for (int i = 0; i < eo.max_growth && !b.valid(); ++i, step *= eo.growth) {
    // Phi increases with E: both negative means the root is above
    const bool up = b.f_hi < 0;
    if (up ? b.hi >= eo.top_wall : b.lo <= 0.0) break;
    if (up) {
      b.lo = b.hi;
      b.f_lo = b.f_hi;
      b.hi = std::min(b.hi + step, eo.top_wall);
      b.f_hi = phi(b.hi);
    } else {
      b.hi = b.lo;
      b.f_hi = b.f_lo;
      b.lo = std::max(b.lo - step, 0.0);
      b.f_lo = phi(b.lo);
    }
    ++evals;
  }
  if (!b.valid()) {
    std::ostringstream os;
    os.precision(17);
    if (b.hi >= eo.top_wall && b.f_hi < 0) {
      os << "E(lambda=" << lambda << "): connector lies above " << eo.top_wall << " (Phi=" << b.f_hi << ")";
      throw DegenerateTopError(os.str());
    }
    os << "E(lambda=" << lambda << "): no sign change on [" << b.lo << ", " << b.hi << "], Phi=" << b.f_lo
       << ", " << b.f_hi;
    throw NoSignChangeError(os.str());
  }
  MapResult m;
  m.controls = c;
  m.certificate = detail::certified_root(make_phi, c, b, opt, &m.controls);
  m.certificate.evaluations += evals;
  if (!m.certificate.certified()) {
    std::ostringstream os;
    os << "E(lambda=" << lambda << "): |Phi| = " << m.certificate.residual << " after "
       << m.certificate.evaluations << " evaluations";
    throw NonConvergenceError(os.str());
  }
  m.value = m.certificate.value;
  m.near_top = m.value > 1.0 - 1e-6;
  return m;
}

// --- sensitivity along a connector ----------------------------------------------

/// A converged connector: parameters at which Phi vanishes for one flow.
struct Connector {
  FlowKind kind = FlowKind::Theta;
  FlowParams params;
  IntegratorControls controls;
  double phi = 0.0;
};

inline Connector make_connector(FlowKind kind, const FlowParams& p, const IntegratorControls& c = {}) {
  return {kind, p, c, mismatch_value(kind, p, c)};
}

/// Sampled P(t) and its running integral I(t) = int_0^t P along the connector,
/// so that U(t1, t2) = exp(-(I(t2) - I(t1))).
struct SensitivityKernel {
  FlowKind kind = FlowKind::Theta;
  std::vector<double> t, P, I;

  double U(double t1, double t2) const { return std::exp(-(integral_at(t2) - integral_at(t1))); }

  double integral_at(double tq) const {
    auto it = std::lower_bound(t.begin(), t.end(), tq);
    if (it == t.begin()) return I.front();
    if (it == t.end()) return I.back();
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    const double s = (tq - t[k - 1]) / (t[k] - t[k - 1]);
    return I[k - 1] + s * (I[k] - I[k - 1]);
  }
};

namespace detail {

struct FlowTerms {
  double P;   // dg/dy
  double qE;  // dg/dE
  double ql;  // dg/dlambda
};

inline FlowTerms flow_terms(FlowKind kind, double t, double y, const FlowParams& p) {
  if (kind == FlowKind::Theta) {
    const double s = 1.0 / std::cosh(t), c = -std::tanh(t);
    const double sy = std::sin(y), cy = std::cos(y);
    return {2 * p.a * s * c * sy + 2 * p.a * p.E * s * s * cy - 2 * p.kappa * cy, 2 * p.a * s * s * sy, 2 * s};
  }
  const double w = std::sqrt(t * t + p.a * p.a);
  const double sy = std::sin(y), cy = std::cos(y);
  return {-2 * (t / w) * sy + 2 * (p.lambda / w) * cy, -2.0, 2 * sy / w};
}

inline double flow_y_rhs(FlowKind kind, double t, double y, const FlowParams& p) {
  return kind == FlowKind::Theta ? theta_rhs_tau(t, y, p) : radial_rhs(t, y, p);
}

struct HalfIntegrals {
  double I0;  // running integral of P from the launch to the midpoint
  double A;   // int e^{-I} qE
  double B;   // int e^{-I} ql
  ode::Trajectory<4> traj;
};

inline HalfIntegrals augmented_leg(const Connector& cn, Which which, bool keep) {
  const auto eq = equilibria(cn.kind, cn.params);
  const auto L = launch_point(cn.kind, cn.params, which, eq, cn.controls);
  auto f = [&](double t, const ode::State<4>& s) {
    const FlowTerms ft = flow_terms(cn.kind, t, s[0], cn.params);
    const double w = std::exp(-s[1]);
    return ode::State<4>{flow_y_rhs(cn.kind, t, s[0], cn.params), ft.P, w * ft.qE, w * ft.ql};
  };
  ode::Settings st = cn.controls.settings();
  HalfIntegrals h;
  auto end = ode::integrate<4>(f, L.t_launch, ode::State<4>{L.y_launch, 0, 0, 0}, 0.0, st,
                               keep ? &h.traj : nullptr);
  h.I0 = end[1];
  h.A = end[2];
  h.B = end[3];
  return h;
}

/// int_R U(0,t) qE dt and int_R U(0,t) ql dt along the connector.
inline std::pair<double, double> kernel_integrals(const Connector& cn) {
  const auto L = augmented_leg(cn, Which::Wminus, false);
  const auto R = augmented_leg(cn, Which::Wplus, false);
  // left: exp(I_L(0)) * int e^{-I_L}; right was integrated backwards, hence the sign
  const double eL = std::exp(L.I0), eR = std::exp(R.I0);
  return {eL * L.A - eR * R.A, eL * L.B - eR * R.B};
}

inline void require_connector(const Connector& cn, double threshold) {
  if (!(std::abs(cn.phi) < threshold)) {
    std::ostringstream os;
    os << "not a connector: |Phi| = " << std::abs(cn.phi) << " >= " << threshold;
    throw NotAConnectorError(os.str());
  }
}

}  // namespace detail

inline SensitivityKernel sensitivity_kernel(const Connector& cn) {
  auto L = detail::augmented_leg(cn, Which::Wminus, true);
  auto R = detail::augmented_leg(cn, Which::Wplus, true);
  SensitivityKernel k;
  k.kind = cn.kind;
  for (std::size_t i = 0; i < L.traj.size(); ++i) {
    const double t = L.traj.t[i], y = L.traj.y[i][0];
    k.t.push_back(t);
    k.P.push_back(detail::flow_terms(cn.kind, t, y, cn.params).P);
    k.I.push_back(L.traj.y[i][1] - L.I0);
  }
  for (std::size_t i = R.traj.size(); i-- > 0;) {
    const double t = R.traj.t[i], y = R.traj.y[i][0];
    if (t <= k.t.back()) continue;
    k.t.push_back(t);
    k.P.push_back(detail::flow_terms(cn.kind, t, y, cn.params).P);
    k.I.push_back(R.traj.y[i][1] - R.I0);
  }
  return k;
}

/// dLambda/dE = a int U sin^2(theta)(-sin Theta) / int U sin(theta), along a Theta connector.
inline double dLambda_dE(const Connector& cn, double threshold = 1e-6) {
  if (cn.kind != FlowKind::Theta) throw InvalidParameterError("dLambda_dE needs a Theta-flow connector");
  detail::require_connector(cn, threshold);
  const auto [iE, il] = detail::kernel_integrals(cn);
  return -iE / il;
}

/// dE/dlambda = int U cos(xi) sin(Omega) / (a int U), along an Omega connector.
inline double dE_dlambda(const Connector& cn, double threshold = 1e-6) {
  if (cn.kind != FlowKind::Omega) throw InvalidParameterError("dE_dlambda needs an Omega-flow connector");
  detail::require_connector(cn, threshold);
  const auto [iE, il] = detail::kernel_integrals(cn);
  return -il / iE;
}

}  // namespace zgkn

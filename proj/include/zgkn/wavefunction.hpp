#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "zgkn/eigenmaps.hpp"
#include "zgkn/errors.hpp"
#include "zgkn/flows.hpp"
#include "zgkn/model.hpp"
#include "zgkn/ode.hpp"
#include "zgkn/orbits.hpp"

namespace zgkn {

struct ProfileOptions {
  double ds = 0.1;          // radial grid step in the stretched coordinate
  double inner_ratio = 50;  // how much finer the grid is near r = 0 than far out
  double dtau = 0.01;       // angular grid step in tau, theta = 2 atan(e^tau)
  double theta_fit_eps = 1e-4;
  double connector_threshold = 1e-6;
  bool require_connector = true;
};

/// Stretched radial coordinate s(r) = r + c asinh(r/a): fine near the ring, uniform far out.
struct RadialMap {
  double a = 0.1, c = 0.0;

  double s_of_r(double r) const { return r + c * std::asinh(r / a); }
  double ds_dr(double r) const { return 1.0 + c / std::sqrt(r * r + a * a); }
  double r_of_s(double s) const {
    // odd and increasing with s(r) >= r, so |r| lies in [0, |s|]; safeguarded Newton
    const double t = std::abs(s);
    double lo = 0.0, hi = t, r = t / (1.0 + c / a);
    for (int k = 0; k < 100; ++k) {
      const double f = s_of_r(r) - t;
      if (f > 0) hi = r;
      else lo = r;
      double next = r - f / ds_dr(r);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - r) <= 1e-16 * std::max(1.0, r)) {
        r = next;
        break;
      }
      r = next;
    }
    return std::copysign(r, s);
  }
};

struct RadialProfile {
  std::vector<double> r, omega, lnR;
  RadialMap map;
  double ds = 0.0;
  double tail_slope_minus = 0.0, tail_slope_plus = 0.0;  // d lnR/dr at the grid ends
  double decay_fit_minus = 0.0, decay_fit_plus = 0.0;    // fitted exponential rates
  double decay_exponent_fit = 0.0;
  double E = 0.0, lambda = 0.0, kappa = 0.5, a = 0.1, gamma = 0.0;
};

struct AngularProfile {
  std::vector<double> tau, theta, Theta, lnS;
  double dtau = 0.0;
  double exponent_fit_0 = 0.0, exponent_fit_pi = 0.0;
  double endpoint_exponent_fit = 0.0;
  double E = 0.0, lambda = 0.0, kappa = 0.5, a = 0.1;
};

namespace detail {

/// Least squares for lnR = b - k|r| + c ln|r|; returns k.
inline double fit_decay_rate(const std::vector<double>& r, const std::vector<double>& lnR) {
  double A[3][3] = {}, y[3] = {};
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x[3] = {1.0, -std::abs(r[i]), std::log(std::abs(r[i]))};
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) A[p][q] += x[p] * x[q];
      y[p] += x[p] * lnR[i];
    }
  }
  auto det3 = [](double M[3][3]) {
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
  };
  const double D = det3(A);
  double B[3][3];
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) B[p][q] = q == 1 ? y[p] : A[p][q];
  return det3(B) / D;
}

inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

/// First derivative on a uniform grid: 4th-order centered inside, 2nd-order one-sided at the ends.
inline std::vector<double> derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 5) throw GridMismatchError("derivative needs at least five points");
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (-f[i + 2] + 8 * f[i + 1] - 8 * f[i - 1] + f[i - 2]) / (12 * h);
  d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
  d[1] = (f[2] - f[0]) / (2 * h);
  d[n - 2] = (f[n - 1] - f[n - 3]) / (2 * h);
  d[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
  return d;
}

/// Composite Simpson on a uniform grid with an even number of intervals.
inline double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 3 || n % 2 == 0) throw GridMismatchError("Simpson needs an odd number of points");
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

inline double ln_r_rate(double r, double Om, const FlowParams& p) {
  const double w = std::sqrt(r * r + p.a * p.a);
  return (r / w) * std::sin(Om) - (p.lambda / w) * std::cos(Om);
}

/// d lnS / d tau (d lnS/d theta times sin theta).
inline double ln_s_rate_tau(double tau, double Th, const FlowParams& p) {
  const double s = 1.0 / std::cosh(tau), c = -std::tanh(tau);
  return -p.a * c * s * std::sin(Th) - (p.a * p.E * s * s - p.kappa) * std::cos(Th);
}

inline void check_connector(FlowKind kind, const FlowParams& fp, const IntegratorControls& c,
                            const ProfileOptions& o) {
  if (!o.require_connector) return;
  const double phi = mismatch_value(kind, fp, c);
  if (!(std::abs(phi) < o.connector_threshold)) {
    std::ostringstream os;
    os << (kind == FlowKind::Theta ? "Theta" : "Omega") << " orbit is not a connector: |Phi| = " << std::abs(phi);
    throw NotAConnectorError(os.str());
  }
}

/// Both halves of a connector with the log-amplitude carried along, gauged to zero at t = 0.
template <class Rate>
std::array<ode::Trajectory<2>, 2> amplitude_legs(FlowKind kind, const FlowParams& fp, const IntegratorControls& c,
                                                Rate rate) {
  const auto eq = equilibria(kind, fp);
  std::array<ode::Trajectory<2>, 2> legs;
  for (int side = 0; side < 2; ++side) {
    const auto L = launch_point(kind, fp, side == 0 ? Which::Wminus : Which::Wplus, eq, c);
    auto f = [&](double t, const ode::State<2>& y) {
      const double dy = kind == FlowKind::Theta ? theta_rhs_tau(t, y[0], fp) : radial_rhs(t, y[0], fp);
      return ode::State<2>{dy, rate(t, y[0], fp)};
    };
    ode::Settings st = c.settings();
    ode::integrate<2>(f, L.t_launch, ode::State<2>{L.y_launch, 0.0}, 0.0, st, &legs[side]);
    const double shift = legs[side].y.back()[1];
    for (auto& y : legs[side].y) y[1] -= shift;
    for (auto& sg : legs[side].segments)
      sg.r[0][1] -= shift;  // dense output keeps the gauge too
  }
  return legs;
}

}  // namespace detail

inline RadialProfile radial_profile(const NormalizedParams& p, double E, double lambda,
                                    const IntegratorControls& c = {}, const ProfileOptions& o = {}) {
  const FlowParams fp = flow_params(p, E, lambda);
  detail::check_connector(FlowKind::Omega, fp, c, o);
  auto legs = detail::amplitude_legs(FlowKind::Omega, fp, c, detail::ln_r_rate);

  RadialProfile rp;
  rp.E = E, rp.lambda = lambda, rp.kappa = p.kappa, rp.a = p.a, rp.gamma = p.gamma;
  rp.map = {p.a, (o.inner_ratio - 1.0) * p.a};
  rp.ds = o.ds;
  const double R = c.r_max_for(E);
  const int N = static_cast<int>(std::floor(rp.map.s_of_r(R) / o.ds));
  if (N < 4) throw GridMismatchError("radial grid too coarse for the integration range");
  for (int i = -N; i <= N; ++i) {
    const double r = i == 0 ? 0.0 : rp.map.r_of_s(i * o.ds);
    const auto y = (i <= 0 ? legs[0] : legs[1]).at(r);
    rp.r.push_back(r);
    rp.omega.push_back(y[0]);
    rp.lnR.push_back(y[1]);
  }
  rp.tail_slope_minus = detail::ln_r_rate(rp.r.front(), rp.omega.front(), fp);
  rp.tail_slope_plus = detail::ln_r_rate(rp.r.back(), rp.omega.back(), fp);

  // fits on the outer 20% of each side
  std::vector<double> xm, ym, xp, yp;
  const double cut = 0.8 * rp.r.back();
  for (std::size_t i = 0; i < rp.r.size(); ++i) {
    if (rp.r[i] <= -cut) xm.push_back(rp.r[i]), ym.push_back(rp.lnR[i]);
    if (rp.r[i] >= cut) xp.push_back(rp.r[i]), yp.push_back(rp.lnR[i]);
  }
  rp.decay_fit_minus = detail::fit_decay_rate(xm, ym);
  rp.decay_fit_plus = detail::fit_decay_rate(xp, yp);
  rp.decay_exponent_fit = 0.5 * (rp.decay_fit_minus + rp.decay_fit_plus);
  return rp;
}

/// lnR beyond the grid: exponential continuation matching value and slope at the grid end.
inline double radial_tail(const RadialProfile& rp, double r) {
  if (r >= rp.r.back()) return rp.lnR.back() + rp.tail_slope_plus * (r - rp.r.back());
  if (r <= rp.r.front()) return rp.lnR.front() + rp.tail_slope_minus * (r - rp.r.front());
  throw RangeError("radial_tail called inside the grid");
}

inline AngularProfile angular_profile(const NormalizedParams& p, double E, double lambda,
                                      const IntegratorControls& c = {}, const ProfileOptions& o = {}) {
  const FlowParams fp = flow_params(p, E, lambda);
  detail::check_connector(FlowKind::Theta, fp, c, o);
  auto legs = detail::amplitude_legs(FlowKind::Theta, fp, c, detail::ln_s_rate_tau);

  AngularProfile ap;
  ap.E = E, ap.lambda = lambda, ap.kappa = p.kappa, ap.a = p.a;
  ap.dtau = o.dtau;
  const double T = std::min(-legs[0].t.front(), legs[1].t.front());
  const int M = static_cast<int>(std::floor(T / o.dtau));
  if (M < 4) throw GridMismatchError("angular grid too coarse");
  for (int j = -M; j <= M; ++j) {
    const double t = j * o.dtau;
    const auto y = (j <= 0 ? legs[0] : legs[1]).at(t);
    ap.tau.push_back(t);
    ap.theta.push_back(theta_of_tau(t));
    ap.Theta.push_back(y[0]);
    ap.lnS.push_back(y[1]);
  }

  // log-log slopes over [eps, 10 eps] at each pole
  std::vector<double> x0, y0, x1, y1;
  const double eps = o.theta_fit_eps;
  for (std::size_t j = 0; j < ap.tau.size(); ++j) {
    const double th = ap.theta[j], tp = M_PI - th;
    if (th >= eps && th <= 10 * eps) x0.push_back(std::log(th)), y0.push_back(ap.lnS[j]);
    // near pi use tau directly: pi - theta = 2 atan(e^{-tau}) avoids cancellation
    const double tq = 2 * std::atan(std::exp(-ap.tau[j]));
    (void)tp;
    if (tq >= eps && tq <= 10 * eps) x1.push_back(std::log(tq)), y1.push_back(ap.lnS[j]);
  }
  if (x0.size() < 2 || x1.size() < 2) throw GridMismatchError("angular grid does not reach the fit window");
  ap.exponent_fit_0 = detail::fit_slope(x0, y0);
  ap.exponent_fit_pi = detail::fit_slope(x1, y1);
  ap.endpoint_exponent_fit = 0.5 * (ap.exponent_fit_0 + ap.exponent_fit_pi);
  return ap;
}

// --- bispinor -------------------------------------------------------------------------

inline const char* bispinor_convention() {
  return "R1=-i R e^{i Omega/2}, R2=i R e^{-i Omega/2}, S1=S sin(Theta/2), S2=S cos(Theta/2), delta=0";
}

struct BispinorSamples {
  std::vector<double> r, theta;
  // psi[i * theta.size() + j][k], component k at (r_i, theta_j)
  std::vector<std::array<std::complex<double>, 4>> psi;
  double kappa = 0.5, E = 0.0, t = 0.0, phi = 0.0;
  std::string convention = bispinor_convention();

  const std::array<std::complex<double>, 4>& at(std::size_t i, std::size_t j) const {
    return psi[i * theta.size() + j];
  }
};

inline std::array<std::complex<double>, 2> radial_pair(double lnR, double Om) {
  using namespace std::complex_literals;
  const double R = std::exp(lnR);
  return {-1i * R * std::exp(0.5i * Om), 1i * R * std::exp(-0.5i * Om)};
}

inline std::array<double, 2> angular_pair(double lnS, double Th) {
  const double S = std::exp(lnS);
  return {S * std::sin(0.5 * Th), S * std::cos(0.5 * Th)};
}

/// Components (R1 S1, R2 S2, R2 S1, R1 S2) e^{-i(Et - kappa phi)} on every stride-th grid point.
inline BispinorSamples assemble_bispinor(const RadialProfile& rad, const AngularProfile& ang, double kappa, double E,
                                         double t, double phi, std::size_t max_points = 129) {
  const double tol = 1e-12;
  if (std::abs(rad.E - ang.E) > tol || std::abs(rad.lambda - ang.lambda) > tol || rad.kappa != ang.kappa ||
      rad.kappa != kappa || std::abs(rad.E - E) > tol)
    throw GridMismatchError("radial and angular profiles belong to different (E, lambda, kappa)");
  using namespace std::complex_literals;
  BispinorSamples b;
  b.kappa = kappa, b.E = E, b.t = t, b.phi = phi;
  const std::size_t sr = std::max<std::size_t>(1, (rad.r.size() + max_points - 2) / (max_points - 1));
  const std::size_t st = std::max<std::size_t>(1, (ang.theta.size() + max_points - 2) / (max_points - 1));
  std::vector<std::size_t> ir, it;
  for (std::size_t i = 0; i < rad.r.size(); i += sr) ir.push_back(i);
  for (std::size_t j = 0; j < ang.theta.size(); j += st) it.push_back(j);
  const std::complex<double> phase = std::exp(-1i * (E * t - kappa * phi));
  for (auto i : ir) b.r.push_back(rad.r[i]);
  for (auto j : it) b.theta.push_back(ang.theta[j]);
  for (auto i : ir) {
    const auto R = radial_pair(rad.lnR[i], rad.omega[i]);
    for (auto j : it) {
      const auto S = angular_pair(ang.lnS[j], ang.Theta[j]);
      b.psi.push_back({phase * R[0] * S[0], phase * R[1] * S[1], phase * R[1] * S[0], phase * R[0] * S[1]});
    }
  }
  return b;
}

// --- norm -----------------------------------------------------------------------------

struct NormReport {
  double norm_squared = 0.0;
  double cross_term = 0.0;  // 4 pi a int R^2 sin(Omega)/varpi int S^2 sin(Theta) sin(theta)
  double R_norm2 = 0.0, S_norm2 = 0.0;
  double bound = 0.0;  // 8 pi ||R||^2 ||S||^2
  double min_weight = 0.0;
  bool bound_ok() const { return norm_squared <= bound; }
  double scale() const { return 1.0 / std::sqrt(norm_squared); }  // multiplies the gauged bispinor to unit norm
};

inline NormReport hilbert_norm(const RadialProfile& rad, const AngularProfile& ang) {
  if (!(rad.tail_slope_minus > 0 && rad.tail_slope_plus < 0))
    throw QuadratureError("radial profile does not decay at both ends");
  // radial integrals in s with Jacobian dr/ds
  std::vector<double> f1(rad.r.size()), f2(rad.r.size());
  std::vector<double> xr(rad.r.size());
  for (std::size_t i = 0; i < rad.r.size(); ++i) {
    const double r = rad.r[i], w = std::sqrt(r * r + rad.a * rad.a);
    const double R2 = std::exp(2 * rad.lnR[i]), jac = 1.0 / rad.map.ds_dr(r);
    f1[i] = R2 * jac;
    f2[i] = R2 * std::sin(rad.omega[i]) / w * jac;
    xr[i] = std::sin(rad.omega[i]) / w;
  }
  double Rn = detail::simpson(f1, rad.ds), Rx = detail::simpson(f2, rad.ds);
  {
    const double Rm2 = std::exp(2 * rad.lnR.front()), Rp2 = std::exp(2 * rad.lnR.back());
    const double km = 2 * rad.tail_slope_minus, kp = -2 * rad.tail_slope_plus;
    Rn += Rm2 / km + Rp2 / kp;
    Rx += Rm2 * xr.front() / km + Rp2 * xr.back() / kp;
  }
  // angular integrals in tau: d theta = sin(theta) d tau
  std::vector<double> g1(ang.tau.size()), g2(ang.tau.size()), ya(ang.tau.size());
  for (std::size_t j = 0; j < ang.tau.size(); ++j) {
    const double st = 1.0 / std::cosh(ang.tau[j]);
    const double S2 = std::exp(2 * ang.lnS[j]);
    g1[j] = S2 * st;
    g2[j] = S2 * std::sin(ang.Theta[j]) * st * st;
    ya[j] = std::sin(ang.Theta[j]) * st;
  }
  double Sn = detail::simpson(g1, ang.dtau), Sx = detail::simpson(g2, ang.dtau);
  {
    // S^2 ~ theta^{2 kappa} inside the first grid point at each pole
    const double th0 = ang.theta.front(), th1 = 2 * std::atan(std::exp(-ang.tau.back()));
    const double k2 = 2 * ang.kappa;
    Sn += std::exp(2 * ang.lnS.front()) * th0 / (k2 + 1) + std::exp(2 * ang.lnS.back()) * th1 / (k2 + 1);
    Sx += std::exp(2 * ang.lnS.front()) * ya.front() * th0 / (k2 + 2) +
          std::exp(2 * ang.lnS.back()) * ya.back() * th1 / (k2 + 2);
  }
  NormReport n;
  n.R_norm2 = Rn;
  n.S_norm2 = Sn;
  n.cross_term = 4 * M_PI * rad.a * Rx * Sx;
  n.norm_squared = 4 * M_PI * Rn * Sn + n.cross_term;
  n.bound = 8 * M_PI * Rn * Sn;
  const auto [xlo, xhi] = std::minmax_element(xr.begin(), xr.end());
  const auto [ylo, yhi] = std::minmax_element(ya.begin(), ya.end());
  const double prods[4] = {*xlo * *ylo, *xlo * *yhi, *xhi * *ylo, *xhi * *yhi};
  n.min_weight = 1.0 + rad.a * *std::min_element(prods, prods + 4);
  if (!std::isfinite(n.norm_squared) || !(n.norm_squared > 0))
    throw QuadratureError("norm quadrature is not finite and positive");
  return n;
}

// --- residuals ------------------------------------------------------------------------

struct ResidualReport {
  double max_radial = 0.0;     // T_rad R - E R, relative to local scale, interior points
  double max_angular = 0.0;    // T_ang S - lambda S, relative to local scale, interior points
  double max_hamiltonian = 0.0;  // H_rad (u, v) - E (u, v), same scaling
  double constancy_defect = 0.0;  // max | |R1|^2 - |R2|^2 |
  double edge_radial = 0.0, edge_angular = 0.0;  // the same at the second-order edge points
};

inline ResidualReport residuals(const RadialProfile& rad, const AngularProfile& ang, const NormalizedParams& p,
                                double E, double lambda) {
  using cd = std::complex<double>;
  using namespace std::complex_literals;
  ResidualReport rep;
  const double a = p.a, kappa = p.kappa, gamma = p.gamma;

  {
    const std::size_t n = rad.r.size();
    std::vector<double> re1(n), im1(n), re2(n), im2(n), u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto R = radial_pair(rad.lnR[i], rad.omega[i]);
      re1[i] = R[0].real(), im1[i] = R[0].imag(), re2[i] = R[1].real(), im2[i] = R[1].imag();
      const double Rm = std::exp(rad.lnR[i]);
      u[i] = std::sqrt(2.0) * Rm * std::cos(0.5 * rad.omega[i]);
      v[i] = std::sqrt(2.0) * Rm * std::sin(0.5 * rad.omega[i]);
      rep.constancy_defect = std::max(rep.constancy_defect, std::abs(std::norm(R[0]) - std::norm(R[1])));
    }
    auto d = [&](const std::vector<double>& f) {
      auto g = detail::derivative(f, rad.ds);
      for (std::size_t i = 0; i < n; ++i) g[i] *= rad.map.ds_dr(rad.r[i]);  // d/dr = (ds/dr) d/ds
      return g;
    };
    const auto dre1 = d(re1), dim1 = d(im1), dre2 = d(re2), dim2 = d(im2), du = d(u), dv = d(v);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = rad.r[i], w2 = r * r + a * a, w = std::sqrt(w2);
      const double V = (gamma * r + a * kappa) / w2;
      const cd R1{re1[i], im1[i]}, R2{re2[i], im2[i]}, dR1{dre1[i], dim1[i]}, dR2{dre2[i], dim2[i]};
      // d_pm = i d/dr -+ V
      const cd row1 = 1i * dR1 + V * R1 + (-r / w - 1i * lambda / w) * R2 - E * R1;
      const cd row2 = (-r / w + 1i * lambda / w) * R1 - (1i * dR2 - V * R2) - E * R2;
      const double Rm = std::exp(rad.lnR[i]);
      const double scale = Rm * (1.0 + std::abs(E) + std::abs(V) + (std::abs(r) + std::abs(lambda)) / w);
      const double res = std::max(std::abs(row1), std::abs(row2)) / scale;
      const double h1 = (r / w + V) * u[i] - dv[i] + lambda / w * v[i] - E * u[i];
      const double h2 = du[i] + lambda / w * u[i] + (-r / w + V) * v[i] - E * v[i];
      const double hres = std::max(std::abs(h1), std::abs(h2)) / (std::sqrt(2.0) * scale);
      if (i >= 2 && i + 2 < n) {
        rep.max_radial = std::max(rep.max_radial, res);
        rep.max_hamiltonian = std::max(rep.max_hamiltonian, hres);
      } else {
        rep.edge_radial = std::max(rep.edge_radial, res);
      }
    }
  }
  {
    const std::size_t n = ang.tau.size();
    std::vector<double> s1(n), s2(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto S = angular_pair(ang.lnS[j], ang.Theta[j]);
      s1[j] = S[0], s2[j] = S[1];
    }
    auto ds1 = detail::derivative(s1, ang.dtau), ds2 = detail::derivative(s2, ang.dtau);
    for (std::size_t j = 0; j < n; ++j) {
      const double st = 1.0 / std::cosh(ang.tau[j]), ct = -std::tanh(ang.tau[j]);
      const double F = a * E * st - kappa / st;
      // d/d theta = (1/sin theta) d/d tau
      const double dS1 = ds1[j] / st, dS2 = ds2[j] / st;
      const double lm_S2 = dS2 + F * s2[j];  // l_- S2
      const double lp_S1 = dS1 - F * s1[j];  // l_+ S1
      const double row1 = -a * ct * s1[j] - lm_S2 - lambda * s1[j];
      const double row2 = lp_S1 + a * ct * s2[j] - lambda * s2[j];
      const double scale = std::exp(ang.lnS[j]) * (a + std::abs(lambda) + std::abs(F));
      const double res = std::max(std::abs(row1), std::abs(row2)) / scale;
      if (j >= 2 && j + 2 < n) rep.max_angular = std::max(rep.max_angular, res);
      else rep.edge_angular = std::max(rep.edge_angular, res);
    }
  }
  return rep;
}

}  // namespace zgkn

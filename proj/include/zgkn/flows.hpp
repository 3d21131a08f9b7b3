#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "zgkn/errors.hpp"

namespace zgkn {

enum class FlowKind { Theta, Omega };

constexpr std::string_view to_string(FlowKind k) { return k == FlowKind::Theta ? "theta" : "omega"; }

struct FlowParams {
  double a = 0.1;
  double kappa = 0.5;
  double gamma = -0.2;  // Omega flow only
  double E = 0.95;
  double lambda = -0.9;
};

using Vec2 = std::array<double, 2>;

// --- right-hand sides ---------------------------------------------------------

inline Vec2 theta_rhs(double theta, double Th, const FlowParams& p) {
  const double s = std::sin(theta), c = std::cos(theta);
  return {s, -2 * p.a * s * c * std::cos(Th) + 2 * p.a * p.E * s * s * std::sin(Th) -
                 2 * p.kappa * std::sin(Th) + 2 * p.lambda * s};
}

/// Theta-flow in tau-time with theta = 2 atan(e^tau): only the Theta component.
/// sin and cos of theta come from sech/tanh so nothing is lost near the ends.
inline double theta_rhs_tau(double tau, double Th, const FlowParams& p) {
  const double s = 1.0 / std::cosh(tau), c = -std::tanh(tau);
  return -2 * p.a * s * c * std::cos(Th) + 2 * p.a * p.E * s * s * std::sin(Th) -
         2 * p.kappa * std::sin(Th) + 2 * p.lambda * s;
}

inline double theta_of_tau(double tau) { return 2.0 * std::atan(std::exp(tau)); }
inline double tau_of_theta(double theta) { return std::log(std::tan(0.5 * theta)); }

inline Vec2 omega_rhs(double xi, double Om, const FlowParams& p) {
  const double s = std::sin(xi), c = std::cos(xi);
  return {c * c, 2 * p.a * s * std::cos(Om) + 2 * p.lambda * c * std::sin(Om) + 2 * p.gamma * s * c +
                     2 * p.kappa * c * c - 2 * p.a * p.E};
}

inline double radial_rhs(double r, double Om, const FlowParams& p) {
  const double w2 = r * r + p.a * p.a;
  const double w = std::sqrt(w2);
  return 2 * (r / w) * std::cos(Om) + 2 * (p.lambda / w) * std::sin(Om) +
         2 * (p.a * p.kappa + p.gamma * r) / w2 - 2 * p.E;
}

inline double angular_rhs(double theta, double Th, const FlowParams& p) {
  const double s = std::sin(theta);
  if (!(theta > 0.0 && theta < M_PI) || s == 0.0)
    throw SingularPointError("angular_rhs is singular at theta in {0, pi}; use theta_rhs");
  return -2 * p.a * std::cos(theta) * std::cos(Th) + 2 * (p.a * p.E * s - p.kappa / s) * std::sin(Th) +
         2 * p.lambda;
}

/// y-component of the chosen flow, (x, y) = (theta, Theta) or (xi, Omega).
inline double flow_g(FlowKind k, double x, double y, const FlowParams& p) {
  return k == FlowKind::Theta ? theta_rhs(x, y, p)[1] : omega_rhs(x, y, p)[1];
}

// --- equilibria ---------------------------------------------------------------

struct Equilibrium {
  double x = 0.0;
  double y = 0.0;
  Vec2 eigenvalues{};
};

struct EquilibriumSet {
  FlowKind kind = FlowKind::Theta;
  Equilibrium s_minus, n_minus, s_plus, n_plus;
  Vec2 unstable_direction_minus{};  // unit, pointing into the cylinder
  Vec2 stable_direction_plus{};     // unit, pointing out of the cylinder at S+
  double saddle_slope = 0.0;        // Theta flow only
  double w0 = 0.0;                  // (s+ - n-)/2pi
  // (n+ - s-)/2pi. Equals w0 + 1: it is w0 for the N- lift that makes
  // s- - n- = n+ - s+ hold exactly rather than mod 2pi.
  double w0_cover = 0.0;
  double x_minus = 0.0, x_plus = 0.0;
};

inline Vec2 unit(Vec2 v) {
  const double n = std::hypot(v[0], v[1]);
  return {v[0] / n, v[1] / n};
}

inline EquilibriumSet equilibria(FlowKind kind, const FlowParams& p) {
  EquilibriumSet eq;
  eq.kind = kind;
  if (kind == FlowKind::Theta) {
    const double k = p.kappa;
    if (k == 0.0) throw DegenerateEquilibriaError("kappa = 0 makes the Theta-flow equilibria non-hyperbolic");
    eq.x_minus = 0.0;
    eq.x_plus = M_PI;
    if (k > 0) {
      eq.s_minus = {0.0, 0.0, {1.0, -2 * k}};
      eq.n_minus = {0.0, M_PI, {1.0, 2 * k}};
      eq.s_plus = {M_PI, -M_PI, {-1.0, 2 * k}};
      eq.n_plus = {M_PI, 0.0, {-1.0, -2 * k}};
      eq.unstable_direction_minus = unit({k + 0.5, p.lambda - p.a});
      eq.saddle_slope = (p.lambda - p.a) / (k + 0.5);
    } else {
      // roles of the boundary equilibria swap for negative kappa
      const double ak = -k;
      eq.s_minus = {0.0, -M_PI, {1.0, 2 * k}};
      eq.n_minus = {0.0, 0.0, {1.0, -2 * k}};
      eq.s_plus = {M_PI, 0.0, {-1.0, -2 * k}};
      eq.n_plus = {M_PI, M_PI, {-1.0, 2 * k}};
      eq.unstable_direction_minus = unit({ak + 0.5, p.lambda + p.a});
      eq.saddle_slope = (p.lambda + p.a) / (ak + 0.5);
    }
    eq.stable_direction_plus = eq.unstable_direction_minus;
  } else {
    if (!(std::abs(p.E) < 1.0)) {
      std::ostringstream os;
      os << "Omega-flow equilibria coalesce at |E| >= 1 (E=" << p.E << ")";
      throw DegenerateEquilibriaError(os.str());
    }
    const double ac = std::acos(p.E);
    const double mu = 2 * p.a * std::sqrt(1 - p.E * p.E);
    eq.x_minus = -M_PI / 2;
    eq.x_plus = M_PI / 2;
    eq.s_minus = {-M_PI / 2, -M_PI + ac, {0.0, -mu}};
    eq.n_minus = {-M_PI / 2, M_PI - ac, {0.0, mu}};
    eq.s_plus = {M_PI / 2, -ac, {0.0, mu}};
    eq.n_plus = {M_PI / 2, ac, {0.0, -mu}};
    eq.unstable_direction_minus = {1.0, 0.0};
    eq.stable_direction_plus = {1.0, 0.0};
  }
  eq.w0 = (eq.s_plus.y - eq.n_minus.y) / (2 * M_PI);
  eq.w0_cover = (eq.n_plus.y - eq.s_minus.y) / (2 * M_PI);
  return eq;
}

// --- nullcline classification ---------------------------------------------------

enum class Regime { SubCritical, SuperCritical, Indeterminate };

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::SubCritical: return "subcritical";
    case Regime::SuperCritical: return "supercritical";
    case Regime::Indeterminate: return "indeterminate";
  }
  return "?";
}

struct NullclineReport {
  FlowKind kind = FlowKind::Theta;
  Regime regime = Regime::Indeterminate;
  double lambda_c = 0.0;          // Theta
  double E_l = 0.0, E_h = 0.0;    // Omega
  std::array<double, 5> quartic{};  // c0..c4, Omega
  double delta_plus = 0.0, delta_minus = 0.0;
  double delta_tilde_plus = 0.0, delta_tilde_minus = 0.0;
  bool kappa_caveat = false;  // formulas derived for |kappa| = 1/2 only
};

inline double energy_lower(double a, double gamma, double lambda) {
  const double t = lambda + a - 0.5;
  return (1.0 / (2 * a)) * (-lambda + a + 0.5 - std::sqrt(t * t + gamma * gamma));
}

inline double energy_upper(double a, double gamma, double lambda) {
  const double t = lambda * lambda - a * a + a;
  return (1.0 / (4 * a * a)) *
         (lambda * lambda + 3 * a * a + a - std::sqrt(t * t + 4 * a * a * gamma * gamma));
}

inline void check_param_range(double a, double gamma, double lambda) {
  if (!(a > 0 && a < 0.5)) {
    std::ostringstream os;
    os << "a=" << a << " outside (0, 1/2)";
    throw RangeError(os.str());
  }
  const double gb = std::sqrt(2 * a * (1 - 2 * a));
  if (!(gamma < 0 && gamma >= -gb * (1 + 1e-12))) {
    std::ostringstream os;
    os << "gamma=" << gamma << " outside [-" << gb << ", 0)";
    throw RangeError(os.str());
  }
  if (!(lambda >= -1 - a - 1e-12 && lambda <= -1 + a + 1e-12)) {
    std::ostringstream os;
    os << "lambda=" << lambda << " outside [" << -1 - a << ", " << -1 + a << "]";
    throw RangeError(os.str());
  }
}

inline NullclineReport classify_nullclines(FlowKind kind, const FlowParams& p) {
  NullclineReport r;
  r.kind = kind;
  r.kappa_caveat = std::abs(std::abs(p.kappa) - 0.5) > 1e-12;
  if (kind == FlowKind::Theta) {
    r.lambda_c = -0.5 + p.a * p.E;
    r.regime = std::abs(p.lambda) < 0.5 - p.a * p.E ? Regime::SubCritical : Regime::SuperCritical;
  } else {
    check_param_range(p.a, p.gamma, p.lambda);
    const double a = p.a, g = p.gamma, l = p.lambda, E = p.E;
    r.E_l = energy_lower(a, g, l);
    r.E_h = energy_upper(a, g, l);
    const double h = 0.5 - a * E;
    r.quartic = {l * l - h * h, -2 * g * h, l * l - g * g + a * a + 2 * a * h, 2 * g * a * E,
                 a * a * (1 - E * E)};
    const double w = a * (1 - 2 * a * E);
    r.delta_plus = g * g - 2 * (1 - E) * (l * l + a * a + w);
    r.delta_minus = g * g - 2 * (1 + E) * (l * l + a * a - w);
    r.delta_tilde_plus = g * g - 2 * (1 - E) * (-2 * a * l + w);
    r.delta_tilde_minus = g * g - 2 * (1 + E) * (-2 * a * l - w);
    r.regime = E < r.E_l ? Regime::SubCritical : (E > r.E_h ? Regime::SuperCritical : Regime::Indeterminate);
  }
  if (r.kappa_caveat) r.regime = Regime::Indeterminate;
  return r;
}

// --- nullcline sampling ---------------------------------------------------------

struct Polyline {
  std::vector<Vec2> points;  // (x, y) with y unwrapped along the curve
};

namespace detail {

/// Real roots of A T^2 + B T + C = 0 mapped to angles 2 atan T in (-pi, pi].
inline std::vector<double> half_angle_roots(double A, double B, double C) {
  std::vector<double> out;
  const double scale = std::max({std::abs(A), std::abs(B), std::abs(C)});
  if (scale == 0.0) return out;
  if (std::abs(A) <= 1e-15 * scale) {
    out.push_back(M_PI);  // T = infinity
    if (B != 0.0) out.push_back(2 * std::atan(-C / B));
    return out;
  }
  const double disc = B * B - 4 * A * C;
  if (disc < 0) return out;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (B + (B >= 0 ? sq : -sq));
  const double t1 = q / A;
  out.push_back(2 * std::atan(t1));
  if (q != 0.0) out.push_back(2 * std::atan(C / q));
  else out.push_back(2 * std::atan(t1));
  return out;
}

inline double circ_dist(double u, double v) {
  double d = std::fmod(u - v, 2 * M_PI);
  if (d > M_PI) d -= 2 * M_PI;
  if (d < -M_PI) d += 2 * M_PI;
  return d;
}

}  // namespace detail

/// Zero set of the flow's g as polylines, by column-wise root solving in
/// T = tan(y/2) and nearest-neighbour continuation between columns.
inline std::vector<Polyline> sample_nullclines(FlowKind kind, const FlowParams& p, int grid) {
  if (grid < 16) throw InvalidParameterError("sample_nullclines: grid must be at least 16");
  const double x0 = kind == FlowKind::Theta ? 0.0 : -M_PI / 2;
  const double x1 = kind == FlowKind::Theta ? M_PI : M_PI / 2;
  const double dx = (x1 - x0) / (grid - 1);

  std::vector<Polyline> done;
  std::vector<Polyline> active;
  for (int j = 0; j < grid; ++j) {
    const double x = j == grid - 1 ? x1 : x0 + j * dx;
    const double s = std::sin(x), c = std::cos(x);
    double A, B, C;
    if (kind == FlowKind::Theta) {
      A = 2 * s * (p.lambda + p.a * c);
      B = 4 * p.a * p.E * s * s - 4 * p.kappa;
      C = 2 * s * (p.lambda - p.a * c);
    } else {
      const double K = 2 * p.gamma * s * c + 2 * p.kappa * c * c - 2 * p.a * p.E;
      A = K - 2 * p.a * s;
      B = 4 * p.lambda * c;
      C = K + 2 * p.a * s;
    }
    std::vector<double> roots = detail::half_angle_roots(A, B, C);
    // a double root reported twice at a fold is one point
    if (roots.size() == 2 && std::abs(detail::circ_dist(roots[0], roots[1])) < 1e-12) roots.pop_back();

    std::vector<bool> used(roots.size(), false);
    std::vector<Polyline> next;
    // greedy matching of active curve ends to roots, smallest jump first
    struct Cand { double d; std::size_t curve, root; };
    std::vector<Cand> cands;
    for (std::size_t ci = 0; ci < active.size(); ++ci)
      for (std::size_t ri = 0; ri < roots.size(); ++ri)
        cands.push_back({std::abs(detail::circ_dist(roots[ri], active[ci].points.back()[1])), ci, ri});
    std::sort(cands.begin(), cands.end(), [](const Cand& u, const Cand& v) { return u.d < v.d; });
    std::vector<bool> matched(active.size(), false);
    for (const auto& cd : cands) {
      if (matched[cd.curve] || used[cd.root] || cd.d >= M_PI / 2) continue;
      matched[cd.curve] = used[cd.root] = true;
      const double yprev = active[cd.curve].points.back()[1];
      active[cd.curve].points.push_back({x, yprev + detail::circ_dist(roots[cd.root], yprev)});
    }
    for (std::size_t ci = 0; ci < active.size(); ++ci) {
      if (matched[ci]) next.push_back(std::move(active[ci]));
      else done.push_back(std::move(active[ci]));
    }
    for (std::size_t ri = 0; ri < roots.size(); ++ri)
      if (!used[ri]) next.push_back(Polyline{{{x, roots[ri]}}});
    active = std::move(next);
  }
  for (auto& pl : active) done.push_back(std::move(pl));

  // join branches that meet at a fold: end points in adjacent columns, close in y
  auto close = [&](const Vec2& u, const Vec2& v) {
    return std::abs(u[0] - v[0]) <= 1.01 * dx && std::abs(detail::circ_dist(u[1], v[1])) < 0.5;
  };
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < done.size() && !merged; ++i) {
      for (std::size_t k = i + 1; k < done.size() && !merged; ++k) {
        auto& u = done[i].points;
        auto& v = done[k].points;
        if (u.size() < 2 || v.size() < 2) continue;
        // only fold joins: both ends at the same column side, x turning back
        if (close(u.back(), v.back()) && u.back()[0] == v.back()[0]) {
          std::reverse(v.begin(), v.end());
        } else if (close(u.front(), v.front()) && u.front()[0] == v.front()[0]) {
          std::reverse(u.begin(), u.end());
        } else {
          continue;
        }
        const double shift = u.back()[1] + detail::circ_dist(v.front()[1], u.back()[1]) - v.front()[1];
        for (auto& pt : v) u.push_back({pt[0], pt[1] + shift});
        done.erase(done.begin() + static_cast<long>(k));
        merged = true;
      }
    }
  }
  return done;
}

}  // namespace zgkn

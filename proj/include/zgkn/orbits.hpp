#pragma once

#include <math.h>  // boost 1.74 pchip calls isnan unqualified

#include <algorithm>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "zgkn/errors.hpp"
#include "zgkn/flows.hpp"
#include "zgkn/ode.hpp"

namespace zgkn {

struct IntegratorControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double launch_offset = 1e-6;
  double max_step = 0.0;
  std::size_t max_steps = 200000;
  double r_max = 0.0;  // 0 selects 60/sqrt(1-E^2) capped at 1e4

  double r_max_for(double E) const {
    if (r_max > 0) return r_max;
    const double q = std::sqrt(std::max(0.0, 1.0 - E * E));
    return q > 0 ? std::min(60.0 / q, 1e4) : 1e4;
  }

  ode::Settings settings() const {
    ode::Settings s;
    s.rel_tol = rel_tol;
    s.abs_tol = abs_tol;
    s.max_step = max_step;
    s.max_steps = max_steps;
    s.angle_mask = 1u;
    return s;
  }

  IntegratorControls tightened(double factor) const {
    IntegratorControls c = *this;
    c.rel_tol /= factor;
    c.abs_tol /= factor;
    return c;
  }
};

enum class Which { Wminus, Wplus };
enum class EqLabel { SMinus, NMinus, SPlus, NPlus, None };

constexpr std::string_view to_string(Which w) { return w == Which::Wminus ? "W-" : "W+"; }
constexpr std::string_view to_string(EqLabel l) {
  switch (l) {
    case EqLabel::SMinus: return "S-";
    case EqLabel::NMinus: return "N-";
    case EqLabel::SPlus: return "S+";
    case EqLabel::NPlus: return "N+";
    case EqLabel::None: return "none";
  }
  return "?";
}

/// Far-end limit of an orbit: a named boundary equilibrium lifted by 2 pi k.
struct Terminal {
  EqLabel label = EqLabel::None;
  int cover = 0;
  double y = 0.0;
  double distance = std::numeric_limits<double>::infinity();

  bool classified() const { return label != EqLabel::None; }
  bool at_saddle() const { return label == EqLabel::SMinus || label == EqLabel::SPlus; }
};

struct OrbitSample {
  double t;  // integration variable: tau (Theta flow) or r (Omega flow)
  double x;  // cylinder coordinate: theta or xi
  double y;  // unwrapped angle
};

struct Orbit {
  FlowKind kind = FlowKind::Theta;
  Which which = Which::Wminus;
  FlowParams params;
  std::vector<OrbitSample> samples;  // increasing x
  EqLabel origin = EqLabel::None;
  Terminal terminal;
  Vec2 launch_direction{};
  double t_mid = 0.0;
  double y_mid = 0.0;
  // dense output of the two integration legs (launch to midpoint, midpoint to far end)
  ode::Trajectory<1> leg_in, leg_out;

  double y_start() const { return samples.front().y; }
  double y_end() const { return samples.back().y; }

  /// y at integration time t, from the dense output.
  double y_at(double t) const {
    const auto& near = leg_in;
    const double lo = std::min(near.t_front(), near.t_back()), hi = std::max(near.t_front(), near.t_back());
    if (t >= lo && t <= hi) return near.at(t)[0];
    return leg_out.at(t)[0];
  }
};

inline double cylinder_x(FlowKind kind, double t, double a) {
  return kind == FlowKind::Theta ? theta_of_tau(t) : std::atan2(t, a);
}

namespace detail {

/// Quasi-equilibrium of the radial equation at large |r|: Newton from the saddle value.
inline double radial_seed(double r, double guess, const FlowParams& p) {
  double y = guess;
  const double w = std::sqrt(r * r + p.a * p.a);
  for (int i = 0; i < 50; ++i) {
    const double f = radial_rhs(r, y, p);
    const double df = -2 * (r / w) * std::sin(y) + 2 * (p.lambda / w) * std::cos(y);
    if (df == 0.0) break;
    const double step = f / df;
    y -= std::clamp(step, -0.5, 0.5);
    if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(y))) break;
  }
  if (std::abs(radial_rhs(r, y, p)) > 1e-8 || std::abs(y - guess) > 1.0) return guess;
  return y;
}

struct Launch {
  double t_launch;
  double y_launch;
  double t_far;
  Vec2 direction;
};

inline Launch launch_point(FlowKind kind, const FlowParams& p, Which which, const EquilibriumSet& eq,
                           const IntegratorControls& c) {
  Launch L;
  if (kind == FlowKind::Theta) {
    const Vec2 u = eq.unstable_direction_minus;
    const double eps = c.launch_offset;
    const double th0 = eps * u[0];
    const double tau0 = tau_of_theta(th0);
    L.direction = u;
    if (which == Which::Wminus) {
      L.t_launch = tau0;
      L.y_launch = eq.s_minus.y + eps * u[1];
      L.t_far = -tau0;
    } else {
      L.t_launch = -tau0;
      L.y_launch = eq.s_plus.y - eps * u[1];
      L.t_far = tau0;
    }
  } else {
    const double R = c.r_max_for(p.E);
    L.direction = {1.0, 0.0};
    if (which == Which::Wminus) {
      L.t_launch = -R;
      L.y_launch = radial_seed(-R, eq.s_minus.y, p);
      L.t_far = R;
    } else {
      L.t_launch = R;
      L.y_launch = radial_seed(R, eq.s_plus.y, p);
      L.t_far = -R;
    }
  }
  return L;
}

template <class F>
auto with_rhs(FlowKind kind, const FlowParams& p, F&& body) {
  if (kind == FlowKind::Theta) {
    auto f = [p](double t, const ode::State<1>& y) { return ode::State<1>{theta_rhs_tau(t, y[0], p)}; };
    return body(f);
  }
  auto f = [p](double t, const ode::State<1>& y) { return ode::State<1>{radial_rhs(t, y[0], p)}; };
  return body(f);
}

inline double min_gap(const EquilibriumSet& eq, bool far_plus) {
  const double s = far_plus ? eq.s_plus.y : eq.s_minus.y;
  const double n = far_plus ? eq.n_plus.y : eq.n_minus.y;
  const double d = std::abs(std::remainder(n - s, 2 * M_PI));
  return std::min(d, 2 * M_PI - d);
}

}  // namespace detail

/// Snaps an end value to the nearest lifted boundary equilibrium within a
/// quarter of the smallest S/N separation on that boundary.
inline Terminal classify_terminal(double y, bool far_plus, const EquilibriumSet& eq) {
  Terminal best;
  const double tol = 0.25 * detail::min_gap(eq, far_plus);
  const Equilibrium& s = far_plus ? eq.s_plus : eq.s_minus;
  const Equilibrium& n = far_plus ? eq.n_plus : eq.n_minus;
  for (auto [e, label] : {std::pair{&s, far_plus ? EqLabel::SPlus : EqLabel::SMinus},
                          std::pair{&n, far_plus ? EqLabel::NPlus : EqLabel::NMinus}}) {
    const int k = static_cast<int>(std::lround((y - e->y) / (2 * M_PI)));
    const double d = std::abs(y - (e->y + 2 * M_PI * k));
    if (d < best.distance) {
      best.distance = d;
      best.cover = k;
      best.y = e->y + 2 * M_PI * k;
      best.label = label;
    }
  }
  if (best.distance > tol) best.label = EqLabel::None;
  return best;
}

inline Orbit integrate_distinguished(FlowKind kind, const FlowParams& p, Which which,
                                     const IntegratorControls& c = {}) {
  const EquilibriumSet eq = equilibria(kind, p);
  const auto L = detail::launch_point(kind, p, which, eq, c);
  const auto settings = c.settings();

  Orbit o;
  o.kind = kind;
  o.which = which;
  o.params = p;
  o.origin = which == Which::Wminus ? EqLabel::SMinus : EqLabel::SPlus;
  o.launch_direction = L.direction;
  o.t_mid = 0.0;

  detail::with_rhs(kind, p, [&](auto& f) {
    ode::Stats st;
    auto ym = ode::integrate<1>(f, L.t_launch, ode::State<1>{L.y_launch}, 0.0, settings, &o.leg_in, &st);
    o.y_mid = ym[0];
    ode::integrate<1>(f, 0.0, ym, L.t_far, settings, &o.leg_out, &st, st.last_h);
    return 0;
  });

  // stitch legs in order of increasing x
  std::vector<OrbitSample> s;
  s.reserve(o.leg_in.size() + o.leg_out.size());
  for (std::size_t i = 0; i < o.leg_in.size(); ++i)
    s.push_back({o.leg_in.t[i], cylinder_x(kind, o.leg_in.t[i], p.a), o.leg_in.y[i][0]});
  for (std::size_t i = 1; i < o.leg_out.size(); ++i)
    s.push_back({o.leg_out.t[i], cylinder_x(kind, o.leg_out.t[i], p.a), o.leg_out.y[i][0]});
  if (which == Which::Wplus) std::reverse(s.begin(), s.end());
  o.samples = std::move(s);

  if (which == Which::Wminus)
    o.terminal = classify_terminal(o.y_end(), true, eq);
  else
    o.terminal = classify_terminal(o.y_start(), false, eq);
  return o;
}

/// Phi alone: both orbits are integrated only up to the matching point.
inline double mismatch_value(FlowKind kind, const FlowParams& p, const IntegratorControls& c = {}) {
  const EquilibriumSet eq = equilibria(kind, p);
  const auto settings = c.settings();
  return detail::with_rhs(kind, p, [&](auto& f) {
    const auto Lm = detail::launch_point(kind, p, Which::Wminus, eq, c);
    const auto Lp = detail::launch_point(kind, p, Which::Wplus, eq, c);
    const double ym = ode::integrate<1>(f, Lm.t_launch, ode::State<1>{Lm.y_launch}, 0.0, settings)[0];
    const double yp = ode::integrate<1>(f, Lp.t_launch, ode::State<1>{Lp.y_launch}, 0.0, settings)[0];
    return yp - ym;
  });
}

/// w0 - (y(inf) - y(-inf))/2pi with the limits taken as the launch saddle and
/// the classified terminal. Node-terminated orbits use w0_cover, so both
/// corridor windings are the same integer.
inline double winding_number(const Orbit& o, const EquilibriumSet& eq) {
  if (!o.terminal.classified()) throw IntegrationError("winding number of an unterminated orbit");
  const double dy = o.which == Which::Wminus ? o.terminal.y - eq.s_minus.y : eq.s_plus.y - o.terminal.y;
  return (o.terminal.at_saddle() ? eq.w0 : eq.w0_cover) - dy / (2 * M_PI);
}

/// Same quantity from the sampled end points, without snapping.
inline double raw_winding(const Orbit& o, const EquilibriumSet& eq) {
  const bool node = o.terminal.classified() && !o.terminal.at_saddle();
  return (node ? eq.w0_cover : eq.w0) - (o.y_end() - o.y_start()) / (2 * M_PI);
}

/// Integral of (y+ - y-) dx over the common x-range, on a uniform grid with
/// monotone cubic interpolation of both orbits.
inline double signed_area(const Orbit& minus, const Orbit& plus, int grid = 2048) {
  auto interp = [](const Orbit& o) {
    std::vector<double> xs, ys;
    xs.reserve(o.samples.size());
    ys.reserve(o.samples.size());
    for (const auto& s : o.samples) {
      if (!xs.empty() && s.x <= xs.back()) continue;
      xs.push_back(s.x);
      ys.push_back(s.y);
    }
    while (xs.size() < 4) {  // pchip needs four knots
      xs.insert(xs.begin() + 1, 0.5 * (xs[0] + xs[1]));
      ys.insert(ys.begin() + 1, 0.5 * (ys[0] + ys[1]));
    }
    return boost::math::interpolators::pchip<std::vector<double>>(std::move(xs), std::move(ys));
  };
  auto fm = interp(minus), fp = interp(plus);
  const double x0 = std::max(minus.samples.front().x, plus.samples.front().x);
  const double x1 = std::min(minus.samples.back().x, plus.samples.back().x);
  if (!(x1 > x0)) return 0.0;
  const double h = (x1 - x0) / (grid - 1);
  double acc = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = i == grid - 1 ? x1 : x0 + i * h;
    const double w = (i == 0 || i == grid - 1) ? 0.5 : 1.0;
    acc += w * (fp(x) - fm(x));
  }
  return acc * h;
}

struct ConnectorDiagnostics {
  double phi = 0.0;
  double winding_minus = 0.0;  // w(W-)
  double winding_plus = 0.0;   // w(W+)
  std::optional<int> k_plus;   // integer winding of W- when it ends at a node
  std::optional<int> k_minus;  // integer winding of W+ when it starts at a node
  double signed_area = 0.0;
  bool corridor_empty = true;
  Orbit minus, plus;
  EquilibriumSet equilibria;
};

inline ConnectorDiagnostics mismatch(FlowKind kind, const FlowParams& p, const IntegratorControls& c = {}) {
  ConnectorDiagnostics d;
  d.equilibria = equilibria(kind, p);
  d.minus = integrate_distinguished(kind, p, Which::Wminus, c);
  d.plus = integrate_distinguished(kind, p, Which::Wplus, c);
  d.phi = d.plus.y_mid - d.minus.y_mid;
  if (d.minus.terminal.classified()) d.winding_minus = winding_number(d.minus, d.equilibria);
  else d.winding_minus = std::numeric_limits<double>::quiet_NaN();
  if (d.plus.terminal.classified()) d.winding_plus = winding_number(d.plus, d.equilibria);
  else d.winding_plus = std::numeric_limits<double>::quiet_NaN();
  const bool node_minus = d.minus.terminal.classified() && !d.minus.terminal.at_saddle();
  const bool node_plus = d.plus.terminal.classified() && !d.plus.terminal.at_saddle();
  if (node_minus) d.k_plus = static_cast<int>(std::lround(d.winding_minus));
  if (node_plus) d.k_minus = static_cast<int>(std::lround(d.winding_plus));
  d.corridor_empty = !(node_minus && node_plus);
  d.signed_area = signed_area(d.minus, d.plus);
  return d;
}

}  // namespace zgkn

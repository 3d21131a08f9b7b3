#pragma once

// Dormand-Prince 5(4) with PI step control and continuous extension.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <vector>

#include "zgkn/errors.hpp"

namespace zgkn::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Settings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.0;  // 0 = unbounded
  std::size_t max_steps = 200000;
  // bit i set: component i is an angle; an accepted step may not move it by pi or more
  std::uint32_t angle_mask = 0;
};

template <std::size_t N>
struct Segment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<State<N>, 5> r{};

  State<N> operator()(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
    return y;
  }
};

/// Accepted steps of one integration leg, with dense output between them.
template <std::size_t N>
class Trajectory {
 public:
  std::vector<double> t;
  std::vector<State<N>> y;
  std::vector<Segment<N>> segments;

  bool empty() const { return t.empty(); }
  std::size_t size() const { return t.size(); }
  double t_front() const { return t.front(); }
  double t_back() const { return t.back(); }

  State<N> at(double tq) const {
    if (segments.empty()) return y.front();
    const bool fwd = t.back() >= t.front();
    // segment k spans [t[k], t[k+1]]
    std::size_t k;
    if (fwd) {
      auto it = std::upper_bound(t.begin(), t.end(), tq);
      k = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    } else {
      auto it = std::upper_bound(t.begin(), t.end(), tq, std::greater<double>());
      k = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    }
    k = std::min(k, segments.size() - 1);
    return segments[k](tq);
  }
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  double last_h = 0.0;
};

namespace detail {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

template <std::size_t N>
bool finite(const State<N>& y) {
  for (double v : y)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1 (either direction). Accepted steps
/// are appended to `traj` when given; the first call on an empty trajectory
/// also records the initial point. `h_hint` seeds the first step size.
template <std::size_t N, class Rhs>
State<N> integrate(Rhs&& f, double t0, State<N> y, double t1, const Settings& s,
                   Trajectory<N>* traj = nullptr, Stats* stats = nullptr, double h_hint = 0.0) {
  using namespace detail;
  Stats local;
  Stats& st = stats ? *stats : local;
  if (traj && traj->empty()) {
    traj->t.push_back(t0);
    traj->y.push_back(y);
  }
  if (t1 == t0) return y;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  const double hmax = s.max_step > 0 ? std::min(s.max_step, span) : span;

  auto errscale = [&](std::size_t, double a, double b) {
    return s.abs_tol + s.rel_tol * std::max(std::abs(a), std::abs(b));
  };

  State<N> k1 = f(t0, y);
  ++st.evaluations;
  if (!finite(k1)) throw IntegrationError("non-finite derivative at integration start");

  double h = std::abs(h_hint);
  if (h == 0.0) {
    // Hairer's starting-step heuristic
    double d0 = 0, dd1 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = errscale(i, y[i], y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      dd1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    dd1 = std::sqrt(dd1 / N);
    double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
    h0 = std::min(h0, hmax);
    State<N> y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h0 * k1[i];
    State<N> k2 = f(t0 + dir * h0, y1);
    ++st.evaluations;
    double d2 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = errscale(i, y[i], y[i]);
      d2 += ((k2[i] - k1[i]) / sc) * ((k2[i] - k1[i]) / sc);
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double m = std::max(dd1, d2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    h = std::min({100 * h0, h1, hmax});
  }
  h = std::min(h, hmax);

  double t = t0;
  double err_old = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;
  State<N> k2, k3, k4, k5, k6, k7, yt, ynew;

  while (dir * (t1 - t) > 0) {
    if (++steps > s.max_steps) {
      std::ostringstream os;
      os << "step budget of " << s.max_steps << " exhausted at t=" << t;
      throw IntegrationError(os.str());
    }
    if (dir * (t + dir * h - t1) > 0 || std::abs(t1 - (t + dir * h)) < 1e-12 * h) h = std::abs(t1 - t);
    const double hs = dir * h;

    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * a21 * k1[i];
    k2 = f(t + c2 * hs, yt);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * hs, yt);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * hs, yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * hs, yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(t + hs, yt);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = f(t + hs, ynew);
    st.evaluations += 6;

    double err = 0;
    bool ok = finite(ynew) && finite(k7);
    if (ok) {
      for (std::size_t i = 0; i < N; ++i) {
        const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double r = e / errscale(i, y[i], ynew[i]);
        err += r * r;
        if (((s.angle_mask >> i) & 1u) && std::abs(ynew[i] - y[i]) >= M_PI) ok = false;
      }
      err = std::sqrt(err / N);
    }

    if (!ok) {
      // non-finite state or an angle jump: halve and retry
      ++st.rejected;
      h *= 0.5;
      last_rejected = true;
      if (h < 1e-14 * std::max(1.0, std::abs(t)))
        throw IntegrationError("step size underflow (non-finite state or angle jump)");
      continue;
    }

    if (err <= 1.0) {
      if (traj) {
        Segment<N> seg;
        seg.t0 = t;
        seg.h = hs;
        for (std::size_t i = 0; i < N; ++i) {
          seg.r[0][i] = y[i];
          seg.r[1][i] = ynew[i] - y[i];
          seg.r[2][i] = hs * k1[i] - seg.r[1][i];
          seg.r[3][i] = seg.r[1][i] - hs * k7[i] - seg.r[2][i];
          seg.r[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        traj->segments.push_back(seg);
      }
      const bool reached = std::abs(t1 - (t + hs)) <= 1e-15 * std::max(1.0, std::abs(t1));
      t = reached ? t1 : t + hs;
      y = ynew;
      k1 = k7;
      ++st.accepted;
      st.last_h = h;
      if (traj) {
        traj->t.push_back(t);
        traj->y.push_back(y);
      }
      if (reached) break;
      err = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(err, -0.7 / 5) * std::pow(err_old, 0.4 / 5);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h = std::min(h * fac, hmax);
      err_old = err;
      last_rejected = false;
    } else {
      ++st.rejected;
      const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
      h *= fac;
      last_rejected = true;
      if (h < 1e-14 * std::max(1.0, std::abs(t)))
        throw IntegrationError("step size underflow at t=" + std::to_string(t));
    }
  }
  return y;
}

}  // namespace zgkn::ode

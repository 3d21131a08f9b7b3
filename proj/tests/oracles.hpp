#pragma once

// Reference computations used only by the tests. Deliberately simple and
// independent of the library's integrator and root finders.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// Classical fixed-step RK4 for a scalar ODE y' = f(t, y).
inline double rk4(const std::function<double(double, double)>& f, double t0, double y0, double t1, int n) {
  const double h = (t1 - t0) / n;
  double t = t0, y = y0;
  for (int i = 0; i < n; ++i) {
    const double k1 = f(t, y);
    const double k2 = f(t + h / 2, y + h / 2 * k1);
    const double k3 = f(t + h / 2, y + h / 2 * k2);
    const double k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return y;
}

/// Same, returning the whole path on the uniform grid.
inline std::vector<double> rk4_path(const std::function<double(double, double)>& f, double t0, double y0,
                                    double t1, int n) {
  std::vector<double> ys{y0};
  const double h = (t1 - t0) / n;
  double t = t0, y = y0;
  for (int i = 0; i < n; ++i) {
    const double k1 = f(t, y);
    const double k2 = f(t + h / 2, y + h / 2 * k1);
    const double k3 = f(t + h / 2, y + h / 2 * k2);
    const double k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
    ys.push_back(y);
  }
  return ys;
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

/// Plain bisection on a sign change, no secant steps.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters && hi - lo > 0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Indices i where sign(v[i]) != sign(v[i+1]).
inline std::vector<int> sign_changes(const std::vector<double>& v) {
  std::vector<int> out;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if ((v[i] < 0) != (v[i + 1] < 0)) out.push_back(static_cast<int>(i));
  return out;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611ULL);
  return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

}  // namespace oracle

#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "zgkn/errors.hpp"

namespace zgkn {

/// Physical inputs. Lengths in arbitrary units, m is an inverse length.
struct ModelParams {
  double a = 0.1;
  double m = 1.0;
  double e = 1.0;
  double Q = 0.2;
  double I = 0.2 / (M_PI * 0.1);
  double kappa = 0.5;
};

/// Dimensionless parameters with m = 1.
struct NormalizedParams {
  double a = 0.1;
  double gamma = -0.2;
  double kappa = 0.5;
  double E_scale = 1.0;
};

struct AdmissibilityReport {
  bool mass_condition = false;
  bool coupling_condition = false;
  bool separability = false;
  std::vector<std::string> messages;

  bool ok() const { return mass_condition && coupling_condition && separability; }
};

/// Records how a < 0 or sign(I) != sign(Q) inputs were mapped.
struct Canonicalized {
  ModelParams params;
  bool flipped_a = false;
  bool flipped_I = false;
};

inline bool is_half_integer(double kappa) {
  const double twice = 2.0 * kappa;
  const double r = std::round(twice);
  return std::abs(twice - r) < 1e-12 && std::abs(std::fmod(r, 2.0)) == 1.0;
}

inline Canonicalized canonicalize(const ModelParams& in) {
  Canonicalized c{in};
  if (c.params.a < 0) {
    c.params.a = -c.params.a;
    c.params.I = -c.params.I;
    c.flipped_a = true;
  }
  if (c.params.I != 0 && c.params.Q != 0 && std::signbit(c.params.I) != std::signbit(c.params.Q)) {
    c.params.I = -c.params.I;
    c.flipped_I = true;
  }
  return c;
}

inline NormalizedParams normalize(const ModelParams& p) {
  if (!(p.a > 0)) throw InvalidParameterError("ring radius a must be positive");
  if (!(p.m > 0)) throw InvalidParameterError("mass m must be positive");
  if (!is_half_integer(p.kappa)) {
    std::ostringstream os;
    os << "kappa=" << p.kappa << " is not a half-integer";
    throw InvalidParameterError(os.str());
  }
  return {p.m * p.a, -p.e * p.Q, p.kappa, p.m};
}

inline double coupling_bound(double a) { return std::sqrt(2.0 * a * (1.0 - 2.0 * a)); }

inline AdmissibilityReport check_admissibility(const ModelParams& p) {
  AdmissibilityReport r;
  const double ma = p.m * std::abs(p.a);
  r.mass_condition = 2.0 * ma < 1.0 && ma > 0;
  if (!r.mass_condition) {
    std::ostringstream os;
    os << "mass condition violated: 2ma = " << 2.0 * ma << " (need 0 < 2ma < 1)";
    r.messages.push_back(os.str());
  }
  const double eq = std::abs(p.e * p.Q);
  const double bound = r.mass_condition ? coupling_bound(ma) : 0.0;
  r.coupling_condition = r.mass_condition && eq < bound;
  if (!r.coupling_condition) {
    std::ostringstream os;
    os << "coupling condition violated: |eQ| = " << eq << ", bound " << bound;
    r.messages.push_back(os.str());
  }
  const double rhs = p.I * M_PI * p.a;
  const double scale = std::max(std::abs(p.Q), std::abs(rhs));
  r.separability = scale == 0.0 || std::abs(p.Q - rhs) <= 1e-12 * scale;
  if (!r.separability) {
    std::ostringstream os;
    os << "separability violated: Q = " << p.Q << " but I*pi*a = " << rhs;
    r.messages.push_back(os.str());
  }
  return r;
}

/// Parameters for a given dimensionless (a, gamma) at m = e = 1 with Q = I pi a.
inline ModelParams params_from_gamma(double a, double gamma, double kappa = 0.5) {
  ModelParams p;
  p.a = a;
  p.m = 1.0;
  p.e = 1.0;
  p.Q = -gamma;
  p.I = p.Q / (M_PI * a);
  p.kappa = kappa;
  return p;
}

struct CylindricalPoint {
  double varrho;
  double z;
  double varpi;
  double rho_abs2;
};

inline CylindricalPoint oblate_to_cylindrical(double r, double theta, double a) {
  const double varpi = std::sqrt(r * r + a * a);
  const double c = std::cos(theta);
  return {varpi * std::sin(theta), r * c, varpi, r * r + a * a * c * c};
}

inline double winklmeier_eigenvalue(double kappa, int n) {
  if (n == 0) throw InvalidParameterError("winklmeier_eigenvalue: n must be nonzero");
  const double s = n > 0 ? 1.0 : -1.0;
  return s * (std::abs(kappa) - 0.5 + std::abs(n));
}

struct SommerfeldPotential {
  double A_t;
  double A_phi;
  double A0_frame;
  double A2_frame;
};

inline SommerfeldPotential sommerfeld_potential(double r, double theta, double a, double Q, double I) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double rho2 = r * r + a * a * c * c;
  if (rho2 == 0.0 || (r == 0.0 && std::abs(c) < 1e-15))
    throw SingularPointError("Sommerfeld potential is singular on the ring r=0, theta=pi/2");
  const double rho = std::sqrt(rho2);
  const double varpi = std::sqrt(r * r + a * a);
  const double rho3 = rho2 * rho;
  const double d = Q - I * M_PI * a;
  SommerfeldPotential out;
  out.A_t = -Q * r / rho2;
  out.A_phi = r * I * M_PI * a * a * s * s / rho2;
  out.A0_frame = -Q * r / (rho * varpi) - d * a * a * r * s * s / (varpi * rho3);
  out.A2_frame = -d * a * r * s / rho3;
  return out;
}

}  // namespace zgkn

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "zgkn/model.hpp"

using namespace zgkn;

TEST(Normalize, ScalesByMass) {
  ModelParams p{0.3, 2.0, 1.0, 0.2, 0.2 / (M_PI * 0.3), 0.5};
  auto n = normalize(p);
  EXPECT_DOUBLE_EQ(n.a, 0.6);
  EXPECT_DOUBLE_EQ(n.gamma, -0.2);
  EXPECT_DOUBLE_EQ(n.E_scale, 2.0);
  EXPECT_DOUBLE_EQ(n.kappa, 0.5);
}

TEST(Normalize, IdentityAtUnitMass) {
  auto n = normalize(params_from_gamma(0.1, -0.2));
  EXPECT_DOUBLE_EQ(n.a, 0.1);
  EXPECT_DOUBLE_EQ(n.gamma, -0.2);
  EXPECT_DOUBLE_EQ(n.E_scale, 1.0);
}

TEST(Normalize, RejectsBadInputs) {
  auto p = params_from_gamma(0.1, -0.2);
  p.kappa = 0.0;
  EXPECT_THROW(normalize(p), InvalidParameterError);
  p.kappa = 0.4;
  EXPECT_THROW(normalize(p), InvalidParameterError);
  p = params_from_gamma(0.1, -0.2);
  p.a = -0.1;
  EXPECT_THROW(normalize(p), InvalidParameterError);
  p = params_from_gamma(0.1, -0.2);
  p.m = 0.0;
  EXPECT_THROW(normalize(p), InvalidParameterError);
}

TEST(HalfInteger, Recognition) {
  for (double k : {0.5, -0.5, 1.5, -1.5, 7.5}) EXPECT_TRUE(is_half_integer(k)) << k;
  for (double k : {0.0, 1.0, 0.4, -2.0, 0.25}) EXPECT_FALSE(is_half_integer(k)) << k;
}

TEST(Admissibility, Examples) {
  auto r = check_admissibility(params_from_gamma(0.1, -0.2));
  EXPECT_TRUE(r.mass_condition);
  EXPECT_TRUE(r.coupling_condition);
  EXPECT_TRUE(r.separability);
  EXPECT_TRUE(r.ok());
  EXPECT_NEAR(coupling_bound(0.1), 0.4, 1e-15);

  r = check_admissibility(params_from_gamma(0.1, -0.5));
  EXPECT_TRUE(r.mass_condition);
  EXPECT_FALSE(r.coupling_condition);
  EXPECT_FALSE(r.messages.empty());

  r = check_admissibility(params_from_gamma(0.6, -0.1));
  EXPECT_FALSE(r.mass_condition);
  EXPECT_FALSE(r.ok());
}

TEST(Admissibility, SeparabilityTolerance) {
  auto p = params_from_gamma(0.1, -0.2);
  p.I *= 1.0 + 1e-14;
  EXPECT_TRUE(check_admissibility(p).separability);
  p.I *= 1.0 + 1e-9;
  EXPECT_FALSE(check_admissibility(p).separability);
}

TEST(Canonicalize, FlipsRecorded) {
  ModelParams p = params_from_gamma(0.1, -0.2);
  p.a = -0.1;
  p.I = -p.I;
  auto c = canonicalize(p);
  EXPECT_TRUE(c.flipped_a);
  EXPECT_DOUBLE_EQ(c.params.a, 0.1);
  EXPECT_GT(c.params.I, 0);
  EXPECT_FALSE(c.flipped_I);

  p = params_from_gamma(0.1, -0.2);
  p.I = -p.I;
  c = canonicalize(p);
  EXPECT_TRUE(c.flipped_I);
  EXPECT_TRUE(check_admissibility(c.params).separability);
}

TEST(Coordinates, Examples) {
  auto p = oblate_to_cylindrical(0.0, M_PI / 2, 1.0);
  EXPECT_NEAR(p.varrho, 1.0, 1e-15);
  EXPECT_NEAR(p.z, 0.0, 1e-15);
  p = oblate_to_cylindrical(3.0, 0.0, 4.0);
  EXPECT_NEAR(p.varrho, 0.0, 1e-15);
  EXPECT_NEAR(p.z, 3.0, 1e-15);
  p = oblate_to_cylindrical(-3.0, M_PI / 2, 4.0);
  EXPECT_NEAR(p.varrho, 5.0, 1e-14);
  EXPECT_NEAR(p.z, 0.0, 1e-14);
}

TEST(Coordinates, OblateEllipseIdentityAndPositivity) {
  for (int i = 0; i < 1000; ++i) {
    const double r = oracle::uniform(-10, 10), th = oracle::uniform(0, M_PI), a = oracle::uniform(0.01, 3);
    if (std::abs(r) < 1e-3) continue;
    auto p = oblate_to_cylindrical(r, th, a);
    EXPECT_NEAR(p.varrho * p.varrho / (r * r + a * a) + p.z * p.z / (r * r), 1.0, 1e-12);
    EXPECT_GE(p.varpi, a);
    EXPECT_GT(p.rho_abs2, 0.0);
  }
}

TEST(Winklmeier, Values) {
  EXPECT_EQ(winklmeier_eigenvalue(0.5, 1), 1.0);
  EXPECT_EQ(winklmeier_eigenvalue(0.5, -1), -1.0);
  EXPECT_EQ(winklmeier_eigenvalue(1.5, -2), -3.0);
  EXPECT_THROW(winklmeier_eigenvalue(0.5, 0), InvalidParameterError);
  for (double k : {-2.5, -0.5, 0.5, 3.5})
    for (int n : {-3, -1, 1, 4}) {
      EXPECT_EQ(winklmeier_eigenvalue(k, -n), -winklmeier_eigenvalue(k, n));
      EXPECT_GE(std::abs(winklmeier_eigenvalue(k, n)), std::abs(k) + 0.5);
    }
}

TEST(Sommerfeld, SeparableCaseHasSingleFrameComponent) {
  const double a = 0.3, Q = 0.7, I = Q / (M_PI * a);
  for (int i = 0; i < 200; ++i) {
    const double r = oracle::uniform(-5, 5), th = oracle::uniform(0, M_PI);
    auto A = sommerfeld_potential(r, th, a, Q, I);
    EXPECT_NEAR(A.A2_frame, 0.0, 1e-15);
    const double rho = std::sqrt(r * r + a * a * std::cos(th) * std::cos(th));
    EXPECT_NEAR(A.A0_frame, -Q * r / (rho * std::sqrt(r * r + a * a)), 1e-12);
  }
}

TEST(Sommerfeld, AxisAndFarField) {
  EXPECT_EQ(sommerfeld_potential(0.0, 0.0, 0.5, 1.0, 1.0).A_t, 0.0);
  const double r = 1e6;
  EXPECT_NEAR(sommerfeld_potential(r, 0.7, 0.5, 2.0, 1.0).A_t * r, -2.0, 1e-9);
  EXPECT_THROW(sommerfeld_potential(0.0, M_PI / 2, 0.5, 1.0, 1.0), SingularPointError);
}

TEST(Sommerfeld, OddUnderSheetSwap) {
  for (int i = 0; i < 200; ++i) {
    const double r = oracle::uniform(-5, 5), th = oracle::uniform(0, M_PI);
    const double a = 0.4, Q = 0.3, I = 0.2;
    EXPECT_NEAR(sommerfeld_potential(-r, M_PI - th, a, Q, I).A_t, -sommerfeld_potential(r, th, a, Q, I).A_t, 1e-12);
  }
}

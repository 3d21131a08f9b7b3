#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>

#include "oracles.hpp"
#include "scan_oracle.hpp"
#include "zgkn/spectrum.hpp"

using namespace zgkn;

namespace {

NormalizedParams np(double a, double gamma, double kappa = 0.5) { return {a, gamma, kappa, 1.0}; }

const EigenResult& figure_result() {
  static const EigenResult r = solve_ground_pair(np(0.1, -0.2));
  return r;
}

}  // namespace

TEST(GroundPair, ConvergesInsideTheBoxes) {
  for (auto [a, g] : {std::pair{0.1, -0.2}, std::pair{0.2, -0.3}, std::pair{0.05, -0.1}}) {
    auto r = solve_ground_pair(np(a, g));
    EXPECT_TRUE(r.converged);
    EXPECT_GT(r.E_star, 0);
    EXPECT_LT(r.E_star, 1);
    EXPECT_GE(r.lambda_star, -1 - a);
    EXPECT_LE(r.lambda_star, -1 + a);
    EXPECT_LT(r.residual_theta, 1e-8);
    EXPECT_LT(r.residual_omega, 1e-8);
    ASSERT_FALSE(r.ratios.empty());
    for (double q : r.ratios) EXPECT_LT(q, 1.0);
    EXPECT_LT(r.rho, 1.0);
  }
}

TEST(GroundPair, AgreesWithSignScan) {
  for (auto [a, g] : {std::pair{0.1, -0.2}, std::pair{0.2, -0.3}}) {
    auto box = oracle::ground_scan(a, g);
    ASSERT_GT(box.cells, 0);
    auto r = solve_ground_pair(np(a, g));
    EXPECT_TRUE(box.contains(r.E_star, r.lambda_star))
        << "E=" << r.E_star << " in [" << box.E_lo << "," << box.E_hi << "], l=" << r.lambda_star << " in ["
        << box.l_lo << "," << box.l_hi << "]";
  }
}

TEST(GroundPair, RejectsStrongCoupling) {
  EXPECT_THROW(solve_ground_pair(np(0.1, -0.5)), AdmissibilityError);
  EXPECT_THROW(solve_ground_pair(np(0.6, -0.1)), AdmissibilityError);
  EXPECT_THROW(solve_ground_pair(np(0.1, -0.2, 1.5)), InvalidParameterError);
}

TEST(GroundPair, FixedPointCertificateUnderTighterTolerances) {
  const auto& r = figure_result();
  const auto c = IntegratorControls{}.tightened(10);
  const double lam = lambda_of_E(r.params, r.E_star, c).value;
  const double E2 = energy_of_lambda(r.params, lam, c).value;
  EXPECT_LT(std::abs(E2 - r.E_star), 10 * 1e-10);
}

TEST(GroundPair, IndependentOfSeed) {
  const auto& r = figure_result();
  SolveOptions o;
  o.lambda0 = -1 - 0.1;
  auto s = solve_ground_pair(np(0.1, -0.2), {}, o);
  EXPECT_NEAR(s.E_star, r.E_star, 1e-8);
  EXPECT_NEAR(s.lambda_star, r.lambda_star, 1e-8);
}

TEST(GroundPair, ConnectorWindings) {
  const auto& r = figure_result();
  EXPECT_NEAR(r.winding_theta, -0.5, 1e-9);
  EXPECT_TRUE(std::isfinite(r.winding_omega));
}

TEST(GroundPair, IterationBudget) {
  SolveOptions o;
  o.max_iter = 2;
  EXPECT_THROW(solve_ground_pair(np(0.1, -0.2), {}, o), NonConvergenceError);
}

TEST(GroundPair, NegativeKappaIsTheMirror) {
  auto m = solve_ground_pair(np(0.1, -0.2, -0.5));
  const auto& r = figure_result();
  EXPECT_TRUE(m.mirrored);
  EXPECT_DOUBLE_EQ(m.E_star, -r.E_star);
  EXPECT_DOUBLE_EQ(m.lambda_star, -r.lambda_star);
  EXPECT_EQ(m.kappa, -0.5);
}

TEST(Mirror, InvolutionAndRecord) {
  const auto& r = figure_result();
  auto m = mirror_eigenvalue(r);
  EXPECT_EQ(m.E_star, -r.E_star);
  EXPECT_EQ(m.lambda_star, -r.lambda_star);
  EXPECT_EQ(m.kappa, -r.kappa);
  EXPECT_EQ(m.residual_theta, r.residual_theta);
  auto mm = mirror_eigenvalue(m);
  EXPECT_EQ(mm.E_star, r.E_star);
  EXPECT_EQ(mm.lambda_star, r.lambda_star);
  EXPECT_EQ(mm.kappa, r.kappa);
  EXPECT_EQ(mm.mirrored, r.mirrored);
}

TEST(Mirror, VerificationAtMirroredParameters) {
  auto chk = verify_mirror(figure_result());
  EXPECT_TRUE(chk.ok());
  EXPECT_LT(chk.phi_theta, 1e-7);
  EXPECT_LT(chk.phi_omega, 1e-7);
}

TEST(Mirror, VerificationCatchesABadRecord) {
  EigenResult bad = figure_result();
  bad.E_star += 1e-3;
  EXPECT_THROW(verify_mirror(bad), VerificationError);
  EXPECT_FALSE(verify_mirror(bad, 1e-8, false).ok());
}

TEST(Summary, EmptyHasOnlyGap) {
  ModelParams mp;
  mp.m = 3;
  auto s = spectrum_summary(mp, {});
  EXPECT_TRUE(s.eigenvalues.empty());
  EXPECT_EQ(s.gap_lo, -3);
  EXPECT_EQ(s.gap_hi, 3);
}

TEST(Summary, DenormalizesAndSymmetrizes) {
  ModelParams mp;
  mp.m = 2;
  EigenResult r;
  r.E_star = 0.98;
  r.kappa = 0.5;
  auto s = spectrum_summary(mp, {r, mirror_eigenvalue(r)});
  ASSERT_EQ(s.eigenvalues.size(), 2u);
  EXPECT_DOUBLE_EQ(s.eigenvalues[1].E, 1.96);
  EXPECT_EQ(s.eigenvalues[1].kappa, 0.5);
  EXPECT_DOUBLE_EQ(s.eigenvalues[0].E, -1.96);
  EXPECT_EQ(s.eigenvalues[0].kappa, -0.5);
  for (const auto& e : s.eigenvalues) {
    EXPECT_LT(std::abs(e.E), s.m);
    bool found = false;
    for (const auto& f : s.eigenvalues) found |= f.E == -e.E && f.kappa == -e.kappa;
    EXPECT_TRUE(found);
  }
}

TEST(Explore, GroundCellAmongCandidates) {
  ExploreOptions o;
  o.nE = 24;
  o.nl = 24;
  auto cs = explore(np(0.1, -0.2), {}, o);
  const auto& r = figure_result();
  bool ground = false;
  for (const auto& c : cs) {
    EXPECT_FALSE(c.guaranteed);
    if (c.k_theta == 0 && c.k_omega == 0 && std::abs(c.E - r.E_star) <= c.dE &&
        std::abs(c.lambda - r.lambda_star) <= c.dlambda)
      ground = true;
  }
  EXPECT_TRUE(ground);
}

TEST(Explore, LevelCrossing) {
  EXPECT_EQ(detail::level_crossing(-1.0, 1.0), 0);
  EXPECT_EQ(detail::level_crossing(5.0, 7.0), 1);
  EXPECT_EQ(detail::level_crossing(-7.0, -5.0), -1);
  EXPECT_FALSE(detail::level_crossing(1.0, 2.0).has_value());
  EXPECT_EQ(detail::level_crossing(-1.0, 20.0), 0);
}

TEST(RateFit, GeometricSequence) {
  std::vector<double> s;
  for (int i = 0; i < 8; ++i) s.push_back(3.0 * std::pow(0.01, i));
  EXPECT_NEAR(detail::fit_rate(s), 0.01, 1e-12);
  EXPECT_TRUE(std::isnan(detail::fit_rate({1.0})));
}

TEST(Parallel, CoversEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, 4);
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, RethrowsTaskError) {
  EXPECT_THROW(parallel_for(100, [](std::size_t i) { if (i == 37) throw RangeError("x"); }, 3), RangeError);
}

TEST(Parallel, ThreadCountFromEnvironment) {
  setenv("ZGKN_THREADS", "3", 1);
  EXPECT_EQ(thread_count(), 3u);
  setenv("ZGKN_THREADS", "junk", 1);
  EXPECT_GE(thread_count(), 1u);
  unsetenv("ZGKN_THREADS");
}

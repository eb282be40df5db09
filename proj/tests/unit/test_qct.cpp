#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "qchaos/errors.hpp"
#include "qchaos/qct.hpp"

using namespace qchaos;

namespace {

ModelSpec duffing(double hbar, double k) {
  auto m = duffing_spec();
  m.hbar = hbar;
  m.k = k;
  return m;
}

}  // namespace

TEST(Localization, DuffingClassicalAtOne) {
  // F = 8, F' = 14, F'' = -12 at x = 1, t = 0.
  const auto e = check_localization(duffing(0.01, 10.0), {1.0, 0.0, 0.0}, false);
  EXPECT_NEAR(e.rhs, std::sqrt(15.75), 1e-12);
  EXPECT_NEAR(e.lhs, 80.0, 1e-12);
  EXPECT_NEAR(e.margin, 80.0 / std::sqrt(15.75), 1e-10);
  EXPECT_TRUE(e.satisfied);
  EXPECT_EQ(e.relation, ">>");
}

TEST(Localization, DuffingQuantumAtOne) {
  const auto e = check_localization(duffing(0.01, 10.0), {1.0, 0.0, 0.0}, true);
  EXPECT_NEAR(e.rhs, 5.625e-3, 1e-15);
  EXPECT_NEAR(e.margin, 80.0 / 5.625e-3, 1e-8);
  EXPECT_TRUE(e.satisfied);
}

TEST(Localization, HarmonicIsAlwaysLocalized) {
  auto m = harmonic_spec();
  m.k = 1e-6;
  const auto e = check_localization(m, {0.5, 0.0, 0.0}, false);
  EXPECT_EQ(e.margin, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(e.satisfied);
}

TEST(Localization, ThrowsWhereForceVanishes) {
  // Undriven Duffing: F = -2x^3 + 20x vanishes at x = sqrt(10).
  auto m = duffing(0.01, 1.0);
  m.potential = PotentialSpec({0.0, 0.0, -10.0, 0.0, 0.5});
  EXPECT_THROW(check_localization(m, {std::sqrt(10.0), 0.0, 0.0}, false), SingularPoint);
}

TEST(LowNoise, QuantumWindowForSmallHbar) {
  // hbar = 1e-5, k = 1e5, s = 10/hbar puts hbar k = 1 inside the window.
  const auto m = duffing(1e-5, 1e5);
  const auto entries = check_low_noise(m, {1.0, 0.0, 0.0}, 10.0 / 1e-5, true);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].name, "low_noise_quantum_left");
  EXPECT_NEAR(entries[0].rhs, 2 * 14.0 * 1e-6, 1e-15);
  EXPECT_NEAR(entries[1].lhs, 14.0 * 1e6 / 4, 1e-6);
  EXPECT_TRUE(entries[0].satisfied);
  EXPECT_TRUE(entries[1].satisfied);
}

TEST(LowNoise, MarginsMonotonicInAction) {
  const auto m = duffing(1e-3, 100.0);
  double left = 0, right = 0;
  for (double s : {1e2, 1e3, 1e4, 1e5}) {
    const auto e = check_low_noise(m, {1.0, 0.0, 0.0}, s, true);
    EXPECT_GT(e[0].margin, left);
    EXPECT_GT(e[1].margin, right);
    left = e[0].margin;
    right = e[1].margin;
  }
}

TEST(LowNoise, ConstructedViolation) {
  // hbar k far above |F'| s / 4 breaks the right-hand bound.
  const auto e = check_low_noise(duffing(1.0, 1e3), {1.0, 0.0, 0.0}, 10.0, true);
  EXPECT_TRUE(e[0].satisfied);
  EXPECT_FALSE(e[1].satisfied);
  EXPECT_NEAR(e[1].margin, 14.0 * 10.0 / 4 / 1e3, 1e-12);
}

TEST(LowNoise, ClassicalUsesDimensionfulAction) {
  const auto e = check_low_noise(duffing(0.01, 50.0), {1.0, 0.0, 0.0}, 100.0, false);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_NEAR(e[0].rhs, 2 * 14.0 / (100.0 * 0.01), 1e-12);
  EXPECT_THROW(check_low_noise(duffing(0.01, 50.0), {}, 0.0, false), std::invalid_argument);
}

TEST(RecordFidelity, BoundaryAndScaling) {
  const double window = 0.01, tol = 0.01;
  const double k_edge = 1.0 / (8 * window * tol * tol);
  const auto edge = check_record_fidelity(k_edge, window, tol);
  EXPECT_NEAR(edge.margin, 1.0, 1e-12);
  EXPECT_EQ(edge.relation, ">");
  const auto wider = check_record_fidelity(k_edge, window, 2 * tol);
  EXPECT_NEAR(wider.margin, 4.0, 1e-12);
  EXPECT_TRUE(wider.satisfied);
  EXPECT_FALSE(check_record_fidelity(0.5 * k_edge, window, tol).satisfied);
}

TEST(TStar, ConstructedRoot) {
  // lambda = m = u0 = 1, D = 0.04: A e^{-1} = sqrt(0.04) at t = 1.
  const double D = 0.04;
  const auto ts = compute_t_star(1.0, D, 1.0, 0.2 * std::numbers::e, 1.0);
  EXPECT_FALSE(ts.no_root);
  EXPECT_NEAR(ts.t_star, 1.0, 1e-10);
  EXPECT_NEAR(ts.fold_spacing, 0.2, 1e-10);
}

TEST(TStar, DecreasesWithDiffusion) {
  double prev = std::numeric_limits<double>::infinity();
  for (double D : {1e-6, 1e-4, 1e-2, 1.0}) {
    const auto ts = compute_t_star(0.5, D, 1.0, 40.0, 0.1);
    EXPECT_LT(ts.t_star, prev);
    prev = ts.t_star;
  }
}

TEST(TStar, RootBalancesFoldAndWidth) {
  const double lambda = 0.7, D = 0.3, m = 2.0;
  const auto ts = compute_t_star(lambda, D, m, 1e-3, 1.0);
  EXPECT_GT(ts.t_star, 0.0);
  EXPECT_NEAR(ts.fold_spacing, std::sqrt(D * ts.t_star / (m * lambda)), 1e-12);
  EXPECT_THROW(compute_t_star(0.0, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST(WeakQct, VerdictBands) {
  const double lambda = 1.0, hbar = 0.1;
  auto verdict = [&](double D, double t) {
    TStar ts;
    ts.t_star = t;
    ts.fold_spacing = 0.3;
    return check_weak_qct(D, ts, lambda, 1.0, hbar);
  };
  EXPECT_EQ(verdict(0.1, 2.0).verdict, WeakQctVerdict::Satisfied);      // margin 2
  EXPECT_EQ(verdict(0.01, 2.0).verdict, WeakQctVerdict::MildlyViolated);  // 0.2
  EXPECT_EQ(verdict(1e-3, 2.0).verdict, WeakQctVerdict::StronglyViolated);  // 0.02
  EXPECT_NEAR(verdict(0.1, 2.0).fold_ratio, 0.9, 1e-12);
  EXPECT_EQ(to_string(WeakQctVerdict::MildlyViolated), "mildly violated");
}

TEST(WeakQct, MarginIncreasesWithDiffusion) {
  const double lambda = 0.8, hbar = 0.1;
  double prev = 0;
  for (double D : {1e-5, 1e-3, 1e-2, 1e-1}) {
    const auto ts = compute_t_star(lambda, D, 1.0, 40.0, std::sqrt(2 * std::numbers::pi * 0.05));
    const auto w = check_weak_qct(D, ts, lambda, 1.0, hbar);
    EXPECT_GT(w.entry.margin, prev);
    prev = w.entry.margin;
  }
}

TEST(Orbit, HarmonicActionAndArea) {
  // Unit circle: bounding box area 4. Undriven, so a "period" is one time
  // unit and the action is the integral of sin^2 over [0, 10] divided by 10.
  const auto m = harmonic_spec();
  const auto o = classical_orbit_summary(m, 1.0, 0.0, 10, 2000);
  EXPECT_NEAR(o.area, 4.0, 1e-4);
  EXPECT_NEAR(o.action_per_period, (5.0 - std::sin(20.0) / 4) / 10, 1e-4);
  EXPECT_EQ(o.strobe.size(), 11u);
}

TEST(Orbit, ReportSkipsSingularSamples) {
  auto m = duffing(0.01, 10.0);
  m.potential = PotentialSpec({0.0, 0.0, -10.0, 0.0, 0.5});
  std::vector<EvalPoint> pts{{1.0, 0.0, 0.0}, {std::sqrt(10.0), 0.0, 0.0}, {1.0, 0.0, 0.0}};
  const auto single = strong_qct_report(m, pts[0], 100.0, 0.01, 0.01);
  const auto orbit = strong_qct_orbit_report(m, pts, 100.0, 0.01, 0.01);
  EXPECT_TRUE(orbit.orbit_average);
  ASSERT_EQ(single.entries.size(), orbit.entries.size());
  for (std::size_t i = 0; i < single.entries.size(); ++i) {
    EXPECT_DOUBLE_EQ(single.entries[i].margin, orbit.entries[i].margin);
  }
  ASSERT_NE(orbit.find("record_fidelity"), nullptr);
  EXPECT_THROW(strong_qct_orbit_report(m, {pts[1]}, 100.0, 0.01, 0.01), SingularPoint);
}

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qchaos/model.hpp"

using namespace qchaos;

TEST(Potential, HarmonicForceIsLinear) {
  const auto m = harmonic_spec();
  const auto fd = force_and_derivatives(m.potential, 3.0, 0.7);
  EXPECT_DOUBLE_EQ(fd.force, -3.0);
  EXPECT_DOUBLE_EQ(fd.d_force, -1.0);
  EXPECT_DOUBLE_EQ(fd.d2_force, 0.0);
}

TEST(Potential, DuffingDerivativesAtOne) {
  const auto m = duffing_spec();
  const auto fd = force_and_derivatives(m.potential, 1.0, 0.0);
  // F = -2x^3 + 20x - 10 cos(wt)
  EXPECT_NEAR(fd.force, 8.0, 1e-12);
  EXPECT_NEAR(fd.d_force, 14.0, 1e-12);
  EXPECT_NEAR(fd.d2_force, -12.0, 1e-12);
}

TEST(Potential, ForceMatchesCentralDifferences) {
  const auto pot = duffing_spec().potential;
  const double h = 1e-4;
  for (double t : {0.0, 0.3, 1.1}) {
    for (double x = -5.0; x <= 5.0; x += 0.25) {
      const auto fd = force_and_derivatives(pot, x, t);
      const double f_num = -(pot.value(x + h, t) - pot.value(x - h, t)) / (2 * h);
      const double df_num = (pot.force(x + h, t) - pot.force(x - h, t)) / (2 * h);
      const double d2f_num = (pot.force(x + h, t) - 2 * pot.force(x, t) + pot.force(x - h, t)) / (h * h);
      EXPECT_NEAR(fd.force, f_num, 1e-6) << "x=" << x;
      EXPECT_NEAR(fd.d_force, df_num, 1e-6) << "x=" << x;
      EXPECT_NEAR(fd.d2_force, d2f_num, 1e-3) << "x=" << x;
    }
  }
}

TEST(Potential, SexticDerivativesMatchDifferences) {
  const PotentialSpec pot({0.3, -1.0, 0.5, 0.2, -0.1, 0.05, 0.01}, 2.0, 3.0);
  const double h = 1e-5;
  for (unsigned order = 1; order <= 4; ++order) {
    for (double x = -2.0; x <= 2.0; x += 0.5) {
      const double num = (pot.derivative(x + h, 0.4, order - 1) - pot.derivative(x - h, 0.4, order - 1)) / (2 * h);
      EXPECT_NEAR(pot.derivative(x, 0.4, order), num, 1e-5 * (1 + std::abs(num)));
    }
  }
}

TEST(Potential, UndrivenIsTimeIndependent) {
  const PotentialSpec pot({0.0, 0.0, -10.0, 0.0, 0.5});
  for (double x : {-3.0, 0.1, 2.5}) EXPECT_EQ(pot.value(x, 0.0), pot.value(x, 17.3));
  EXPECT_FALSE(pot.driven());
  EXPECT_EQ(pot.degree(), 4u);
}

TEST(Potential, RejectsDegreeAboveSix) {
  EXPECT_THROW(PotentialSpec(std::vector<double>(8, 1.0)), std::invalid_argument);
}

TEST(Model, DuffingParameters) {
  const auto m = duffing_spec();
  EXPECT_DOUBLE_EQ(m.mass, 1.0);
  EXPECT_DOUBLE_EQ(m.potential.drive_amp(), 10.0);
  EXPECT_DOUBLE_EQ(m.potential.drive_omega(), 6.07);
  EXPECT_NEAR(m.drive_period(), 2 * std::numbers::pi / 6.07, 1e-15);
  EXPECT_DOUBLE_EQ(m.potential.static_potential(2.0), 0.5 * 16 - 10 * 4);
}

TEST(Model, ValidateRejectsNegativeParameters) {
  auto m = duffing_spec();
  m.k = -1;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m.k = 0;
  m.mass = 0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(Model, BackactionDiffusion) {
  auto m = duffing_spec();
  m.hbar = 0.1;
  m.k = 3.0;
  EXPECT_NEAR(m.backaction_diffusion(), 0.03, 1e-15);
}

TEST(Grid, MomentumDual) {
  const SpatialGrid g(-4.0, 4.0, 64);
  EXPECT_DOUBLE_EQ(g.dx(), 0.125);
  const double hbar = 0.5;
  EXPECT_NEAR(g.dp(hbar) * 64 * g.dx(), 2 * std::numbers::pi * hbar, 1e-12);
  EXPECT_NEAR(g.p_max(hbar), std::numbers::pi * hbar / g.dx(), 1e-12);
  EXPECT_DOUBLE_EQ(g.p(0, hbar), 0.0);
  EXPECT_NEAR(g.p(32, hbar), -g.p_max(hbar), 1e-12);
  EXPECT_NEAR(g.p(63, hbar), -g.dp(hbar), 1e-12);
}

TEST(Grid, RejectsNonPowerOfTwo) {
  EXPECT_THROW(SpatialGrid(-1, 1, 100), std::invalid_argument);
  EXPECT_THROW(SpatialGrid(1, -1, 64), std::invalid_argument);
  EXPECT_THROW(PhaseSpaceGrid(SpatialGrid(-1, 1, 64), -1, 1, 48), std::invalid_argument);
}

TEST(Grid, NearestMomentumIndex) {
  const PhaseSpaceGrid g(SpatialGrid(-1, 1, 16), -8.0, 8.0, 32);
  EXPECT_EQ(g.nearest_p_index(0.0), 16u);
  EXPECT_EQ(g.nearest_p_index(-100.0), 0u);
  EXPECT_EQ(g.nearest_p_index(100.0), 31u);
}

TEST(Poly, Horner) {
  EXPECT_DOUBLE_EQ(polyval({1.0, 2.0, 3.0}, 2.0), 1 + 4 + 12);
  EXPECT_DOUBLE_EQ(polyval({}, 5.0), 0.0);
}

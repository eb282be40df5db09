#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qchaos/errors.hpp"
#include "qchaos/quantum.hpp"

using namespace qchaos;

namespace {

ModelSpec free_particle(double hbar, double k = 0.0) {
  ModelSpec m;
  m.potential = PotentialSpec({0.0});
  m.hbar = hbar;
  m.k = k;
  return m;
}

ModelSpec harmonic(double hbar) {
  auto m = harmonic_spec();
  m.hbar = hbar;
  return m;
}

// Direct O(n^2) DFT moments, independent of the FFT path.
MomentSet brute_moments(const SpatialState& s, double hbar) {
  const auto& g = s.grid;
  const std::size_t n = g.size();
  std::vector<cplx> phi(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += s.psi[i] * std::polar(1.0, -2 * std::numbers::pi * double(i * j % n) / double(n));
    }
    phi[j] = acc;
  }
  MomentSet m;
  double w = 0, wp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    w += std::norm(s.psi[i]);
    m.x += std::norm(s.psi[i]) * g.x(i);
    wp += std::norm(phi[i]);
    m.p += std::norm(phi[i]) * g.p(i, hbar);
  }
  m.x /= w;
  m.p /= wp;
  for (std::size_t i = 0; i < n; ++i) {
    m.vx += std::norm(s.psi[i]) * (g.x(i) - m.x) * (g.x(i) - m.x) / w;
    m.vp += std::norm(phi[i]) * (g.p(i, hbar) - m.p) * (g.p(i, hbar) - m.p) / wp;
  }
  // (p - <p>) psi back in position space
  std::vector<cplx> dpsi(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc = 0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += phi[j] * (g.p(j, hbar) - m.p) *
             std::polar(1.0, 2 * std::numbers::pi * double(i * j % n) / double(n));
    }
    dpsi[i] = acc / double(n);
  }
  for (std::size_t i = 0; i < n; ++i) m.cxp += (std::conj(s.psi[i]) * dpsi[i]).real() * (g.x(i) - m.x) / w;
  return m;
}

}  // namespace

TEST(Moments, CoherentStateIsMinimumUncertainty) {
  const SpatialGrid g(-10, 10, 1024);
  const double hbar = 0.1;
  const auto s = coherent_state(g, hbar, 1.5, -2.0, 0.3);
  const auto m = moments(s, hbar);
  EXPECT_NEAR(s.norm(), 1.0, 1e-12);
  EXPECT_NEAR(m.x, 1.5, 1e-10);
  EXPECT_NEAR(m.p, -2.0, 1e-10);
  EXPECT_NEAR(m.vx, 0.09, 1e-10);
  EXPECT_NEAR(m.vx * m.vp, hbar * hbar / 4, 1e-6 * hbar * hbar);
  EXPECT_NEAR(m.cxp, 0.0, 1e-10);
}

TEST(Moments, EigenstateHasZeroMomentum) {
  const SpatialGrid g(-8, 8, 256);
  for (unsigned level : {0u, 1u, 4u}) {
    const auto s = harmonic_eigenstate(g, 1.0, 1.0, 1.0, level);
    EXPECT_NEAR(moments(s, 1.0).p, 0.0, 1e-12);
    EXPECT_NEAR(energy(s, harmonic(1.0)), level + 0.5, 1e-9);
  }
}

TEST(Moments, MatchBruteForceOracle) {
  const SpatialGrid g(-3, 5, 64);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  SpatialState s(g);
  for (auto& a : s.psi) a = cplx(z(rng), z(rng));
  s.normalize();
  const double hbar = 0.7;
  const auto a = moments(s, hbar);
  const auto b = brute_moments(s, hbar);
  EXPECT_NEAR(a.x, b.x, 1e-10);
  EXPECT_NEAR(a.p, b.p, 1e-10);
  EXPECT_NEAR(a.vx, b.vx, 1e-10);
  EXPECT_NEAR(a.vp, b.vp, 1e-10);
  EXPECT_NEAR(a.cxp, b.cxp, 1e-10);
}

TEST(Moments, UncertaintyRelationForSqueezedChirpedState) {
  const SpatialGrid g(-10, 10, 1024);
  const double hbar = 0.2;
  SpatialState s(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    s.psi[i] = std::exp(cplx(-x * x / 0.5, 0.8 * x * x / hbar));
  }
  s.normalize();
  const auto m = moments(s, hbar);
  EXPECT_GT(std::abs(m.cxp), 0.01);
  // A chirped Gaussian is still pure and minimal in the Robertson-Schroedinger sense.
  EXPECT_NEAR(m.vx * m.vp - m.cxp * m.cxp, hbar * hbar / 4, 1e-6 * hbar * hbar);
}

TEST(Displace, ShiftsCentroidExactly) {
  const SpatialGrid g(-8, 8, 512);
  const double hbar = 0.05;
  auto s = coherent_state(g, hbar, 0.5, 1.0, std::sqrt(hbar / 2));
  const auto before = moments(s, hbar);
  displace(s, hbar, 0.1, -0.2);
  const auto after = moments(s, hbar);
  EXPECT_NEAR(after.x - before.x, 0.1, 1e-10);
  EXPECT_NEAR(after.p - before.p, -0.2, 1e-10);
  EXPECT_NEAR(after.vx, before.vx, 1e-10);
  EXPECT_NEAR(after.vp, before.vp, 1e-10);
}

TEST(Displace, HalfStepsAddUp) {
  const SpatialGrid g(-8, 8, 512);
  const double hbar = 0.05;
  auto a = coherent_state(g, hbar, 0.0, 0.0, 0.2);
  auto b = a;
  displace(a, hbar, 0.3, 0.4);
  displace(b, hbar, 0.15, 0.2);
  displace(b, hbar, 0.15, 0.2);
  const auto ma = moments(a, hbar), mb = moments(b, hbar);
  EXPECT_NEAR(ma.x, mb.x, 1e-10);
  EXPECT_NEAR(ma.p, mb.p, 1e-10);
}

TEST(Displace, ZeroIsIdentity) {
  const SpatialGrid g(-4, 4, 64);
  auto a = coherent_state(g, 1.0, 0.3, 0.1, 0.7);
  const auto b = a;
  displace(a, 1.0, 0.0, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(a.psi[i], b.psi[i]);
}

TEST(Isolated, HarmonicCoherentStateFollowsCosine) {
  const SpatialGrid g(-10, 10, 512);
  const auto model = harmonic(0.1);
  const double dt = 1e-3;
  SchrodingerPropagator prop(model, g, dt);
  auto s = coherent_state(g, 0.1, 2.0, 0.0, std::sqrt(0.05));
  const auto steps = static_cast<std::size_t>(std::llround(2 * std::numbers::pi / dt));
  for (std::size_t done = 0; done < steps; done += 100) {
    prop.advance_isolated(s, std::min<std::size_t>(100, steps - done));
    EXPECT_NEAR(moments(s, 0.1).x, 2.0 * std::cos(s.t), 1e-6) << "t=" << s.t;
  }
  EXPECT_NEAR(s.norm(), 1.0, 1e-10);
}

TEST(Isolated, EigenstateDensityIsStationary) {
  const SpatialGrid g(-8, 8, 256);
  const auto model = harmonic(1.0);
  auto s = harmonic_eigenstate(g, 1.0, 1.0, 1.0, 2);
  const auto rho0 = s.density();
  SchrodingerPropagator prop(model, g, 1e-3);
  prop.advance_isolated(s, static_cast<std::size_t>(std::llround(2 * std::numbers::pi / 1e-3)));
  const auto rho1 = s.density();
  double worst = 0;
  for (std::size_t i = 0; i < rho0.size(); ++i) worst = std::max(worst, std::abs(rho1[i] - rho0[i]));
  EXPECT_LT(worst, 1e-8);
}

TEST(Isolated, UndrivenDuffingConservesEnergy) {
  auto model = duffing_spec();
  model.potential = PotentialSpec(model.potential.coeffs());
  model.hbar = 0.1;
  const SpatialGrid g(-8, 8, 1024);
  auto s = coherent_state(g, 0.1, 2.0, 0.0, std::sqrt(0.05));
  const double e0 = energy(s, model);
  SchrodingerPropagator prop(model, g, 1e-3);
  prop.advance_isolated(s, 1000);
  EXPECT_LT(std::abs(energy(s, model) - e0) / std::abs(e0), 1e-6);
}

TEST(Isolated, BoundaryOverflowAborts) {
  const SpatialGrid g(-4, 4, 256);
  PropagatorOptions opts;
  opts.check_every = 10;
  SchrodingerPropagator prop(free_particle(0.1), g, 1e-2, opts);
  auto s = coherent_state(g, 0.1, 0.0, 5.0, 0.2);
  EXPECT_THROW(prop.advance_isolated(s, 1000), GridOverflow);
}

TEST(Sse, NormAndPurityArePreserved) {
  auto model = duffing_spec();
  model.hbar = 0.1;
  model.k = 1.0;
  const SpatialGrid g(-8, 8, 1024);
  const double dt = model.drive_period() / 200;
  SchrodingerPropagator prop(model, g, dt);
  auto s = coherent_state(g, 0.1, 2.0, 0.0, std::sqrt(0.05));
  NoisePath noise(1, dt);
  prop.advance_conditioned(s, 200, noise);
  EXPECT_NEAR(s.norm(), 1.0, 1e-10);
  const auto m = moments(s, 0.1);
  EXPECT_GE(m.vx * m.vp - m.cxp * m.cxp, 0.25 * 0.01 * (1 - 1e-6));
}

TEST(Sse, RecordUsesTheConsumedIncrement) {
  auto model = free_particle(1.0, 2.0);
  const SpatialGrid g(-10, 10, 256);
  const double dt = 1e-3;
  SchrodingerPropagator prop(model, g, dt);
  auto s = coherent_state(g, 1.0, 0.7, 0.0, 0.8);
  NoisePath noise(4, dt);
  // With the mean position computed before the step, dy - <x>dt is the scaled increment.
  const double x_before = moments(s, 1.0).x;
  const double dy = prop.sse_step(s, noise);
  EXPECT_NEAR(dy, x_before * dt + noise.dw_at(0) / std::sqrt(8 * 2.0), 1e-3 * dt);
  EXPECT_EQ(noise.cursor(), 1u);
}

TEST(Sse, SameNoiseSameTrajectory) {
  auto model = duffing_spec();
  model.hbar = 0.1;
  model.k = 0.5;
  const SpatialGrid g(-8, 8, 512);
  const double dt = model.drive_period() / 200;
  auto a = coherent_state(g, 0.1, 2.0, 0.0, std::sqrt(0.05));
  auto b = a;
  SchrodingerPropagator pa(model, g, dt), pb(model, g, dt);
  NoisePath na(9, dt), nb(9, dt);
  pa.advance_conditioned(a, 300, na);
  pb.advance_conditioned(b, 300, nb);
  for (std::size_t i = 0; i < g.size(); ++i) ASSERT_EQ(a.psi[i], b.psi[i]);
}

TEST(Sse, WeakMeasurementApproachesIsolated) {
  auto model = harmonic(0.1);
  model.k = 1e-10;
  const SpatialGrid g(-10, 10, 512);
  const double dt = 1e-3;
  SchrodingerPropagator prop(model, g, dt);
  auto a = coherent_state(g, 0.1, 2.0, 0.0, std::sqrt(0.05));
  auto b = a;
  NoisePath noise(2, dt);
  prop.advance_conditioned(a, 1000, noise);
  prop.advance_isolated(b, 1000);
  EXPECT_NEAR(moments(a, 0.1).x, moments(b, 0.1).x, 1e-6);
}

TEST(Sse, RejectsEnvironmentalDiffusion) {
  auto model = free_particle(1.0, 1.0);
  model.D = 0.1;
  const SpatialGrid g(-10, 10, 64);
  SchrodingerPropagator prop(model, g, 1e-3);
  auto s = coherent_state(g, 1.0, 0, 0, 1);
  NoisePath noise(1, 1e-3);
  EXPECT_THROW(prop.advance_conditioned(s, 1, noise), std::invalid_argument);
}

TEST(Sse, MeasurementLocalizesWavepacket) {
  auto model = free_particle(1.0, 5.0);
  const SpatialGrid g(-20, 20, 512);
  const double dt = 1e-3;
  SchrodingerPropagator prop(model, g, dt);
  auto s = coherent_state(g, 1.0, 0.0, 0.0, 3.0);
  NoisePath noise(3, dt);
  prop.advance_conditioned(s, 2000, noise);
  // The conditioned width settles at a scale set by hbar / (m k), far below the initial 9.
  EXPECT_LT(moments(s, 1.0).vx, 0.5);
}

TEST(Record, WindowNoiseMatchesTheory) {
  // Backaction heats the oscillator over the run; the grid leaves room for it.
  const SpatialGrid g(-24, 24, 512);
  const double dt = 1e-3, window = 0.05;
  const auto per = static_cast<std::size_t>(std::llround(window / dt));
  for (double k : {0.5, 2.0, 8.0}) {
    auto model = harmonic(1.0);
    model.k = k;
    SchrodingerPropagator prop(model, g, dt);
    auto s = coherent_state(g, 1.0, 1.0, 0.0, std::sqrt(0.5));
    NoisePath noise(21, dt);
    MeasurementRecord rec{dt, {}};
    std::vector<double> xs;
    for (std::size_t i = 0; i < 400 * per; ++i) {
      xs.push_back(moments(s, 1.0).x);
      rec.dy.push_back(prop.sse_step(s, noise));
    }
    const auto avg = rec.averaged(window);
    double s2 = 0;
    for (std::size_t w = 0; w < avg.size(); ++w) {
      double mx = 0;
      for (std::size_t i = w * per; i < (w + 1) * per; ++i) mx += xs[i];
      const double r = avg[w] - mx / double(per);
      s2 += r * r;
    }
    const double sd = std::sqrt(s2 / double(avg.size()));
    EXPECT_NEAR(sd, 1.0 / std::sqrt(8 * k * window), 0.1 / std::sqrt(8 * k * window)) << "k=" << k;
  }
}

TEST(Record, BoxcarAverage) {
  MeasurementRecord r{0.1, {0.1, 0.3, 0.2, 0.2, 5.0}};
  const auto a = r.averaged(0.2);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_NEAR(a[0], 2.0, 1e-12);
  EXPECT_NEAR(a[1], 2.0, 1e-12);
}

TEST(GaussianFactor, MatchesDirectExponential) {
  std::vector<cplx> out(1000);
  const cplx c0(0.1, -0.3), c1(0.5, 2.0);
  const double c2 = -0.7;
  fill_gaussian_factor(out.data(), out.size(), -3.0, 0.006, c0, c1, c2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double u = -3.0 + 0.006 * double(i);
    const cplx ref = std::exp(c0 + c1 * u + c2 * u * u);
    EXPECT_LT(std::abs(out[i] - ref), 1e-12 * std::abs(ref) + 1e-300);
  }
}

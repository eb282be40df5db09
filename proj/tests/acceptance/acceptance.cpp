// Acceptance checks. Each criterion prints one line:
//
//   PASS criterion 1 classical-lyapunov: lambda = 0.5757 per period (...)
//
// and the process exits 0 on PASS, 1 on FAIL.
//
//   qchaos_acceptance --criterion 4 --workers 4 --out acceptance-out

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "qchaos/classical.hpp"
#include "qchaos/density.hpp"
#include "qchaos/errors.hpp"
#include "qchaos/experiments.hpp"
#include "qchaos/lyapunov.hpp"
#include "qchaos/noise.hpp"
#include "qchaos/parallel.hpp"
#include "qchaos/qct.hpp"
#include "qchaos/quantum.hpp"
#include "qchaos/stats.hpp"

using namespace qchaos;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  std::size_t workers = 1;
  fs::path out = "acceptance-out";
};

std::string format(const char* fmt, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Duffing start used throughout: (2, 0) lies in the chaotic sea.
constexpr double kX0 = 2.0;
constexpr double kP0 = 0.0;

// Long runs at hbar = 1e-2 explore the whole chaotic sea, |x| < 5.6 and
// |p| < 23. 16384 points on [-8, 8] resolve |p| < 32; 512 points on [-6, 6]
// would reach only |p| < 1.3.
SpatialGrid chaotic_sea_grid() { return SpatialGrid(-8, 8, 16384); }

// dt = 1e-3 rounded down to a whole number of steps per drive period, as the
// config loader does.
std::size_t classical_steps() { return static_cast<std::size_t>(std::ceil(duffing_spec().drive_period() / 1e-3)); }

Outcome classical_lyapunov(const Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = classical_tangent_oracle(duffing_spec(), kX0, kP0, 2000, classical_steps());
  const double secs = seconds_since(t0);
  const bool ok = std::abs(r.lambda - 0.57) <= 0.05 && secs < 300;
  return {ok, format("lambda = %.4f per period (target 0.57 +- 0.05), %.1f s (limit 300 s)", r.lambda, secs)};
}

Outcome renormalization_vs_oracle(const Context& ctx) {
  LyapunovConfig c;
  c.system = LyapunovSystem::Langevin;
  c.model = duffing_spec();
  c.x0 = kX0;
  c.p0 = kP0;
  c.delta0 = 1e-8;
  c.t_total = 2000;
  c.steps_per_period = classical_steps();
  c.workers = ctx.workers;
  const auto est = lyapunov_fixed_noise(c);
  const auto oracle = classical_tangent_oracle(c.model, kX0, kP0, 2000, c.steps_per_period);
  const double rel = std::abs(est.mean - oracle.lambda) / oracle.lambda;
  return {rel < 0.02, format("renormalization %.5f vs oracle %.5f, relative difference %.3g (limit 0.02)",
                             est.mean, oracle.lambda, rel)};
}

Outcome isolated_decay(const Context& ctx) {
  LyapunovConfig c;
  c.system = LyapunovSystem::Quantum;
  c.model = duffing_spec();
  c.model.hbar = 1e-2;
  c.grid = chaotic_sea_grid();
  c.x0 = kX0;
  c.p0 = kP0;
  c.t_total = 500;
  c.steps_per_period = 1000;
  c.renormalization = Renormalization::Tangent;
  c.workers = ctx.workers;
  const auto est = lyapunov_fixed_noise(c);
  const double slope = loglog_slope(est.t, est.mean_curve, 10, 500);
  const bool ok = std::abs(slope + 1.0) <= 0.1;
  return {ok, format("log-log slope %.4f over t in [10, 500] periods (target -1 +- 0.1), final lambda %.4g",
                     slope, est.mean)};
}

LyapunovEstimate quantum_sweep_point(const Context& ctx, double hbar, double k, SpatialGrid grid,
                                     std::size_t n, double periods) {
  LyapunovConfig c;
  c.system = LyapunovSystem::Quantum;
  c.model = duffing_spec();
  c.model.hbar = hbar;
  c.model.k = k;
  c.grid = grid;
  c.x0 = kX0;
  c.p0 = kP0;
  c.ensemble_n = n;
  c.t_total = periods;
  c.steps_per_period = 1000;
  c.workers = ctx.workers;
  return lyapunov_fixed_noise(c);
}

Outcome deep_quantum(const Context& ctx) {
  // The initial packet is wide (sigma_x = 2.8); [-24, 24] keeps its tails out of the boundary band.
  const SpatialGrid grid(-24, 24, 256);
  std::map<double, LyapunovEstimate> est;
  for (double k : {5e-3, 0.01, 0.02}) est.emplace(k, quantum_sweep_point(ctx, 16.0, k, grid, 16, 500));
  const double l1 = est.at(5e-3).mean, l2 = est.at(0.01).mean, l3 = est.at(0.02).mean;
  const bool value_ok = std::abs(l3 - 0.077) <= 0.03;
  const bool order_ok = l1 < l2 && l2 < l3;
  auto se = [&](double k) { return est.at(k).std / std::sqrt(static_cast<double>(est.at(k).n)); };
  return {value_ok && order_ok,
          format("lambda(0.02) = %.4f +- %.4f (target 0.077 +- 0.03, %s); ordering %.4f < %.4f < %.4f (%s)",
                 l3, se(0.02), value_ok ? "ok" : "out of band", l1, l2, l3, order_ok ? "holds" : "broken")};
}

Outcome emergence(const Context& ctx) {
  const SpatialGrid grid = chaotic_sea_grid();
  const std::vector<double> ks{5e-4, 0.01, 1.0, 10.0};
  std::vector<double> mean, se;
  for (double k : ks) {
    const auto e = quantum_sweep_point(ctx, 1e-2, k, grid, 6, 100);
    mean.push_back(e.mean);
    se.push_back(e.std / std::sqrt(static_cast<double>(e.n)));
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    if (mean[i + 1] < mean[i] - (se[i] + se[i + 1])) monotone = false;
  }
  const bool strong = mean.back() > 0.3;
  const bool trend = mean.back() > mean.front();
  std::string values;
  for (std::size_t i = 0; i < ks.size(); ++i) values += format("%s%g:%.3f+-%.3f", i ? " " : "", ks[i], mean[i], se[i]);
  return {monotone && strong && trend,
          format("lambda(k) = {%s}; nondecreasing %s, lambda(10) > 0.3 %s, trend %s", values.c_str(),
                 monotone ? "yes" : "no", strong ? "yes" : "no", trend ? "yes" : "no")};
}

Outcome backaction(const Context& ctx) {
  ModelSpec m;
  m.potential = PotentialSpec({0.0});
  m.hbar = 1.0;
  m.k = 1.0;
  const SpatialGrid grid(-20, 20, 256);
  const double dt = 1e-4;
  const std::size_t steps = 1000, n = 1000;
  const auto psi0 = coherent_state(grid, m.hbar, 0.0, 0.0, 1.0);
  // Total second moment <p^2> averaged over the ensemble, before and after.
  std::vector<double> p2(n), p1(n);
  parallel_for(n, ctx.workers, [&](std::size_t i) {
    SchrodingerPropagator prop(m, grid, dt);
    NoisePath noise = NoisePath::for_member(1, i, dt);
    auto psi = psi0;
    prop.advance_conditioned(psi, steps, noise);
    const auto mo = moments(psi, m.hbar);
    p2[i] = mo.vp + mo.p * mo.p;
    p1[i] = mo.p;
  });
  const auto m0 = moments(psi0, m.hbar);
  const double var0 = m0.vp;
  const double mean_p = mean(p1);
  const double var1 = mean(p2) - mean_p * mean_p;
  const double rate = (var1 - var0) / (static_cast<double>(steps) * dt);
  const double expect = 2 * m.hbar * m.hbar * m.k;
  const double rel = std::abs(rate - expect) / expect;
  return {rel <= 0.05, format("d<dp^2>/dt = %.5f vs 2 hbar^2 k = %.5f, relative error %.3g (limit 0.05)", rate,
                              expect, rel)};
}

Outcome unraveling(const Context& ctx) {
  auto m = duffing_spec();
  m.hbar = 0.1;
  m.k = 0.02;
  const SpatialGrid grid(-6, 6, 1024);
  const std::size_t spp = 200, periods = 5, n = 500;
  const double dt = m.drive_period() / spp;
  const auto psi0 = coherent_state(grid, m.hbar, kX0, kP0, std::sqrt(m.hbar / 2));

  std::vector<std::vector<double>> dens(n);
  parallel_for(n, ctx.workers, [&](std::size_t i) {
    SchrodingerPropagator prop(m, grid, dt);
    NoisePath noise = NoisePath::for_member(7, i, dt);
    auto psi = psi0;
    prop.advance_conditioned(psi, spp * periods, noise);
    dens[i] = psi.density();
  });
  std::vector<double> avg(grid.size(), 0.0);
  for (const auto& d : dens) {
    for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += d[j] / static_cast<double>(n);
  }
  LindbladPropagator lp(m, grid, dt);
  auto rho = DensityState::pure(psi0);
  lp.advance(rho, spp * periods);
  const double l1 = l1_distance(avg, rho.diagonal(), grid.dx());
  return {l1 < 0.05, format("L1(SSE mean, Lindblad) of x-marginals = %.4f after %zu periods, %zu trajectories "
                            "(limit 0.05)", l1, periods, n)};
}

Outcome passivity(const Context& ctx) {
  auto m = duffing_spec();
  m.k = 0.05;
  // The orbit from (2, 0) stays inside |x| < 4.8, |p| < 14 over two periods.
  const PhaseSpaceGrid grid(SpatialGrid(-6, 6, 256), -16, 16, 256);
  // Default dt of 1e-3 drive periods keeps the linear reweighting factor positive.
  const std::size_t spp = 1000, periods = 2, n = 500;
  const double dt = m.drive_period() / spp;
  const auto f0 = gaussian_field(grid, kX0, kP0, 0.1, 1.0);

  // Summed in index order, in batches, so the mean does not depend on the worker count.
  PhaseSpaceField avg(grid);
  std::vector<double> clipped(n);
  constexpr std::size_t kBatch = 50;
  std::vector<PhaseSpaceField> batch(kBatch, f0);
  for (std::size_t b0 = 0; b0 < n; b0 += kBatch) {
    const std::size_t nb = std::min(kBatch, n - b0);
    parallel_for(nb, ctx.workers, [&](std::size_t j) {
      PhaseSpacePropagator prop(m, grid, dt);
      NoisePath noise = NoisePath::for_member(3, b0 + j, dt);
      batch[j] = f0;
      prop.advance_conditioned(batch[j], spp * periods, noise, m.k);
      clipped[b0 + j] = prop.clipped_mass();
    });
    for (std::size_t j = 0; j < nb; ++j) {
      for (std::size_t q = 0; q < avg.f.size(); ++q) avg.f[q] += batch[j].f[q] / static_cast<double>(n);
    }
  }
  // Step the reference one step at a time so clipping follows the same cadence.
  PhaseSpacePropagator ref(m, grid, dt);
  auto f = f0;
  for (std::size_t s = 0; s < spp * periods; ++s) ref.advance(f, 1);
  const double l1_x = l1_distance(avg.x_marginal(), f.x_marginal(), grid.dx());
  const double l1_full = l1_distance(avg.f, f.f, grid.cell_area());
  return {l1_x < 0.05, format("L1(Kushner mean, Liouville) of x-marginals = %.4f (limit 0.05), full field %.4f, "
                              "after %zu periods, %zu realizations; mass clipped from unresolved filaments: "
                              "reference %.3f, realizations %.3f on average",
                              l1_x, l1_full, periods, n, ref.clipped_mass(), mean(clipped))};
}

Outcome weak_ordering(const Context& ctx) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::WeakQct;
  cfg.out_dir = (ctx.out / "weak-qct").string();
  cfg.model.hbar = 0.1;
  // Keeps the chaotic sea (|x| < 5.6) clear of the boundary band and resolves |p| < 23.
  cfg.grid.x_min = -7;
  cfg.grid.x_max = 7;
  cfg.grid.n = 1024;
  cfg.initial.x0 = kX0;
  cfg.initial.p0 = kP0;
  cfg.numerics.steps_per_period = 100;
  cfg.numerics.t_total = 30;
  cfg.numerics.workers = ctx.workers;
  cfg.weak.d_values = {1e-5, 1e-3, 1e-2};
  const auto res = run_weak_qct(cfg);
  std::vector<double> l1, neg;
  for (const auto& r : res.summary.at("runs")) {
    l1.push_back(r.at("slice_l1").get<double>());
    neg.push_back(r.at("negative_volume").get<double>());
  }
  const bool l1_ok = l1[0] > l1[1] && l1[1] > l1[2];
  const bool neg_ok = neg[0] > neg[1] && neg[1] > neg[2];
  return {l1_ok && neg_ok,
          format("p=0 slice L1 %.4f > %.4f > %.4f (%s); negative volume %.4g > %.4g > %.4g (%s)", l1[0], l1[1],
                 l1[2], l1_ok ? "holds" : "broken", neg[0], neg[1], neg[2], neg_ok ? "holds" : "broken")};
}

Outcome t_star(const Context&) {
  const auto m = duffing_spec();
  const double hbar = 0.1;
  const double period = m.drive_period();
  // Same defaults as the weak-qct experiment.
  const auto oracle = classical_tangent_oracle(m, kX0, kP0, 2000, 1000);
  const auto orbit = classical_orbit_summary(m, kX0, kP0, 2000, 1000);
  const double lambda = oracle.lambda / period;
  const double sx = std::sqrt(hbar / 2), sp = hbar / (2 * sx);
  const double u0 = std::sqrt(2 * std::numbers::pi * sx * sp);
  const std::vector<double> ds{1e-5, 1e-3, 1e-2};
  const std::vector<WeakQctVerdict> expect{WeakQctVerdict::StronglyViolated, WeakQctVerdict::MildlyViolated,
                                           WeakQctVerdict::Satisfied};
  bool range_ok = true, verdict_ok = true;
  std::string values;
  double lo = 1e300, hi = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto ts = compute_t_star(lambda, ds[i], m.mass, orbit.area, u0);
    const auto w = check_weak_qct(ds[i], ts, lambda, m.mass, hbar);
    range_ok = range_ok && !ts.no_root && ts.t_star >= 10 && ts.t_star <= 25;
    verdict_ok = verdict_ok && w.verdict == expect[i];
    lo = std::min(lo, ts.t_star);
    hi = std::max(hi, ts.t_star);
    values += format("%sD=%g: t*=%.2f margin %.3g (%s)", i ? "; " : "", ds[i], ts.t_star, w.entry.margin,
                     to_string(w.verdict).c_str());
  }
  // "Weakly varying": the spread stays within a factor of two.
  const bool weak_ok = hi <= 2 * lo;
  return {range_ok && verdict_ok && weak_ok,
          format("%s; A=%.1f u0=%.3f lambda=%.4f/time; in [10,25] %s, verdicts %s, spread %s", values.c_str(),
                 orbit.area, u0, lambda, range_ok ? "yes" : "no", verdict_ok ? "match" : "differ",
                 weak_ok ? "weak" : "strong")};
}

Outcome qct_regression(const Context&) {
  auto m = duffing_spec();
  m.hbar = 1e-5;
  m.k = 1e5;
  const double s = 10.0 / m.hbar;
  const auto orbit = classical_orbit_summary(m, kX0, kP0, 200, 1000);
  const auto rep = strong_qct_orbit_report(m, orbit.strobe, s, 0.01, 0.01);
  std::string detail;
  for (const auto& e : rep.entries) {
    detail += format("%s%s margin %.3g %s", detail.empty() ? "" : "; ", e.name.c_str(), e.margin,
                     e.satisfied ? "ok" : "FAIL");
  }
  return {rep.all_satisfied(), detail};
}

Outcome invariants(const Context&) {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* what) {
    if (!ok) failed.push_back(what);
  };
  const double hbar = 0.1;
  const SpatialGrid g(-6, 6, 512);
  auto model = duffing_spec();
  model.hbar = hbar;
  model.k = 1.0;

  // Norm and uncertainty along a conditioned trajectory.
  {
    auto psi = coherent_state(g, hbar, kX0, kP0, std::sqrt(hbar / 2));
    SchrodingerPropagator prop(model, g, model.drive_period() / 500);
    NoisePath noise(1, prop.dt());
    bool norm_ok = true, heis_ok = true;
    for (int i = 0; i < 10; ++i) {
      prop.advance_conditioned(psi, 50, noise);
      const auto mo = moments(psi, hbar);
      norm_ok = norm_ok && std::abs(psi.norm() - 1) < 1e-10;
      heis_ok = heis_ok && mo.vx * mo.vp - mo.cxp * mo.cxp >= hbar * hbar / 4 * (1 - 1e-6);
    }
    check(norm_ok, "norm");
    check(heis_ok, "uncertainty");
  }
  // Trace, Hermiticity and positivity of the master equation.
  {
    const SpatialGrid gs(-6, 6, 256);
    auto m = model;
    m.hbar = 0.2;
    m.D = 1e-2;
    LindbladPropagator lp(m, gs, m.drive_period() / 200);
    auto rho = DensityState::pure(coherent_state(gs, m.hbar, kX0, kP0, std::sqrt(m.hbar / 2)));
    lp.advance(rho, 200);
    check(std::abs(rho.trace() - 1) < 1e-8, "trace");
    check(rho.hermiticity_error() < 1e-10, "hermiticity");
    check(rho.purity() <= 1 + 1e-10, "purity");
    // Wigner marginals.
    const auto w = wigner_transform(rho, m.hbar);
    const auto mx = w.x_marginal();
    const auto d = rho.diagonal();
    double err = 0;
    for (std::size_t i = 0; i < d.size(); ++i) err = std::max(err, std::abs(mx[i] - d[i]));
    check(err < 1e-8, "wigner x-marginal");
    check(std::abs(w.mass() - 1) < 1e-6, "wigner mass");
  }
  // Forces against central differences.
  {
    const auto& pot = model.potential;
    double worst = 0;
    for (double x = -5; x <= 5; x += 0.1) {
      const double h = 1e-5;
      const double num = -(pot.value(x + h, 0.3) - pot.value(x - h, 0.3)) / (2 * h);
      worst = std::max(worst, std::abs(num - pot.force(x, 0.3)) / (1 + std::abs(num)));
    }
    check(worst < 1e-6, "force finite differences");
  }
  // Noise determinism and replay.
  {
    NoisePath a(99, 1e-3, 4), b(99, 1e-3, 4);
    bool same = true;
    for (int i = 0; i < 1000; ++i) same = same && a.next_dw() == b.next_dw();
    a.rewind();
    same = same && a.next_dw() == b.dw_at(0);
    check(same, "noise determinism");
  }
  std::string detail = "norm, uncertainty, trace, hermiticity, purity, wigner marginals, forces, noise";
  if (!failed.empty()) {
    detail = "failed:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

struct Criterion {
  const char* name;
  std::function<Outcome(const Context&)> run;
};

const std::map<int, Criterion>& criteria() {
  static const std::map<int, Criterion> all{
      {1, {"classical-lyapunov", classical_lyapunov}},
      {2, {"renormalization-vs-oracle", renormalization_vs_oracle}},
      {3, {"isolated-decay", isolated_decay}},
      {4, {"deep-quantum-chaos", deep_quantum}},
      {5, {"emergence-monotonicity", emergence}},
      {6, {"backaction-diffusion", backaction}},
      {7, {"unraveling-consistency", unraveling}},
      {8, {"classical-passivity", passivity}},
      {9, {"weak-qct-ordering", weak_ordering}},
      {10, {"t-star", t_star}},
      {11, {"qct-inequalities", qct_regression}},
      {12, {"invariant-suite", invariants}},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qchaos acceptance criteria"};
  std::vector<int> which;
  Context ctx;
  ctx.workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out = ctx.out.string();
  app.add_option("--criterion", which, "criterion number(s); default all")->check(CLI::Range(1, 12));
  app.add_option("--workers", ctx.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "directory for experiment outputs");
  CLI11_PARSE(app, argc, argv);
  ctx.out = out;
  if (which.empty()) {
    for (const auto& [n, c] : criteria()) which.push_back(n);
  }

  bool all = true;
  for (int n : which) {
    const auto& c = criteria().at(n);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s criterion %d %s: %s [%.0f s]\n", o.pass ? "PASS" : "FAIL", n, c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}

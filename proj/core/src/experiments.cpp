#include "qchaos/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

#include "qchaos/classical.hpp"
#include "qchaos/density.hpp"
#include "qchaos/errors.hpp"
#include "qchaos/io.hpp"
#include "qchaos/parallel.hpp"
#include "qchaos/phase_space.hpp"
#include "qchaos/quantum.hpp"
#include "qchaos/stats.hpp"

namespace qchaos {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double step_size(const ExperimentConfig& cfg) {
  return cfg.model.drive_period() / static_cast<double>(cfg.numerics.steps_per_period);
}

std::size_t total_steps(const ExperimentConfig& cfg) {
  return static_cast<std::size_t>(
      std::llround(cfg.numerics.t_total * static_cast<double>(cfg.numerics.steps_per_period)));
}

std::size_t total_periods(const ExperimentConfig& cfg) {
  return static_cast<std::size_t>(std::llround(cfg.numerics.t_total));
}

double initial_sigma_x(const ExperimentConfig& cfg) {
  return cfg.initial.sigma_x > 0.0 ? cfg.initial.sigma_x : std::sqrt(cfg.model.hbar / 2.0);
}

// Classical reference runs are kept at least this fine regardless of the
// quantum step, so they never dominate the error budget.
std::size_t oracle_steps(const ExperimentConfig& cfg) {
  return std::max<std::size_t>(cfg.numerics.steps_per_period, 1000);
}

PropagatorOptions propagator_options(const ExperimentConfig& cfg) {
  PropagatorOptions o;
  o.check_every = cfg.numerics.check_every;
  return o;
}

fs::path prepare_dir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::string indexed(const std::string& stem, std::size_t i, const char* ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return stem + "-" + buf + ext;
}

json base_summary(const ExperimentConfig& cfg) {
  json s = provenance(cfg);
  s["experiment"] = to_string(cfg.kind);
  return s;
}

void finish(ExperimentResult& res, const fs::path& dir) {
  const auto p = dir / "summary.json";
  write_json(p, res.summary);
  res.files.push_back(p);
  res.out_dir = dir;
}

}  // namespace

void apply_overrides(ExperimentConfig& cfg, const RunOptions& opts) {
  if (opts.out_dir) cfg.out_dir = opts.out_dir->string();
  if (opts.seed) cfg.numerics.base_seed = *opts.seed;
  if (opts.workers) {
    if (*opts.workers == 0) throw ConfigError("--workers must be > 0");
    cfg.numerics.workers = *opts.workers;
  }
}

LyapunovConfig lyapunov_config(const ExperimentConfig& cfg, double k) {
  LyapunovConfig lc;
  lc.model = cfg.model;
  lc.model.k = k;
  if (cfg.kind == ExperimentKind::LyapunovSweep) {
    lc.system = cfg.sweep.system;
    lc.renormalization = cfg.sweep.renormalization;
    lc.p_scale = cfg.sweep.p_scale;
    lc.direction_angle = cfg.sweep.direction;
  } else {
    lc.system = LyapunovSystem::Quantum;
    lc.renormalization = cfg.decay.renormalization;
  }
  if (lc.system == LyapunovSystem::Quantum) lc.grid = cfg.grid.spatial();
  lc.x0 = cfg.initial.x0;
  lc.p0 = cfg.initial.p0;
  lc.sigma_x = cfg.initial.sigma_x;
  lc.base_seed = cfg.numerics.base_seed;
  lc.ensemble_n = cfg.numerics.ensemble_n;
  lc.delta0 = cfg.numerics.delta0;
  lc.tau_r = cfg.numerics.tau_r;
  lc.t_total = cfg.numerics.t_total;
  lc.steps_per_period = cfg.numerics.steps_per_period;
  lc.cumulant.quantum_backaction = cfg.model.hbar > 0.0;
  lc.propagator = propagator_options(cfg);
  lc.workers = cfg.numerics.workers;
  return lc;
}

ExperimentResult run_strong_qct(const ExperimentConfig& cfg, bool dump_noise) {
  const fs::path dir = prepare_dir(cfg);
  const SpatialGrid grid = cfg.grid.spatial();
  const double hbar = cfg.model.hbar;
  const double dt = step_size(cfg);
  const std::size_t steps = total_steps(cfg);
  const std::size_t every = cfg.numerics.record_every;
  const double sigma = initial_sigma_x(cfg);

  struct Run {
    std::vector<MomentSet> rows;
    std::vector<double> dy;
    double max_sqrt_vx = 0.0;
    std::size_t large_step_warnings = 0;
    std::vector<std::pair<std::uint64_t, double>> noise;
  };
  std::vector<Run> runs(cfg.numerics.ensemble_n);

  parallel_for(runs.size(), cfg.numerics.workers, [&](std::size_t r) {
    Run& out = runs[r];
    SchrodingerPropagator prop(cfg.model, grid, dt, propagator_options(cfg));
    SpatialState s = coherent_state(grid, hbar, cfg.initial.x0, cfg.initial.p0, sigma);
    NoisePath noise = NoisePath::for_member(cfg.numerics.base_seed, r, dt);
    noise.set_audit(dump_noise);
    std::vector<double> record;
    auto sample = [&](double dy) {
      const MomentSet m = moments(s, hbar);
      out.rows.push_back(m);
      out.dy.push_back(dy);
      out.max_sqrt_vx = std::max(out.max_sqrt_vx, std::sqrt(std::max(m.vx, 0.0)));
    };
    sample(0.0);
    for (std::size_t done = 0; done < steps;) {
      const std::size_t n = std::min(every, steps - done);
      record.clear();
      if (cfg.model.k > 0.0) {
        prop.advance_conditioned(s, n, noise, &record);
      } else {
        prop.advance_isolated(s, n);
      }
      done += n;
      sample(std::accumulate(record.begin(), record.end(), 0.0));
    }
    out.large_step_warnings = prop.stats().large_step_warnings;
    if (dump_noise) out.noise = noise.audit_log();
  });

  ExperimentResult res;
  const json header = provenance(cfg);
  std::vector<EvalPoint> samples;
  json per_run = json::array();
  double max_sqrt_vx = 0.0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto path = dir / indexed("trajectory", r, ".ndjson");
    NdjsonWriter w(path, header);
    for (std::size_t i = 0; i < runs[r].rows.size(); ++i) {
      const auto& m = runs[r].rows[i];
      w.write(trajectory_row(m, runs[r].dy[i]));
      samples.push_back({m.x, m.p, m.t});
    }
    res.files.push_back(path);
    if (dump_noise) {
      const auto np = dir / indexed("noise", r, ".ndjson");
      NdjsonWriter nw(np, header);
      for (const auto& [i, dw] : runs[r].noise) nw.write({{"i", i}, {"dw", dw}});
      res.files.push_back(np);
    }
    const auto& last = runs[r].rows.back();
    per_run.push_back({{"realization", r},
                       {"max_sqrt_vx", runs[r].max_sqrt_vx},
                       {"large_step_warnings", runs[r].large_step_warnings},
                       {"final", trajectory_row(last, runs[r].dy.back())}});
    max_sqrt_vx = std::max(max_sqrt_vx, runs[r].max_sqrt_vx);
  }

  double s_action = cfg.strong.action_s;
  json orbit_json = nullptr;
  if (cfg.strong.action_convention == "orbit") {
    const auto orbit = classical_orbit_summary(cfg.model, cfg.initial.x0, cfg.initial.p0,
                                               cfg.strong.orbit_periods, oracle_steps(cfg));
    s_action = orbit.action_per_period / hbar;
    orbit_json = {{"action_per_period", orbit.action_per_period}, {"area", orbit.area}};
  }
  const QctReport report = strong_qct_orbit_report(cfg.model, samples, s_action, cfg.strong.window,
                                                   cfg.strong.tolerance);
  json rep = to_json(report);
  rep["action_s"] = s_action;
  rep["qchaos"] = header;
  const auto rp = dir / "qct-report.json";
  write_json(rp, rep);
  res.files.push_back(rp);
  res.qct = report;

  res.summary = base_summary(cfg);
  res.summary["realizations"] = per_run;
  res.summary["max_sqrt_vx"] = max_sqrt_vx;
  res.summary["action_s"] = s_action;
  res.summary["orbit"] = orbit_json;
  res.summary["qct_all_satisfied"] = report.all_satisfied();
  finish(res, dir);

  if (cfg.strong.sqrt_vx_bound > 0.0 && max_sqrt_vx > cfg.strong.sqrt_vx_bound) {
    throw InvariantViolation("strong-qct: max sqrt(Vx) = " + std::to_string(max_sqrt_vx) +
                             " exceeds the configured bound " +
                             std::to_string(cfg.strong.sqrt_vx_bound));
  }
  return res;
}

ExperimentResult run_weak_qct(const ExperimentConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  const SpatialGrid grid = cfg.grid.spatial();
  const double hbar = cfg.model.hbar;
  const double mass = cfg.model.mass;
  const double dt = step_size(cfg);
  const std::size_t spp = cfg.numerics.steps_per_period;
  const std::size_t periods = total_periods(cfg);
  const double sigma_x = initial_sigma_x(cfg);
  const double sigma_p = hbar / (2.0 * sigma_x);
  const PhaseSpaceGrid wgrid = wigner_grid(grid, hbar);
  const SpatialState psi0 = coherent_state(grid, hbar, cfg.initial.x0, cfg.initial.p0, sigma_x);
  const PhaseSpaceField f0 =
      gaussian_field(wgrid, cfg.initial.x0, cfg.initial.p0, sigma_x * sigma_x, sigma_p * sigma_p);

  const double period = cfg.model.drive_period();
  const auto oracle = classical_tangent_oracle(cfg.model, cfg.initial.x0, cfg.initial.p0,
                                               static_cast<double>(cfg.weak.orbit_periods), oracle_steps(cfg));
  const double lambda_model = oracle.lambda / period;
  const auto orbit = classical_orbit_summary(cfg.model, cfg.initial.x0, cfg.initial.p0,
                                             cfg.weak.orbit_periods, oracle_steps(cfg));
  const double area = cfg.weak.area > 0.0 ? cfg.weak.area : orbit.area;
  const double u0 = cfg.weak.u0 > 0.0 ? cfg.weak.u0 : std::sqrt(2.0 * std::numbers::pi * sigma_x * sigma_p);

  struct Outcome {
    double slice_l1 = 0.0;
    double field_l1 = 0.0;
    double w_min = 0.0, w_max = 0.0, w_negative_volume = 0.0;
    double trace = 0.0, purity = 0.0, clipped = 0.0;
    std::vector<double> slice_q, slice_c;
    std::vector<fs::path> files;
  };
  const auto& ds = cfg.weak.d_values;
  std::vector<Outcome> out(ds.size());
  const json header = provenance(cfg);

  parallel_for(ds.size(), cfg.numerics.workers, [&](std::size_t j) {
    ModelSpec m = cfg.model;
    m.D = ds[j];
    LindbladPropagator lp(m, grid, dt, propagator_options(cfg));
    PhaseSpaceOptions po;
    po.kick = KickKind::Classical;
    po.diffusion = lp.diffusion();
    PhaseSpacePropagator cp(m, wgrid, dt, po);
    DensityState rho = DensityState::pure(psi0);
    PhaseSpaceField fc = f0;

    auto snapshot = [&](std::size_t period_index, const PhaseSpaceField& w) {
      const std::string tag = "D" + std::to_string(j) + "-p" + std::to_string(period_index);
      const json meta = {{"D", ds[j]}, {"period", period_index}, {"qchaos", header}};
      json qm = meta, cm = meta;
      qm["kind"] = "wigner";
      cm["kind"] = "classical";
      write_field(dir, "wigner-" + tag, w, qm);
      write_field(dir, "classical-" + tag, fc, cm);
      out[j].files.push_back(dir / ("field-wigner-" + tag + ".bin"));
      out[j].files.push_back(dir / ("field-classical-" + tag + ".bin"));
    };

    const std::size_t every = cfg.weak.snapshot_every;
    for (std::size_t p = 1; p <= periods; ++p) {
      lp.advance(rho, spp);
      cp.advance(fc, spp);
      if (every > 0 && p % every == 0 && p != periods) snapshot(p, wigner_transform(rho, hbar));
    }
    const PhaseSpaceField w = wigner_transform(rho, hbar);
    snapshot(periods, w);
    Outcome& o = out[j];
    o.slice_q = w.p_slice(0.0);
    o.slice_c = fc.p_slice(0.0);
    o.slice_l1 = relative_l1(o.slice_q, o.slice_c);
    o.field_l1 = l1_distance(w.f, fc.f, wgrid.cell_area());
    o.w_min = w.min();
    o.w_max = w.max();
    o.w_negative_volume = w.negative_volume();
    o.trace = rho.trace();
    o.purity = rho.purity();
    o.clipped = cp.clipped_mass();
  });

  ExperimentResult res;
  json rows = json::array();
  json qct_rows = json::array();
  for (std::size_t j = 0; j < ds.size(); ++j) {
    const auto& o = out[j];
    const TStar ts = compute_t_star(lambda_model, ds[j], mass, area, u0);
    const WeakQctEntry wq = check_weak_qct(ds[j], ts, lambda_model, mass, hbar);
    rows.push_back({{"D", ds[j]},
                    {"slice_l1", o.slice_l1},
                    {"field_l1", o.field_l1},
                    {"wigner_min", o.w_min},
                    {"wigner_max", o.w_max},
                    {"negative_ratio", o.w_max > 0.0 ? -o.w_min / o.w_max : 0.0},
                    {"negative_volume", o.w_negative_volume},
                    {"trace", o.trace},
                    {"purity", o.purity},
                    {"clipped_mass", o.clipped},
                    {"slice_quantum", o.slice_q},
                    {"slice_classical", o.slice_c}});
    json e = to_json(wq.entry);
    e["D"] = ds[j];
    e["t_star"] = ts.t_star;
    e["t_star_periods"] = ts.t_star / period;
    e["fold_spacing"] = ts.fold_spacing;
    e["no_root"] = ts.no_root;
    e["fold_ratio"] = wq.fold_ratio;
    e["verdict"] = to_string(wq.verdict);
    qct_rows.push_back(e);
    for (const auto& f : o.files) res.files.push_back(f);
  }
  json rep = {{"qchaos", header},
              {"lambda_bar_per_period", oracle.lambda},
              {"lambda_bar", lambda_model},
              {"area", area},
              {"u0", u0},
              {"entries", qct_rows}};
  const auto rp = dir / "qct-report.json";
  write_json(rp, rep);
  res.files.push_back(rp);

  res.summary = base_summary(cfg);
  res.summary["x"] = grid.positions();
  res.summary["runs"] = rows;
  res.summary["t_star"] = qct_rows;
  finish(res, dir);
  return res;
}

ExperimentResult run_lyapunov_sweep(const ExperimentConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  const json header = provenance(cfg);
  ExperimentResult res;
  json estimates = json::array();
  for (std::size_t j = 0; j < cfg.sweep.k_values.size(); ++j) {
    const double k = cfg.sweep.k_values[j];
    const LyapunovEstimate est = lyapunov_fixed_noise(lyapunov_config(cfg, k));
    const auto lp = dir / indexed("lyapunov-k", j, ".ndjson");
    const auto dp = dir / indexed("divergence-k", j, ".ndjson");
    NdjsonWriter lw(lp, header), dw(dp, header);
    for (std::size_t r = 0; r < est.realizations.size(); ++r) {
      const auto& c = est.realizations[r];
      for (std::size_t i = 0; i < c.lambda.size(); ++i) {
        lw.write({{"t", est.t[i]}, {"lambda_s", c.lambda[i]}, {"realization", r}});
        dw.write({{"t", est.t[i]}, {"delta_x", c.delta_x[i]}, {"realization", r}});
      }
    }
    res.files.push_back(lp);
    res.files.push_back(dp);
    const double stderr_ = est.n > 1 ? est.std / std::sqrt(static_cast<double>(est.n)) : 0.0;
    estimates.push_back({{"k", k},
                         {"hbar", cfg.model.hbar},
                         {"lambda_mean", est.mean},
                         {"lambda_std", est.std},
                         {"lambda_stderr", stderr_},
                         {"n", est.n},
                         {"T_total", est.t_total},
                         {"stretch_warnings", est.stretch_warnings},
                         {"t", est.t},
                         {"mean_curve", est.mean_curve}});
  }
  res.summary = base_summary(cfg);
  res.summary["estimates"] = estimates;
  finish(res, dir);
  return res;
}

ExperimentResult run_strobe_map(const ExperimentConfig& cfg, bool dump_noise) {
  const fs::path dir = prepare_dir(cfg);
  const SpatialGrid grid = cfg.grid.spatial();
  const double hbar = cfg.model.hbar;
  const double dt = step_size(cfg);
  const std::size_t spp = cfg.numerics.steps_per_period;
  const std::size_t periods = total_periods(cfg);
  const double sigma = initial_sigma_x(cfg);

  struct Run {
    std::vector<double> x, p;
    std::vector<std::pair<std::uint64_t, double>> noise;
  };
  std::vector<Run> runs(cfg.numerics.ensemble_n);
  parallel_for(runs.size(), cfg.numerics.workers, [&](std::size_t r) {
    SchrodingerPropagator prop(cfg.model, grid, dt, propagator_options(cfg));
    SpatialState s = coherent_state(grid, hbar, cfg.initial.x0, cfg.initial.p0, sigma);
    NoisePath noise = NoisePath::for_member(cfg.numerics.base_seed, r, dt);
    noise.set_audit(dump_noise);
    for (std::size_t p = 1; p <= periods; ++p) {
      if (cfg.model.k > 0.0) {
        prop.advance_conditioned(s, spp, noise);
      } else {
        prop.advance_isolated(s, spp);
      }
      const MomentSet m = moments(s, hbar);
      runs[r].x.push_back(m.x);
      runs[r].p.push_back(m.p);
    }
    if (dump_noise) runs[r].noise = noise.audit_log();
  });

  const auto orbit = classical_orbit_summary(cfg.model, cfg.initial.x0, cfg.initial.p0,
                                             cfg.strobe.classical_periods, oracle_steps(cfg));
  std::vector<double> cx, cp;
  for (const auto& e : orbit.strobe) {
    cx.push_back(e.x);
    cp.push_back(e.p);
  }
  std::vector<double> qx, qp;
  for (const auto& r : runs) {
    qx.insert(qx.end(), r.x.begin(), r.x.end());
    qp.insert(qp.end(), r.p.begin(), r.p.end());
  }

  ExperimentResult res;
  const json header = provenance(cfg);
  const auto csv = dir / "strobe.csv";
  {
    std::ofstream out(csv);
    if (!out) throw Error("cannot open " + csv.string() + " for writing");
    out << "# " << json{{"qchaos", header}}.dump() << '\n';
    out << "source,realization,period,x,p\n";
    out.precision(17);
    for (std::size_t r = 0; r < runs.size(); ++r) {
      for (std::size_t i = 0; i < runs[r].x.size(); ++i) {
        out << "quantum," << r << ',' << i + 1 << ',' << runs[r].x[i] << ',' << runs[r].p[i] << '\n';
      }
    }
    for (std::size_t i = 0; i < cx.size(); ++i) {
      out << "classical,0," << i + 1 << ',' << cx[i] << ',' << cp[i] << '\n';
    }
  }
  res.files.push_back(csv);
  if (dump_noise) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto np = dir / indexed("noise", r, ".ndjson");
      NdjsonWriter nw(np, header);
      for (const auto& [i, dw] : runs[r].noise) nw.write({{"i", i}, {"dw", dw}});
      res.files.push_back(np);
    }
  }

  // Radii in the classical map's own units: centred on its mean, each axis
  // scaled by its standard deviation.
  const double mx = mean(cx), mp = mean(cp);
  const double sx = stddev(cx), sp = stddev(cp);
  auto radii = [&](const std::vector<double>& xs, const std::vector<double>& ps) {
    std::vector<double> r(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) r[i] = std::hypot((xs[i] - mx) / sx, (ps[i] - mp) / sp);
    return r;
  };
  auto rms = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
  };
  const auto rq = radii(qx, qp);
  const auto rc = radii(cx, cp);
  const KsResult ks = ks_two_sample(rq, rc);

  const double pad_x = 0.1 * (orbit.x_hi - orbit.x_lo), pad_p = 0.1 * (orbit.p_hi - orbit.p_lo);
  const double x_lo = orbit.x_lo - pad_x, x_hi = orbit.x_hi + pad_x;
  const double p_lo = orbit.p_lo - pad_p, p_hi = orbit.p_hi + pad_p;
  // bandwidth = 0 picks Scott's rule; otherwise it replaces the n^(-1/6) factor.
  auto bw = [&](const std::vector<double>& v) {
    const double s = std::max(stddev(v), 1e-12);
    return cfg.strobe.bandwidth > 0.0 ? cfg.strobe.bandwidth * s : std::max(scott_bandwidth(v), 1e-12);
  };
  const std::size_t nk = cfg.strobe.kde_n;
  const DensityGrid kde = kde2d(qx, qp, bw(qx), bw(qp), x_lo, x_hi, p_lo, p_hi, nk, nk);
  const std::vector<double> masses = mass_above_levels(kde, cfg.strobe.levels);
  {
    const double hx = (x_hi - x_lo) / static_cast<double>(nk - 1);
    const double hp = (p_hi - p_lo) / static_cast<double>(nk - 1);
    PhaseSpaceField f(PhaseSpaceGrid(SpatialGrid(x_lo, x_hi + hx, nk), p_lo, p_hi + hp, nk));
    std::copy(kde.values.begin(), kde.values.end(), f.f.begin());
    write_field(dir, "strobe-density", f, {{"kind", "kde"}, {"levels", cfg.strobe.levels}, {"qchaos", header}});
    res.files.push_back(dir / "field-strobe-density.bin");
  }

  res.summary = base_summary(cfg);
  res.summary["n_quantum"] = qx.size();
  res.summary["n_classical"] = cx.size();
  res.summary["ks_statistic"] = ks.statistic;
  res.summary["ks_p_value"] = ks.p_value;
  res.summary["rms_radius_quantum"] = rms(rq);
  res.summary["rms_radius_classical"] = rms(rc);
  res.summary["rms_radius_ratio"] = rms(rq) / rms(rc);
  res.summary["levels"] = cfg.strobe.levels;
  res.summary["mass_above_levels"] = masses;
  finish(res, dir);
  return res;
}

EnsembleDivergence classical_ensemble_divergence(const ModelSpec& model, double x0, double p0,
                                                 double sigma_x, double sigma_p, double delta0,
                                                 std::size_t walkers, std::size_t periods,
                                                 std::size_t steps_per_period, std::uint64_t seed) {
  if (walkers == 0 || periods == 0 || steps_per_period == 0) {
    throw std::invalid_argument("ensemble divergence: empty run");
  }
  const double period = model.drive_period();
  const double dt = period / static_cast<double>(steps_per_period);
  const NoisePath draws(seed, 1.0);
  std::vector<PhasePoint> a(walkers), b(walkers);
  for (std::size_t i = 0; i < walkers; ++i) {
    a[i] = {x0 + sigma_x * draws.normal_at(2 * i), p0 + sigma_p * draws.normal_at(2 * i + 1)};
    b[i] = {a[i].q + delta0, a[i].p};
  }
  EnsembleDivergence out;
  double t = 0.0;
  for (std::size_t k = 1; k <= periods; ++k) {
    for (std::size_t j = 0; j < steps_per_period; ++j) {
      for (std::size_t i = 0; i < walkers; ++i) {
        a[i] = heun_step(a[i], model.potential, model.mass, t, dt);
        b[i] = heun_step(b[i], model.potential, model.mass, t, dt);
      }
      t = period * static_cast<double>(k - 1) + dt * static_cast<double>(j + 1);
    }
    double d = 0.0;
    for (std::size_t i = 0; i < walkers; ++i) d += b[i].q - a[i].q;
    d = std::abs(d) / static_cast<double>(walkers);
    const double tk = static_cast<double>(k);
    out.t.push_back(tk);
    out.lambda.push_back(std::log(std::max(d, 1e-300) / delta0) / tk);
  }
  return out;
}

ExperimentResult run_isolated_decay(const ExperimentConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  const json header = provenance(cfg);
  const LyapunovEstimate est = lyapunov_fixed_noise(lyapunov_config(cfg, 0.0));
  const double slope = loglog_slope(est.t, est.mean_curve, cfg.decay.fit_t_min, cfg.decay.fit_t_max);

  const double sigma_x = initial_sigma_x(cfg);
  const EnsembleDivergence control = classical_ensemble_divergence(
      cfg.model, cfg.initial.x0, cfg.initial.p0, sigma_x, cfg.model.hbar / (2.0 * sigma_x),
      cfg.numerics.delta0, cfg.decay.classical_walkers, total_periods(cfg),
      cfg.numerics.steps_per_period, cfg.numerics.base_seed);

  ExperimentResult res;
  const auto lp = dir / "lyapunov-decay.ndjson";
  {
    NdjsonWriter w(lp, header);
    for (std::size_t r = 0; r < est.realizations.size(); ++r) {
      for (std::size_t i = 0; i < est.t.size(); ++i) {
        w.write({{"t", est.t[i]}, {"lambda_s", est.realizations[r].lambda[i]}, {"realization", r}});
      }
    }
  }
  const auto cp = dir / "classical-control.ndjson";
  {
    NdjsonWriter w(cp, header);
    for (std::size_t i = 0; i < control.t.size(); ++i) {
      w.write({{"t", control.t[i]}, {"lambda_s", control.lambda[i]}, {"realization", 0}});
    }
  }
  res.files.push_back(lp);
  res.files.push_back(cp);

  std::vector<double> positive;
  for (double v : control.lambda) positive.push_back(std::abs(v));
  res.summary = base_summary(cfg);
  res.summary["k"] = 0.0;
  res.summary["hbar"] = cfg.model.hbar;
  res.summary["lambda_mean"] = est.mean;
  res.summary["lambda_std"] = est.std;
  res.summary["n"] = est.n;
  res.summary["T_total"] = est.t_total;
  res.summary["loglog_slope"] = slope;
  res.summary["fit_range"] = {cfg.decay.fit_t_min, cfg.decay.fit_t_max};
  res.summary["t"] = est.t;
  res.summary["mean_curve"] = est.mean_curve;
  res.summary["classical_control"] = {
      {"final_lambda", control.lambda.back()},
      {"loglog_slope", loglog_slope(control.t, positive, cfg.decay.fit_t_min, cfg.decay.fit_t_max)},
      {"walkers", cfg.decay.classical_walkers}};
  finish(res, dir);
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& in, const RunOptions& opts) {
  ExperimentConfig cfg = in;
  apply_overrides(cfg, opts);
  switch (cfg.kind) {
    case ExperimentKind::StrongQct: return run_strong_qct(cfg, opts.dump_noise);
    case ExperimentKind::WeakQct: return run_weak_qct(cfg);
    case ExperimentKind::LyapunovSweep: return run_lyapunov_sweep(cfg);
    case ExperimentKind::StrobeMap: return run_strobe_map(cfg, opts.dump_noise);
    case ExperimentKind::IsolatedDecay: return run_isolated_decay(cfg);
  }
  throw std::logic_error("unknown experiment kind");
}

}  // namespace qchaos

#include "qchaos/lyapunov.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qchaos/errors.hpp"
#include "qchaos/parallel.hpp"

namespace qchaos {

namespace {

struct Offset {
  double x;
  double p;
};

class QuantumPair {
 public:
  QuantumPair(const LyapunovConfig& cfg, std::size_t index, double dt)
      : hbar_(cfg.model.hbar),
        prop_(cfg.model, *cfg.grid, dt, cfg.propagator),
        a_(coherent_state(*cfg.grid, cfg.model.hbar, cfg.x0, cfg.p0, cfg.sigma_x)),
        b_(a_),
        noise_a_(NoisePath::for_member(cfg.base_seed, index, dt)),
        noise_b_(noise_a_),
        measured_(cfg.model.k > 0.0) {}

  SpatialState& perturbed() { return b_; }

  void advance(std::size_t steps) {
    if (measured_) {
      prop_.advance_conditioned(a_, steps, noise_a_);
      prop_.advance_conditioned(b_, steps, noise_b_);
    } else {
      prop_.advance_isolated(a_, steps);
      prop_.advance_isolated(b_, steps);
    }
  }

  Offset offset() const {
    const auto ma = moments(a_, hbar_);
    const auto mb = moments(b_, hbar_);
    return {mb.x - ma.x, mb.p - ma.p};
  }

  void redisplace(double dx, double dp) {
    b_.psi = a_.psi;
    displace(b_, hbar_, dx, dp);
    b_.normalize();
  }

  double tangent_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < a_.psi.size(); ++i) s += std::norm(b_.psi[i] - a_.psi[i]);
    return std::sqrt(s * a_.grid.dx());
  }

  void tangent_rescale(double factor) {
    for (std::size_t i = 0; i < a_.psi.size(); ++i) b_.psi[i] = a_.psi[i] + factor * (b_.psi[i] - a_.psi[i]);
    b_.normalize();
  }

 private:
  double hbar_;
  SchrodingerPropagator prop_;
  SpatialState a_;
  SpatialState b_;
  NoisePath noise_a_;
  NoisePath noise_b_;
  bool measured_;
};

class CumulantPair {
 public:
  CumulantPair(const LyapunovConfig& cfg, std::size_t index, double dt)
      : cfg_(cfg),
        dt_(dt),
        noise_a_(NoisePath::for_member(cfg.base_seed, index, dt)),
        noise_b_(noise_a_) {
    a_.x = cfg.x0;
    a_.p = cfg.p0;
    a_.cxx = cfg.sigma_x * cfg.sigma_x;
    a_.cpp = cfg.sigma_p * cfg.sigma_p;
    b_ = a_;
  }

  CumulantState& perturbed() { return b_; }

  void advance(std::size_t steps) {
    for (std::size_t s = 0; s < steps; ++s) {
      a_ = cumulant_step(a_, cfg_.model, noise_a_, cfg_.model.k, dt_, cfg_.cumulant);
      b_ = cumulant_step(b_, cfg_.model, noise_b_, cfg_.model.k, dt_, cfg_.cumulant);
    }
  }

  Offset offset() const { return {b_.x - a_.x, b_.p - a_.p}; }

  void redisplace(double dx, double dp) {
    const double t = b_.t;
    b_ = a_;
    b_.t = t;
    b_.x += dx;
    b_.p += dp;
  }

  double tangent_norm() const {
    const double v[5] = {b_.x - a_.x, (b_.p - a_.p) / cfg_.p_scale, b_.cxx - a_.cxx, b_.cxp - a_.cxp,
                         b_.cpp - a_.cpp};
    double s = 0.0;
    for (double e : v) s += e * e;
    return std::sqrt(s);
  }

  void tangent_rescale(double f) {
    b_.x = a_.x + f * (b_.x - a_.x);
    b_.p = a_.p + f * (b_.p - a_.p);
    b_.cxx = a_.cxx + f * (b_.cxx - a_.cxx);
    b_.cxp = a_.cxp + f * (b_.cxp - a_.cxp);
    b_.cpp = a_.cpp + f * (b_.cpp - a_.cpp);
  }

 private:
  const LyapunovConfig& cfg_;
  double dt_;
  CumulantState a_, b_;
  NoisePath noise_a_, noise_b_;
};

class LangevinPair {
 public:
  LangevinPair(const LyapunovConfig& cfg, std::size_t index, double dt)
      : cfg_(cfg),
        dt_(dt),
        a_{cfg.x0, cfg.p0, 0.0, NoisePath::for_member(cfg.base_seed, index, dt)},
        b_(a_) {}

  LangevinWalker& perturbed() { return b_; }

  // Time comes from the step count, as in the tangent oracle, so a noiseless
  // fiducial walker retraces the oracle's orbit bit for bit.
  void advance(std::size_t steps) {
    for (std::size_t s = 0; s < steps; ++s, ++step_) {
      a_.t = b_.t = static_cast<double>(step_) * dt_;
      langevin_step(a_, cfg_.model, dt_);
      langevin_step(b_, cfg_.model, dt_);
    }
  }

  Offset offset() const { return {b_.q - a_.q, b_.p - a_.p}; }

  void redisplace(double dx, double dp) {
    b_.q = a_.q + dx;
    b_.p = a_.p + dp;
  }

  double tangent_norm() const { return std::hypot(b_.q - a_.q, (b_.p - a_.p) / cfg_.p_scale); }

  void tangent_rescale(double f) {
    b_.q = a_.q + f * (b_.q - a_.q);
    b_.p = a_.p + f * (b_.p - a_.p);
  }

 private:
  const LyapunovConfig& cfg_;
  double dt_;
  LangevinWalker a_, b_;
  std::size_t step_ = 0;
};

template <class Pair>
LyapunovCurve drive(const LyapunovConfig& cfg, Pair& pair, std::size_t* warnings) {
  const auto intervals = static_cast<std::size_t>(std::llround(cfg.t_total / cfg.tau_r));
  const auto steps = static_cast<std::size_t>(std::llround(cfg.tau_r * static_cast<double>(cfg.steps_per_period)));
  if (intervals == 0 || steps == 0) throw std::invalid_argument("lyapunov: t_total and tau_r must span at least one step");
  const double ps = cfg.p_scale;
  auto metric = [ps](const Offset& o) { return std::hypot(o.x, o.p / ps); };

  const Offset o0 = pair.offset();
  const double d0 = metric(o0);
  const double eps = pair.tangent_norm();
  if (!(d0 > 0.0) || !(eps > 0.0)) throw std::invalid_argument("lyapunov: initial offset is zero");

  LyapunovCurve curve;
  curve.lambda.reserve(intervals);
  curve.delta_x.reserve(intervals);
  double acc = 0.0;
  double d_prev = d0;
  for (std::size_t i = 1; i <= intervals; ++i) {
    pair.advance(steps);
    const Offset o = pair.offset();
    const double d = metric(o);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw StretchOverflow("lyapunov: centroid offset degenerated to " + std::to_string(d));
    }
    const double t = static_cast<double>(i) * cfg.tau_r;
    curve.delta_x.push_back(std::abs(o.x));
    if (cfg.renormalization == Renormalization::Redisplace) {
      const double stretch = d / d_prev;
      if (stretch > std::exp(6.0)) {
        throw StretchOverflow("lyapunov: offset grew by " + std::to_string(stretch) +
                              " within one interval; shorten tau_r");
      }
      if (stretch > std::exp(3.0) && warnings) ++*warnings;
      acc += std::log(stretch);
      curve.lambda.push_back(acc / t);
      const double ux = o.x / d, up = o.p / ps / d;
      pair.redisplace(cfg.delta0 * ux, cfg.delta0 * up * ps);
      d_prev = cfg.delta0;
    } else {
      const double nu = pair.tangent_norm();
      const double growth = nu / eps;
      if (growth > std::exp(6.0)) {
        throw StretchOverflow("lyapunov: state difference grew by " + std::to_string(growth) +
                              " within one interval; shorten tau_r");
      }
      if (growth > std::exp(3.0) && warnings) ++*warnings;
      curve.lambda.push_back((acc + std::log(d / d0)) / t);
      acc += std::log(growth);
      pair.tangent_rescale(eps / nu);
    }
  }
  return curve;
}

LyapunovConfig resolved(const LyapunovConfig& in) {
  LyapunovConfig cfg = in;
  cfg.model.validate();
  if (!(cfg.delta0 > 0.0)) throw std::invalid_argument("lyapunov: delta0 must be > 0");
  if (!(cfg.tau_r > 0.0) || !(cfg.t_total > 0.0)) throw std::invalid_argument("lyapunov: tau_r and t_total must be > 0");
  if (!(cfg.p_scale > 0.0)) throw std::invalid_argument("lyapunov: p_scale must be > 0");
  if (cfg.steps_per_period == 0) throw std::invalid_argument("lyapunov: steps_per_period must be > 0");
  const double hbar = cfg.model.hbar;
  if (cfg.sigma_x <= 0.0) cfg.sigma_x = std::sqrt(hbar > 0.0 ? hbar / 2.0 : 0.0);
  if (cfg.sigma_p <= 0.0 && cfg.sigma_x > 0.0) cfg.sigma_p = hbar / (2.0 * cfg.sigma_x);
  if (cfg.system == LyapunovSystem::Quantum) {
    if (!cfg.grid) throw std::invalid_argument("lyapunov: quantum system needs a grid");
    if (!(hbar > 0.0)) throw std::invalid_argument("lyapunov: quantum system needs hbar > 0");
  }
  return cfg;
}

}  // namespace

void perturb_initial(SpatialState& state, double hbar, double delta0, double ux, double up) {
  if (delta0 == 0.0) return;
  displace(state, hbar, delta0 * ux, delta0 * up);
  state.normalize();
}

void perturb_initial(CumulantState& state, double delta0, double ux, double up) {
  state.x += delta0 * ux;
  state.p += delta0 * up;
}

void perturb_initial(LangevinWalker& walker, double delta0, double ux, double up) {
  walker.q += delta0 * ux;
  walker.p += delta0 * up;
}

LyapunovCurve lyapunov_realization(const LyapunovConfig& in, std::size_t index,
                                   std::size_t* stretch_warnings) {
  const LyapunovConfig cfg = resolved(in);
  const double dt = cfg.model.drive_period() / static_cast<double>(cfg.steps_per_period);
  const double ux = std::cos(cfg.direction_angle);
  const double up = std::sin(cfg.direction_angle) * cfg.p_scale;
  switch (cfg.system) {
    case LyapunovSystem::Quantum: {
      QuantumPair pair(cfg, index, dt);
      perturb_initial(pair.perturbed(), cfg.model.hbar, cfg.delta0, ux, up);
      return drive(cfg, pair, stretch_warnings);
    }
    case LyapunovSystem::Cumulant: {
      CumulantPair pair(cfg, index, dt);
      perturb_initial(pair.perturbed(), cfg.delta0, ux, up);
      return drive(cfg, pair, stretch_warnings);
    }
    case LyapunovSystem::Langevin: {
      LangevinPair pair(cfg, index, dt);
      perturb_initial(pair.perturbed(), cfg.delta0, ux, up);
      return drive(cfg, pair, stretch_warnings);
    }
  }
  throw std::logic_error("lyapunov: unknown system");
}

LyapunovEstimate lyapunov_fixed_noise(const LyapunovConfig& in) {
  const LyapunovConfig cfg = resolved(in);
  if (cfg.ensemble_n == 0) throw std::invalid_argument("lyapunov: ensemble_n must be > 0");
  LyapunovEstimate est;
  est.n = cfg.ensemble_n;
  est.t_total = cfg.t_total;
  est.realizations.resize(cfg.ensemble_n);
  std::vector<std::size_t> warnings(cfg.ensemble_n, 0);

  parallel_for(cfg.ensemble_n, cfg.workers,
               [&](std::size_t i) { est.realizations[i] = lyapunov_realization(cfg, i, &warnings[i]); });

  const std::size_t len = est.realizations.front().lambda.size();
  for (std::size_t i = 0; i < len; ++i) est.t.push_back(static_cast<double>(i + 1) * cfg.tau_r);
  est.mean_curve.assign(len, 0.0);
  est.std_curve.assign(len, 0.0);
  const double n = static_cast<double>(cfg.ensemble_n);
  for (std::size_t i = 0; i < len; ++i) {
    double s = 0.0;
    for (const auto& r : est.realizations) s += r.lambda[i];
    const double mean = s / n;
    double v = 0.0;
    for (const auto& r : est.realizations) v += (r.lambda[i] - mean) * (r.lambda[i] - mean);
    est.mean_curve[i] = mean;
    est.std_curve[i] = cfg.ensemble_n > 1 ? std::sqrt(v / (n - 1.0)) : 0.0;
  }
  est.mean = est.mean_curve.back();
  est.std = est.std_curve.back();
  for (auto w : warnings) est.stretch_warnings += w;
  return est;
}

TangentResult classical_tangent_oracle(const ModelSpec& model, double x0, double p0,
                                       double periods, std::size_t steps_per_period) {
  if (!(periods > 0.0) || steps_per_period == 0) throw std::invalid_argument("tangent oracle: empty run");
  const auto& pot = model.potential;
  const double m = model.mass;
  const double period = model.drive_period();
  const double dt = period / static_cast<double>(steps_per_period);
  const auto n_periods = static_cast<std::size_t>(std::llround(periods));
  double q = x0, p = p0;
  double u = 1.0, v = 0.0;  // tangent vector (dq, dp)
  double acc = 0.0;
  TangentResult out;
  out.curve.reserve(n_periods);
  for (std::size_t k = 0; k < n_periods; ++k) {
    for (std::size_t j = 0; j < steps_per_period; ++j) {
      const double t = (static_cast<double>(k) * static_cast<double>(steps_per_period) + static_cast<double>(j)) * dt;
      // Heun map and its exact Jacobian.
      const double f0 = pot.force(q, t);
      const double g0 = -pot.derivative(q, t, 2);
      const double q1 = q + p / m * dt;
      const double p1 = p + f0 * dt;
      const double f1 = pot.force(q1, t + dt);
      const double g1 = -pot.derivative(q1, t + dt, 2);
      const double du1 = u + v / m * dt;
      const double dv1 = v + g0 * u * dt;
      const double nu = u + 0.5 * (v + dv1) / m * dt;
      const double nv = v + 0.5 * (g0 * u + g1 * du1) * dt;
      q += 0.5 * (p + p1) / m * dt;
      p += 0.5 * (f0 + f1) * dt;
      u = nu;
      v = nv;
    }
    const double norm = std::hypot(u, v);
    acc += std::log(norm);
    u /= norm;
    v /= norm;
    out.curve.push_back(acc / static_cast<double>(k + 1));
  }
  out.lambda = out.curve.back();
  return out;
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& lambda, double t_lo,
                    double t_hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size() && i < lambda.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi || !(lambda[i] > 0.0)) continue;
    const double x = std::log(t[i]), y = std::log(lambda[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double nn = static_cast<double>(n);
  return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

}  // namespace qchaos

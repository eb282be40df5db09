#include "qchaos/quantum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qchaos/errors.hpp"

namespace qchaos {

namespace {

constexpr std::size_t kAnchorEvery = 32;

double sum_density(const AlignedVector<cplx>& psi) {
  double s = 0.0;
  for (const auto& a : psi) s += std::norm(a);
  return s;
}

}  // namespace

double SpatialState::norm() const { return sum_density(psi) * grid.dx(); }

void SpatialState::normalize() {
  const double nrm = norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NonfiniteState("normalize: norm is " + std::to_string(nrm));
  const double s = 1.0 / std::sqrt(nrm);
  for (auto& a : psi) a *= s;
}

double SpatialState::boundary_mass(double fraction) const {
  const std::size_t n = psi.size();
  auto edge = static_cast<std::size_t>(std::ceil(0.5 * fraction * static_cast<double>(n)));
  if (edge == 0) edge = 1;
  double s = 0.0;
  for (std::size_t i = 0; i < edge; ++i) s += std::norm(psi[i]) + std::norm(psi[n - 1 - i]);
  return s * grid.dx();
}

std::vector<double> SpatialState::density() const {
  std::vector<double> out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) out[i] = std::norm(psi[i]);
  return out;
}

MomentSet moments(const SpatialState& state, double hbar) {
  const auto& g = state.grid;
  const std::size_t n = g.size();
  MomentSet m;
  m.t = state.t;

  double w = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = std::norm(state.psi[i]);
    w += rho;
    sx += rho * g.x(i);
  }
  m.x = sx / w;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = g.x(i) - m.x;
    sxx += std::norm(state.psi[i]) * u * u;
  }
  m.vx = sxx / w;

  AlignedVector<cplx> phi(state.psi.begin(), state.psi.end());
  fft::forward(phi.data(), n);
  double wp = 0.0, sp = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::norm(phi[j]);
    wp += a;
    sp += a * g.p(j, hbar);
  }
  m.p = sp / wp;
  double spp = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = g.p(j, hbar) - m.p;
    spp += std::norm(phi[j]) * v * v;
  }
  m.vp = spp / wp;

  // (p - <p>) psi, then Re <psi| (x - <x>) (p - <p>) |psi>.
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) phi[j] *= (g.p(j, hbar) - m.p) * inv_n;
  fft::backward(phi.data(), n);
  double c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c += (std::conj(state.psi[i]) * phi[i]).real() * (g.x(i) - m.x);
  }
  m.cxp = c / w;
  return m;
}

SpatialState coherent_state(const SpatialGrid& grid, double hbar, double x0, double p0,
                            double sigma_x) {
  if (!(hbar > 0.0) || !(sigma_x > 0.0)) {
    throw std::invalid_argument("coherent_state: hbar and sigma_x must be > 0");
  }
  SpatialState s(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    const double u = x - x0;
    s.psi[i] = std::exp(cplx(-u * u / (4.0 * sigma_x * sigma_x), p0 * u / hbar));
  }
  s.normalize();
  return s;
}

SpatialState harmonic_eigenstate(const SpatialGrid& grid, double hbar, double mass,
                                 double omega, unsigned level) {
  SpatialState s(grid);
  const double scale = std::sqrt(mass * omega / hbar);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double xi = scale * grid.x(i);
    // Normalized Hermite functions by the stable three-term recurrence.
    double prev = 0.0;
    double cur = std::exp(-0.5 * xi * xi);
    for (unsigned k = 0; k < level; ++k) {
      const double next = std::sqrt(2.0 / (k + 1.0)) * xi * cur - std::sqrt(k / (k + 1.0)) * prev;
      prev = cur;
      cur = next;
    }
    s.psi[i] = cur;
  }
  s.normalize();
  return s;
}

void displace(SpatialState& state, double hbar, double dx, double dp) {
  const auto& g = state.grid;
  const std::size_t n = g.size();
  if (dx != 0.0) {
    fft::forward(state.psi.data(), n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      state.psi[j] *= std::polar(inv_n, -g.p(j, hbar) * dx / hbar);
    }
    fft::backward(state.psi.data(), n);
  }
  if (dp != 0.0) {
    for (std::size_t i = 0; i < n; ++i) state.psi[i] *= std::polar(1.0, dp * g.x(i) / hbar);
  }
}

double energy(const SpatialState& state, const ModelSpec& model) {
  const auto mo = moments(state, model.hbar);
  const auto& g = state.grid;
  double v = 0.0, w = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rho = std::norm(state.psi[i]);
    v += rho * model.potential.value(g.x(i), state.t);
    w += rho;
  }
  return (mo.vp + mo.p * mo.p) / (2.0 * model.mass) + v / w;
}

void fill_gaussian_factor(cplx* out, std::size_t n, double u0, double du, cplx c0, cplx c1,
                          double c2) {
  // f(u+du)/f(u) = exp(c1 du + c2 (2u + du) du); that ratio itself grows by exp(2 c2 du^2).
  const cplx q = std::exp(cplx(2.0 * c2 * du * du, 0.0));
  for (std::size_t start = 0; start < n; start += kAnchorEvery) {
    const double u = u0 + static_cast<double>(start) * du;
    cplx f = std::exp(c0 + c1 * u + c2 * u * u);
    cplx r = std::exp(c1 * du + c2 * (2.0 * u + du) * du);
    const std::size_t stop = std::min(n, start + kAnchorEvery);
    for (std::size_t i = start; i < stop; ++i) {
      out[i] = f;
      f *= r;
      r *= q;
    }
  }
}

SchrodingerPropagator::SchrodingerPropagator(const ModelSpec& model, const SpatialGrid& grid,
                                             double dt, PropagatorOptions options)
    : model_(model), grid_(grid), dt_(dt), options_(options) {
  model_.validate();
  if (!(model_.hbar > 0.0)) throw std::invalid_argument("SchrodingerPropagator: hbar must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("SchrodingerPropagator: dt must be > 0");
  const std::size_t n = grid.size();
  const double hbar = model_.hbar;
  xs_ = grid.positions();
  static_phase_.resize(n);
  half_kick_.resize(n);
  full_kick_.resize(n);
  factor_.resize(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    static_phase_[i] = std::polar(1.0, -model_.potential.static_potential(xs_[i]) * dt / hbar);
    const double p = grid.p(i, hbar);
    const double t_kin = p * p / (2.0 * model_.mass) / hbar;
    half_kick_[i] = std::polar(inv_n, -t_kin * 0.5 * dt);
    full_kick_[i] = std::polar(inv_n, -t_kin * dt);
  }
}

void SchrodingerPropagator::kinetic(cplx* psi, const AlignedVector<cplx>& table) {
  const std::size_t n = grid_.size();
  fft::forward(psi, n);
  for (std::size_t j = 0; j < n; ++j) psi[j] *= table[j];
  fft::backward(psi, n);
}

double SchrodingerPropagator::position_step(SpatialState& state, double t_mid, NoisePath* noise,
                                            bool check) {
  const std::size_t n = grid_.size();
  const double hbar = model_.hbar;
  const double drive = model_.potential.drive_amp() * std::cos(model_.potential.drive_omega() * t_mid);
  const double phase_rate = -drive * dt_ / hbar;
  cplx* psi = state.psi.data();

  if (noise == nullptr) {
    if (drive != 0.0) {
      fill_gaussian_factor(factor_.data(), n, xs_[0], grid_.dx(), 0.0, cplx(0.0, phase_rate), 0.0);
      for (std::size_t i = 0; i < n; ++i) psi[i] *= static_phase_[i] * factor_[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) psi[i] *= static_phase_[i];
    }
    return 0.0;
  }

  double w = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = std::norm(psi[i]);
    w += rho;
    sx += rho * xs_[i];
  }
  const double mean_x = sx / w;
  if (check) {
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = xs_[i] - mean_x;
      sxx += std::norm(psi[i]) * u * u;
    }
    if (model_.k * (sxx / w) * dt_ >= 0.1) ++stats_.large_step_warnings;
  }

  const double k = model_.k;
  const double dw = noise->next_dw();
  // The drive phase is kept as an exact function of x: relative phases
  // between states of different mean position must not depend on <x>.
  fill_gaussian_factor(factor_.data(), n, xs_[0] - mean_x, grid_.dx(),
                       cplx(0.0, phase_rate * mean_x),
                       cplx(std::sqrt(2.0 * k) * dw, phase_rate), -2.0 * k * dt_);
  double nrm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    psi[i] *= static_phase_[i] * factor_[i];
    nrm += std::norm(psi[i]);
  }
  nrm *= grid_.dx();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    throw NonfiniteState("sse_step: norm became " + std::to_string(nrm) + " at t=" +
                         std::to_string(t_mid));
  }
  const double s = 1.0 / std::sqrt(nrm);
  for (std::size_t i = 0; i < n; ++i) psi[i] *= s;
  return mean_x * dt_ + dw / std::sqrt(8.0 * k);
}

void SchrodingerPropagator::check_state(const SpatialState& state) {
  const double nrm = state.norm();
  if (!std::isfinite(nrm)) throw NonfiniteState("propagator: non-finite amplitudes at t=" + std::to_string(state.t));
  if (options_.check_boundary) {
    const double edge = state.boundary_mass(options_.boundary_fraction);
    stats_.max_boundary_mass = std::max(stats_.max_boundary_mass, edge);
    if (edge > options_.boundary_tolerance) {
      throw GridOverflow("boundary mass " + std::to_string(edge) + " exceeds tolerance at t=" +
                         std::to_string(state.t));
    }
  }
}

void SchrodingerPropagator::advance(SpatialState& state, std::size_t steps, NoisePath* noise,
                                    std::vector<double>* record) {
  if (steps == 0) return;
  if (!(state.grid == grid_)) throw std::invalid_argument("SchrodingerPropagator: grid mismatch");
  if (noise != nullptr && !(model_.k > 0.0)) {
    throw std::invalid_argument("sse_step: measurement strength k must be > 0");
  }
  if (noise != nullptr && model_.D > 0.0) {
    throw std::invalid_argument(
        "sse_step: environmental diffusion has no observed channel to unravel; use D = 0");
  }
  const double t0 = state.t;
  cplx* psi = state.psi.data();
  kinetic(psi, half_kick_);
  for (std::size_t s = 0; s < steps; ++s) {
    const bool check = options_.check_every > 0 && (stats_.steps + 1) % options_.check_every == 0;
    const double dy = position_step(state, t0 + (static_cast<double>(s) + 0.5) * dt_, noise, check);
    if (record) record->push_back(dy);
    kinetic(psi, s + 1 == steps ? half_kick_ : full_kick_);
    ++stats_.steps;
    if (check) {
      state.t = t0 + static_cast<double>(s + 1) * dt_;
      check_state(state);
    }
  }
  state.t = t0 + static_cast<double>(steps) * dt_;
  if (!std::isfinite(std::norm(psi[0])) || !std::isfinite(std::norm(psi[grid_.size() / 2]))) {
    throw NonfiniteState("propagator: non-finite amplitudes at t=" + std::to_string(state.t));
  }
}

void SchrodingerPropagator::advance_isolated(SpatialState& state, std::size_t steps) {
  advance(state, steps, nullptr, nullptr);
}

void SchrodingerPropagator::advance_conditioned(SpatialState& state, std::size_t steps,
                                                NoisePath& noise, std::vector<double>* record) {
  advance(state, steps, &noise, record);
}

double SchrodingerPropagator::sse_step(SpatialState& state, NoisePath& noise) {
  std::vector<double> rec;
  rec.reserve(1);
  advance(state, 1, &noise, &rec);
  return rec.front();
}

double sse_step(SpatialState& state, const ModelSpec& model, NoisePath& noise, double dt) {
  SchrodingerPropagator prop(model, state.grid, dt);
  return prop.sse_step(state, noise);
}

void isolated_step(SpatialState& state, const ModelSpec& model, double dt) {
  SchrodingerPropagator prop(model, state.grid, dt);
  prop.isolated_step(state);
}

std::vector<double> MeasurementRecord::averaged(double window) const {
  if (!(dt > 0.0) || !(window > 0.0)) throw std::invalid_argument("MeasurementRecord: dt and window must be > 0");
  const auto per = static_cast<std::size_t>(std::llround(window / dt));
  if (per == 0) throw std::invalid_argument("MeasurementRecord: window shorter than dt");
  std::vector<double> out;
  for (std::size_t start = 0; start + per <= dy.size(); start += per) {
    double s = 0.0;
    for (std::size_t i = start; i < start + per; ++i) s += dy[i];
    out.push_back(s / (static_cast<double>(per) * dt));
  }
  return out;
}

}  // namespace qchaos

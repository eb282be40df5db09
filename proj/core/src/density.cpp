#include "qchaos/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qchaos/errors.hpp"

namespace qchaos {

DensityState DensityState::pure(const SpatialState& state) {
  DensityState out(state.grid);
  out.t = state.t;
  out.add_outer(state, 1.0);
  return out;
}

void DensityState::add_outer(const SpatialState& state, double weight) {
  if (!(state.grid == grid)) throw std::invalid_argument("DensityState: grid mismatch");
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = weight * state.psi[i];
    cplx* row = rho.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) row[j] += a * std::conj(state.psi[j]);
  }
}

double DensityState::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s += at(i, i).real();
  return s * grid.dx();
}

double DensityState::purity() const {
  double s = 0.0;
  for (const auto& v : rho) s += std::norm(v);
  return s * grid.dx() * grid.dx();
}

double DensityState::hermiticity_error() const {
  double worst = 0.0;
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      worst = std::max(worst, std::abs(at(i, j) - std::conj(at(j, i))));
    }
  }
  return worst;
}

std::vector<double> DensityState::diagonal() const {
  std::vector<double> d(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) d[i] = at(i, i).real();
  return d;
}

double DensityState::min_diagonal() const {
  double m = at(0, 0).real();
  for (std::size_t i = 1; i < grid.size(); ++i) m = std::min(m, at(i, i).real());
  return m;
}

MomentSet moments(const DensityState& r, double hbar) {
  const auto& g = r.grid;
  const std::size_t n = g.size();
  MomentSet m;
  m.t = r.t;
  const auto d = r.diagonal();
  double w = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w += d[i];
    sx += d[i] * g.x(i);
  }
  m.x = sx / w;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxx += d[i] * (g.x(i) - m.x) * (g.x(i) - m.x);
  m.vx = sxx / w;

  // Momentum density: diagonal of F rho F^dagger.
  AlignedVector<cplx> work(r.rho.begin(), r.rho.end());
  fft::forward_2d(work.data(), n, n);
  // forward_2d transforms the column index with the forward sign as well, so
  // entry (a, b) pairs momentum p_a with -p_b; the density sits at b = -a.
  auto neg = [n](std::size_t a) { return (n - a) % n; };
  double wp = 0.0, sp = 0.0, spp = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const double v = work[a * n + neg(a)].real();
    const double p = g.p(a, hbar);
    wp += v;
    sp += v * p;
    spp += v * p * p;
  }
  m.p = sp / wp;
  m.vp = spp / wp - m.p * m.p;

  // Symmetrized <x p> = Re tr(x p rho). p acts on the row index, one column at a time.
  AlignedVector<cplx> col(n);
  double c = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = r.at(i, j);
    fft::forward(col.data(), n);
    for (std::size_t a = 0; a < n; ++a) col[a] *= (g.p(a, hbar) - m.p) * inv_n;
    fft::backward(col.data(), n);
    // tr((x - <x>)(p - <p>) rho) picks element (j, j) of (p rho) weighted by x_j.
    c += col[j].real() * (g.x(j) - m.x);
  }
  m.cxp = c / w;
  return m;
}

LindbladPropagator::LindbladPropagator(const ModelSpec& model, const SpatialGrid& grid, double dt,
                                       PropagatorOptions options)
    : model_(model), grid_(grid), dt_(dt), options_(options) {
  model_.validate();
  if (!(model_.hbar > 0.0)) throw std::invalid_argument("LindbladPropagator: hbar must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("LindbladPropagator: dt must be > 0");
  diffusion_ = model_.D + model_.backaction_diffusion();
  const std::size_t n = grid.size();
  const double hbar = model_.hbar;
  xs_ = grid.positions();
  static_phase_.resize(n);
  half_kick_.resize(n);
  full_kick_.resize(n);
  phase_.resize(n);
  decoherence_.resize(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    static_phase_[i] = std::polar(1.0, -model_.potential.static_potential(xs_[i]) * dt / hbar);
    const double p = grid.p(i, hbar);
    const double rate = p * p / (2.0 * model_.mass) / hbar;
    half_kick_[i] = std::polar(inv_n, -rate * 0.5 * dt);
    full_kick_[i] = std::polar(inv_n, -rate * dt);
    const double sep = static_cast<double>(i) * grid.dx();
    decoherence_[i] = std::exp(-diffusion_ * sep * sep * dt / (hbar * hbar));
  }
}

void LindbladPropagator::kinetic(cplx* rho, const AlignedVector<cplx>& table) {
  const std::size_t n = grid_.size();
  fft::forward_2d(rho, n, n);
  // Kinetic phases are even in p, so the sign flip on the column index from
  // the forward transform needs no correction.
  for (std::size_t a = 0; a < n; ++a) {
    const cplx ka = table[a];
    cplx* row = rho + a * n;
    for (std::size_t b = 0; b < n; ++b) row[b] *= ka * std::conj(table[b]);
  }
  fft::backward_2d(rho, n, n);
}

void LindbladPropagator::position_step(cplx* rho, double t_mid) {
  const std::size_t n = grid_.size();
  const double drive = model_.potential.drive_amp() * std::cos(model_.potential.drive_omega() * t_mid);
  fill_gaussian_factor(phase_.data(), n, xs_[0], grid_.dx(), 0.0, cplx(0.0, -drive * dt_ / model_.hbar),
                       0.0);
  for (std::size_t i = 0; i < n; ++i) phase_[i] *= static_phase_[i];
  for (std::size_t i = 0; i < n; ++i) {
    const cplx pi = phase_[i];
    cplx* row = rho + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t sep = i > j ? i - j : j - i;
      row[j] *= pi * std::conj(phase_[j]) * decoherence_[sep];
    }
  }
}

void LindbladPropagator::check(const DensityState& rho) const {
  const double tr = rho.trace();
  if (!std::isfinite(tr)) throw NonfiniteState("lindblad: non-finite trace at t=" + std::to_string(rho.t));
  if (std::abs(tr - 1.0) > 1e-6) {
    throw TraceDrift("lindblad: trace " + std::to_string(tr) + " at t=" + std::to_string(rho.t));
  }
  if (options_.check_boundary) {
    const std::size_t n = grid_.size();
    auto edge = static_cast<std::size_t>(std::ceil(0.5 * options_.boundary_fraction * static_cast<double>(n)));
    double s = 0.0;
    for (std::size_t i = 0; i < std::max<std::size_t>(edge, 1); ++i) {
      s += rho.at(i, i).real() + rho.at(n - 1 - i, n - 1 - i).real();
    }
    s *= grid_.dx();
    if (s > options_.boundary_tolerance) {
      throw GridOverflow("lindblad: boundary mass " + std::to_string(s) + " at t=" + std::to_string(rho.t));
    }
  }
}

void LindbladPropagator::advance(DensityState& rho, std::size_t steps) {
  if (steps == 0) return;
  if (!(rho.grid == grid_)) throw std::invalid_argument("LindbladPropagator: grid mismatch");
  const double t0 = rho.t;
  cplx* data = rho.rho.data();
  kinetic(data, half_kick_);
  for (std::size_t s = 0; s < steps; ++s) {
    position_step(data, t0 + (static_cast<double>(s) + 0.5) * dt_);
    kinetic(data, s + 1 == steps ? half_kick_ : full_kick_);
    ++steps_;
    if (options_.check_every > 0 && steps_ % options_.check_every == 0) {
      rho.t = t0 + static_cast<double>(s + 1) * dt_;
      check(rho);
    }
  }
  rho.t = t0 + static_cast<double>(steps) * dt_;
  if (!std::isfinite(rho.trace())) throw NonfiniteState("lindblad: non-finite state");
}

void lindblad_step(DensityState& rho, const ModelSpec& model, double dt) {
  LindbladPropagator prop(model, rho.grid, dt);
  prop.step(rho);
  const double tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-6) throw TraceDrift("lindblad_step: trace " + std::to_string(tr));
}

}  // namespace qchaos

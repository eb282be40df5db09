#include "qchaos/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qchaos/errors.hpp"

namespace qchaos {

double PhaseSpaceField::mass() const {
  double s = 0.0;
  for (double v : f) s += v;
  return s * grid.cell_area();
}

double PhaseSpaceField::min() const { return *std::min_element(f.begin(), f.end()); }
double PhaseSpaceField::max() const { return *std::max_element(f.begin(), f.end()); }

double PhaseSpaceField::negative_volume() const {
  double s = 0.0;
  for (double v : f) s += v < 0.0 ? -v : 0.0;
  return s * grid.cell_area();
}

void PhaseSpaceField::normalize() {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) throw NonfiniteField("normalize: mass is " + std::to_string(m));
  for (double& v : f) v /= m;
}

std::vector<double> PhaseSpaceField::x_marginal() const {
  std::vector<double> out(grid.n_x(), 0.0);
  for (std::size_t i = 0; i < grid.n_x(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.n_p(); ++j) s += at(i, j);
    out[i] = s * grid.dp();
  }
  return out;
}

std::vector<double> PhaseSpaceField::p_marginal() const {
  std::vector<double> out(grid.n_p(), 0.0);
  for (std::size_t i = 0; i < grid.n_x(); ++i) {
    for (std::size_t j = 0; j < grid.n_p(); ++j) out[j] += at(i, j);
  }
  for (double& v : out) v *= grid.dx();
  return out;
}

std::vector<double> PhaseSpaceField::p_slice(double p) const {
  const std::size_t j = grid.nearest_p_index(p);
  std::vector<double> out(grid.n_x());
  for (std::size_t i = 0; i < grid.n_x(); ++i) out[i] = at(i, j);
  return out;
}

MomentSet PhaseSpaceField::moments() const {
  MomentSet m;
  m.t = t;
  double w = 0.0, sx = 0.0, sp = 0.0;
  for (std::size_t i = 0; i < grid.n_x(); ++i) {
    for (std::size_t j = 0; j < grid.n_p(); ++j) {
      const double v = at(i, j);
      w += v;
      sx += v * grid.x(i);
      sp += v * grid.p(j);
    }
  }
  m.x = sx / w;
  m.p = sp / w;
  double vx = 0.0, vp = 0.0, c = 0.0;
  for (std::size_t i = 0; i < grid.n_x(); ++i) {
    const double u = grid.x(i) - m.x;
    for (std::size_t j = 0; j < grid.n_p(); ++j) {
      const double v = at(i, j);
      const double q = grid.p(j) - m.p;
      vx += v * u * u;
      vp += v * q * q;
      c += v * u * q;
    }
  }
  m.vx = vx / w;
  m.vp = vp / w;
  m.cxp = c / w;
  return m;
}

PhaseSpaceField gaussian_field(const PhaseSpaceGrid& grid, double x0, double p0, double vx,
                               double vp, double cxp) {
  const double det = vx * vp - cxp * cxp;
  if (!(vx > 0.0) || !(vp > 0.0) || !(det > 0.0)) {
    throw std::invalid_argument("gaussian_field: covariance must be positive definite");
  }
  PhaseSpaceField out(grid);
  for (std::size_t i = 0; i < grid.n_x(); ++i) {
    const double u = grid.x(i) - x0;
    for (std::size_t j = 0; j < grid.n_p(); ++j) {
      const double q = grid.p(j) - p0;
      const double quad = (vp * u * u - 2.0 * cxp * u * q + vx * q * q) / det;
      out.at(i, j) = std::exp(-0.5 * quad);
    }
  }
  out.normalize();
  return out;
}

PhaseSpacePropagator::PhaseSpacePropagator(const ModelSpec& model, const PhaseSpaceGrid& grid,
                                           double dt, PhaseSpaceOptions options)
    : model_(model), grid_(grid), dt_(dt), options_(options) {
  model_.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("PhaseSpacePropagator: dt must be > 0");
  if (!(options_.diffusion >= 0.0)) throw std::invalid_argument("PhaseSpacePropagator: diffusion must be >= 0");
  if (options_.kick == KickKind::Moyal && !(model_.hbar > 0.0)) {
    throw std::invalid_argument("PhaseSpacePropagator: Moyal kick needs hbar > 0");
  }
  const std::size_t nx = grid.n_x(), np = grid.n_p();
  const std::size_t hx = nx / 2 + 1, hp = np / 2 + 1;
  xs_ = grid.x_grid().positions();
  shear_half_.resize(hx * np);
  shear_full_.resize(hx * np);
  spec_x_.resize(hx * np);
  spec_p_.resize(nx * hp);
  row_factor_.resize(hp);
  theta_.resize(hp);
  for (std::size_t q = 0; q < hp; ++q) {
    theta_[q] = 2.0 * std::numbers::pi * static_cast<double>(q) / (static_cast<double>(np) * grid.dp());
  }
  const double inv_nx = 1.0 / static_cast<double>(nx);
  for (std::size_t l = 0; l < hx; ++l) {
    const double kappa = 2.0 * std::numbers::pi * static_cast<double>(l) / (static_cast<double>(nx) * grid.dx());
    for (std::size_t j = 0; j < np; ++j) {
      const double v = grid.p(j) / model_.mass;
      // The Nyquist row of a real transform cannot carry a phase; drop it.
      const double amp = l == nx / 2 ? 0.0 : inv_nx;
      shear_half_[l * np + j] = std::polar(amp, -kappa * v * 0.5 * dt);
      shear_full_[l * np + j] = std::polar(amp, -kappa * v * dt);
    }
  }
}

void PhaseSpacePropagator::shear_x(double* f, bool half) {
  const std::size_t nx = grid_.n_x(), np = grid_.n_p();
  fft::r2c_axis(f, spec_x_.data(), nx, np, 0);
  const auto& table = half ? shear_half_ : shear_full_;
  for (std::size_t i = 0; i < spec_x_.size(); ++i) spec_x_[i] *= table[i];
  fft::c2r_axis(spec_x_.data(), f, nx, np, 0);
}

void PhaseSpacePropagator::kick_p(double* f, double t_mid) {
  const std::size_t nx = grid_.n_x(), np = grid_.n_p();
  const std::size_t hp = np / 2 + 1;
  const double inv_np = 1.0 / static_cast<double>(np);
  const double diff = options_.diffusion;
  fft::r2c_axis(f, spec_p_.data(), nx, np, 1);
  const auto& pot = model_.potential;
  const std::size_t degree = pot.degree();
  for (std::size_t i = 0; i < nx; ++i) {
    cplx* row = spec_p_.data() + i * hp;
    if (options_.kick == KickKind::Classical) {
      const double force = pot.force(xs_[i], t_mid);
      fill_gaussian_factor(row_factor_.data(), hp, 0.0, theta_[1], 0.0, cplx(0.0, -force * dt_),
                           -diff * dt_);
      for (std::size_t q = 0; q + 1 < hp; ++q) row[q] *= row_factor_[q] * inv_np;
    } else {
      // [V(x + hbar th/2) - V(x - hbar th/2)] dt / hbar as an odd polynomial in th.
      const double hbar = model_.hbar;
      double coef[PotentialSpec::kMaxDegree + 1] = {};
      const unsigned top = options_.drop_quantum_corrections ? 1u : static_cast<unsigned>(std::max<std::size_t>(degree, 1));
      double fact = 1.0;
      for (unsigned r = 1; r <= top; ++r) {
        fact *= r;
        if (r % 2 == 1) {
          coef[r] = 2.0 * pot.derivative(xs_[i], t_mid, r) / fact * std::pow(0.5 * hbar, r) * dt_ / hbar;
        }
      }
      for (std::size_t q = 0; q + 1 < hp; ++q) {
        const double th = theta_[q];
        double phase = 0.0;
        for (unsigned r = top + 1; r-- > 1;) phase = phase * th + coef[r];
        phase *= th;
        row[q] *= std::polar(std::exp(-diff * th * th * dt_) * inv_np, phase);
      }
    }
    row[hp - 1] = 0.0;
  }
  fft::c2r_axis(spec_p_.data(), f, nx, np, 1);
}

double PhaseSpacePropagator::reweight(double* f, NoisePath& noise, double k) {
  const std::size_t nx = grid_.n_x(), np = grid_.n_p();
  double w = 0.0, sx = 0.0, fmax = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
      row += f[i * np + j];
      fmax = std::max(fmax, f[i * np + j]);
    }
    w += row;
    sx += row * xs_[i];
  }
  const double mean_x = sx / w;
  const double dw = noise.next_dw();
  const double gain = std::sqrt(8.0 * k) * dw;
  double total = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double factor = 1.0 + gain * (xs_[i] - mean_x);
    double* row = f + i * np;
    for (std::size_t j = 0; j < np; ++j) {
      double v = row[j] * factor;
      if (factor < 0.0 && v < 0.0) {
        if (v < -1e-9 * fmax) {
          throw NegativeDensity("kushner_step: reweighting produced " + std::to_string(v) +
                                " (max " + std::to_string(fmax) + "); reduce dt or k");
        }
        v = 0.0;
      }
      row[j] = v;
      total += v;
    }
  }
  total *= grid_.cell_area();
  if (!(total > 0.0) || !std::isfinite(total)) throw NonfiniteField("kushner_step: mass became " + std::to_string(total));
  for (std::size_t i = 0; i < nx * np; ++i) f[i] /= total;
  return mean_x * dt_ + dw / std::sqrt(8.0 * k);
}

void PhaseSpacePropagator::clip(PhaseSpaceField& field) {
  double before = 0.0, removed = 0.0;
  for (double& v : field.f) {
    before += v;
    if (v < 0.0) {
      removed -= v;
      v = 0.0;
    }
  }
  if (removed == 0.0) return;
  const double after = before + removed;
  if (!(after > 0.0)) throw NonfiniteField("clip: field has no positive mass");
  const double scale = before / after;
  for (double& v : field.f) v *= scale;
  clipped_mass_ += removed * grid_.cell_area();
}

void PhaseSpacePropagator::run(PhaseSpaceField& field, std::size_t steps, NoisePath* noise,
                               double k, std::vector<double>* record) {
  if (steps == 0) return;
  if (!(field.grid == grid_)) throw std::invalid_argument("PhaseSpacePropagator: grid mismatch");
  const double t0 = field.t;
  double* f = field.f.data();
  shear_x(f, true);
  for (std::size_t s = 0; s < steps; ++s) {
    kick_p(f, t0 + (static_cast<double>(s) + 0.5) * dt_);
    if (noise != nullptr) {
      if (options_.clipping == ClippingPolicy::ClipAndRenormalize) clip(field);
      const double dy = reweight(f, *noise, k);
      if (record) record->push_back(dy);
    }
    shear_x(f, s + 1 == steps);
  }
  field.t = t0 + static_cast<double>(steps) * dt_;
  if (options_.clipping == ClippingPolicy::ClipAndRenormalize) clip(field);
  const double m = field.mass();
  if (!std::isfinite(m)) throw NonfiniteField("phase-space step: non-finite field at t=" + std::to_string(field.t));
}

void PhaseSpacePropagator::advance(PhaseSpaceField& field, std::size_t steps) {
  run(field, steps, nullptr, 0.0, nullptr);
}

void PhaseSpacePropagator::advance_conditioned(PhaseSpaceField& field, std::size_t steps,
                                               NoisePath& noise, double k,
                                               std::vector<double>* record) {
  if (!(k > 0.0)) throw std::invalid_argument("kushner_step: k must be > 0");
  run(field, steps, &noise, k, record);
}

}  // namespace qchaos

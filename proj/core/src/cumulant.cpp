#include <array>
#include <cmath>
#include <string>

#include "qchaos/classical.hpp"
#include "qchaos/errors.hpp"

namespace qchaos {

GaussianForce gaussian_force(const PotentialSpec& pot, double mean, double var, double t) {
  // Raw Gaussian moments by m_j = mean m_{j-1} + (j-1) var m_{j-2}.
  constexpr std::size_t kMax = PotentialSpec::kMaxDegree + 1;
  std::array<double, kMax> mom{};
  mom[0] = 1.0;
  mom[1] = mean;
  for (std::size_t j = 2; j < kMax; ++j) {
    mom[j] = mean * mom[j - 1] + static_cast<double>(j - 1) * var * mom[j - 2];
  }
  const auto& c = pot.coeffs();
  double f = 0.0, df = 0.0;
  for (std::size_t j = 1; j < c.size(); ++j) f -= static_cast<double>(j) * c[j] * mom[j - 1];
  for (std::size_t j = 2; j < c.size(); ++j) {
    df -= static_cast<double>(j * (j - 1)) * c[j] * mom[j - 2];
  }
  f -= pot.driven() ? pot.drive_amp() * std::cos(pot.drive_omega() * t) : 0.0;
  return {f, df};
}

namespace {

struct Drift {
  double x, p, cxx, cxp, cpp;
};

Drift drift(const CumulantState& s, const ModelSpec& model, double k, double diff) {
  const auto g = gaussian_force(model.potential, s.x, s.cxx, s.t);
  const double m = model.mass;
  return {s.p / m,
          g.force,
          2.0 * s.cxp / m - 8.0 * k * s.cxx * s.cxx,
          s.cpp / m + s.cxx * g.d_force - 8.0 * k * s.cxx * s.cxp,
          2.0 * s.cxp * g.d_force + 2.0 * diff - 8.0 * k * s.cxp * s.cxp};
}

}  // namespace

CumulantState cumulant_step(const CumulantState& c, const ModelSpec& model, NoisePath& noise,
                            double k, double dt, const CumulantOptions& options) {
  if (!(k >= 0.0)) throw std::invalid_argument("cumulant_step: k must be >= 0");
  const double diff = model.D + (options.quantum_backaction ? model.hbar * model.hbar * k : 0.0);
  const double dw = k > 0.0 ? noise.next_dw() : 0.0;
  const double gain = std::sqrt(8.0 * k);
  const double nx = gain * c.cxx * dw;
  const double np = gain * c.cxp * dw;

  const Drift a0 = drift(c, model, k, diff);
  CumulantState pred{c.x + a0.x * dt + nx,       c.p + a0.p * dt + np,
                     c.cxx + a0.cxx * dt,         c.cxp + a0.cxp * dt,
                     c.cpp + a0.cpp * dt,         c.t + dt};
  const Drift a1 = drift(pred, model, k, diff);
  CumulantState out{c.x + 0.5 * (a0.x + a1.x) * dt + nx,
                    c.p + 0.5 * (a0.p + a1.p) * dt + np,
                    c.cxx + 0.5 * (a0.cxx + a1.cxx) * dt,
                    c.cxp + 0.5 * (a0.cxp + a1.cxp) * dt,
                    c.cpp + 0.5 * (a0.cpp + a1.cpp) * dt,
                    c.t + dt};
  if (!std::isfinite(out.x) || !std::isfinite(out.p) || !std::isfinite(out.cxx) ||
      !std::isfinite(out.cpp)) {
    throw NonfiniteState("cumulant_step: non-finite state at t=" + std::to_string(out.t));
  }
  if (out.cxx > options.max_cxx) {
    throw ClosureBreakdown("cumulant_step: Cxx=" + std::to_string(out.cxx) + " exceeds bound " +
                           std::to_string(options.max_cxx));
  }
  return out;
}

}  // namespace qchaos

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qchaos/classical.hpp"
#include "qchaos/model.hpp"
#include "qchaos/quantum.hpp"

namespace qchaos {

enum class LyapunovSystem { Quantum, Cumulant, Langevin };

/// How the perturbed copy is pulled back after each interval.
enum class Renormalization {
  /// Replace the perturbed state by the fiducial one displaced by delta0 along
  /// the current centroid offset direction.
  Redisplace,
  /// Rescale the full state difference (wavefunction or cumulant vector) back
  /// to its initial size; the centroid offset then follows linearly.
  Tangent,
};

struct LyapunovConfig {
  LyapunovSystem system = LyapunovSystem::Quantum;
  ModelSpec model;
  std::optional<SpatialGrid> grid;  // quantum only

  double x0 = 2.0;
  double p0 = 0.0;
  double sigma_x = 0.0;  // initial width; 0 picks sqrt(hbar/2)
  double sigma_p = 0.0;  // cumulant/langevin only; 0 picks hbar/(2 sigma_x)

  std::uint64_t base_seed = 1;
  std::size_t ensemble_n = 1;
  double delta0 = 1e-6;
  double direction_angle = 0.0;  // initial offset direction in the (x, p/p_scale) plane
  double p_scale = 1.0;          // metric: |(dx, dp / p_scale)|
  double tau_r = 1.0;            // drive periods between renormalizations
  double t_total = 500.0;        // drive periods
  std::size_t steps_per_period = 1000;
  Renormalization renormalization = Renormalization::Redisplace;
  CumulantOptions cumulant;
  PropagatorOptions propagator;
  std::size_t workers = 1;
};

/// Finite-time exponent of one realization, sampled at every renormalization.
struct LyapunovCurve {
  std::vector<double> lambda;   // per drive period
  std::vector<double> delta_x;  // |<x>_2 - <x>_1| before renormalization
};

struct LyapunovEstimate {
  std::vector<double> t;  // drive periods
  std::vector<LyapunovCurve> realizations;
  std::vector<double> mean_curve;
  std::vector<double> std_curve;
  double mean = 0.0;  // of the final finite-time exponents
  double std = 0.0;   // across realizations
  std::size_t n = 0;
  double t_total = 0.0;
  std::size_t stretch_warnings = 0;  // intervals that stretched beyond e^3
};

/// Maximal exponent of the conditioned centroid dynamics with the noise
/// realization shared by the fiducial and perturbed copies.
LyapunovEstimate lyapunov_fixed_noise(const LyapunovConfig& config);

/// Single realization (index selects the noise stream).
LyapunovCurve lyapunov_realization(const LyapunovConfig& config, std::size_t index,
                                   std::size_t* stretch_warnings = nullptr);

/// Variational equations of the Heun-discretized Newton flow. Returns the
/// exponent per drive period (per unit time when undriven).
struct TangentResult {
  double lambda = 0.0;
  std::vector<double> curve;  // finite-time exponent after each period
};
TangentResult classical_tangent_oracle(const ModelSpec& model, double x0, double p0,
                                       double periods, std::size_t steps_per_period);

/// Phase-space displacement by delta0 along `direction` = (ux, up), |u| = 1.
void perturb_initial(SpatialState& state, double hbar, double delta0, double ux, double up);
void perturb_initial(CumulantState& state, double delta0, double ux, double up);
void perturb_initial(LangevinWalker& walker, double delta0, double ux, double up);

/// Least-squares slope of log(lambda) against log(t) over t in [t_lo, t_hi],
/// using samples with lambda > 0.
double loglog_slope(const std::vector<double>& t, const std::vector<double>& lambda, double t_lo,
                    double t_hi);

}  // namespace qchaos

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qchaos/fft.hpp"
#include "qchaos/model.hpp"
#include "qchaos/noise.hpp"

namespace qchaos {

/// Wavefunction samples psi(x_i) on a periodic grid.
struct SpatialState {
  explicit SpatialState(SpatialGrid g) : grid(g), psi(g.size()) {}

  SpatialGrid grid;
  AlignedVector<cplx> psi;
  double t = 0.0;

  double norm() const;  // sum |psi|^2 dx
  void normalize();
  /// Probability in the outer `fraction` of cells (split evenly between both edges).
  double boundary_mass(double fraction = 0.05) const;
  std::vector<double> density() const;  // |psi|^2
};

struct MomentSet {
  double t = 0.0;
  double x = 0.0;
  double p = 0.0;
  double vx = 0.0;
  double vp = 0.0;
  double cxp = 0.0;  // symmetrized
};

MomentSet moments(const SpatialState& state, double hbar);

/// Minimum-uncertainty Gaussian centred at (x0, p0) with position spread sigma_x.
SpatialState coherent_state(const SpatialGrid& grid, double hbar, double x0, double p0,
                            double sigma_x);

/// n-th eigenstate of the harmonic oscillator with mass m and frequency omega.
SpatialState harmonic_eigenstate(const SpatialGrid& grid, double hbar, double mass,
                                 double omega, unsigned level);

/// Translate by dx (spectrally exact) and boost by dp: psi(x) -> psi(x-dx) exp(i dp x / hbar).
void displace(SpatialState& state, double hbar, double dx, double dp);

/// <H> at the state's time.
double energy(const SpatialState& state, const ModelSpec& model);

struct PropagatorOptions {
  std::size_t check_every = 100;  // steps between invariant checks
  double boundary_fraction = 0.05;
  double boundary_tolerance = 1e-6;
  bool check_boundary = true;
};

/// Counters reported by a propagator; useful for logging and tests.
struct PropagatorStats {
  std::size_t steps = 0;
  std::size_t large_step_warnings = 0;  // k * V_x * dt >= 0.1 at a check point
  double max_boundary_mass = 0.0;
};

/// Split-step integrator for isolated and measurement-conditioned evolution.
///
/// One step is K(dt/2) M(dt) K(dt/2) where K is the kinetic propagator and M
/// combines the potential phase with the measurement update. Consecutive
/// half-kicks are fused when several steps are advanced at once, so
/// advance(s, n) costs n+1 transform pairs. The measurement factor is the
/// Gaussian exp(-2k u^2 dt + sqrt(2k) u dW), u = x - <x>, which agrees with
/// 1 - k u^2 dt + sqrt(2k) u dW to Ito order and cannot change sign.
///
/// Holds scratch buffers, so each worker needs its own instance.
class SchrodingerPropagator {
 public:
  SchrodingerPropagator(const ModelSpec& model, const SpatialGrid& grid, double dt,
                        PropagatorOptions options = {});

  double dt() const { return dt_; }
  const ModelSpec& model() const { return model_; }
  const PropagatorStats& stats() const { return stats_; }

  /// Unitary steps (k is ignored).
  void advance_isolated(SpatialState& state, std::size_t steps);

  /// Conditioned steps driven by `noise`. Appends each dy to `record` when given.
  void advance_conditioned(SpatialState& state, std::size_t steps, NoisePath& noise,
                           std::vector<double>* record = nullptr);

  void isolated_step(SpatialState& state) { advance_isolated(state, 1); }
  /// One conditioned step; returns dy = <x> dt + dW / sqrt(8k).
  double sse_step(SpatialState& state, NoisePath& noise);

 private:
  void advance(SpatialState& state, std::size_t steps, NoisePath* noise,
               std::vector<double>* record);
  void kinetic(cplx* psi, const AlignedVector<cplx>& table);
  double position_step(SpatialState& state, double t_mid, NoisePath* noise, bool check);
  void check_state(const SpatialState& state);

  ModelSpec model_;
  SpatialGrid grid_;
  double dt_;
  PropagatorOptions options_;
  PropagatorStats stats_;
  std::vector<double> xs_;
  AlignedVector<cplx> static_phase_;  // exp(-i V0(x) dt / hbar)
  AlignedVector<cplx> half_kick_;     // exp(-i p^2 dt / (4 m hbar)) / n
  AlignedVector<cplx> full_kick_;     // exp(-i p^2 dt / (2 m hbar)) / n
  AlignedVector<cplx> factor_;
};

/// Free-function forms. They build a propagator per call and suit tests and
/// one-off steps; loops should hold a SchrodingerPropagator.
double sse_step(SpatialState& state, const ModelSpec& model, NoisePath& noise, double dt);
void isolated_step(SpatialState& state, const ModelSpec& model, double dt);

/// Fill out[i] = exp(c0 + c1 u_i + c2 u_i^2), u_i = u0 + i du, using a
/// multiplicative recurrence re-anchored every few dozen points.
void fill_gaussian_factor(cplx* out, std::size_t n, double u0, double du, cplx c0, cplx c1,
                          double c2);

/// Dense measurement record with boxcar averaging.
struct MeasurementRecord {
  double dt = 0.0;
  std::vector<double> dy;

  /// Mean of dy/dt over consecutive windows of `window` time units.
  std::vector<double> averaged(double window) const;
};

}  // namespace qchaos

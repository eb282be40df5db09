#pragma once

#include <cstddef>
#include <vector>

#include "qchaos/fft.hpp"
#include "qchaos/model.hpp"
#include "qchaos/noise.hpp"
#include "qchaos/quantum.hpp"

namespace qchaos {

/// Real function on an (x, p) grid: a Wigner function or a classical density.
struct PhaseSpaceField {
  explicit PhaseSpaceField(PhaseSpaceGrid g) : grid(g), f(g.size(), 0.0) {}

  PhaseSpaceGrid grid;
  AlignedVector<double> f;  // f[ix * n_p + ip]
  double t = 0.0;

  double& at(std::size_t ix, std::size_t ip) { return f[ix * grid.n_p() + ip]; }
  double at(std::size_t ix, std::size_t ip) const { return f[ix * grid.n_p() + ip]; }

  double mass() const;
  double min() const;
  double max() const;
  /// Integral of the negative part, as a positive number.
  double negative_volume() const;
  void normalize();

  std::vector<double> x_marginal() const;
  std::vector<double> p_marginal() const;
  /// f(x, p) along x at the momentum sample nearest to p.
  std::vector<double> p_slice(double p) const;

  MomentSet moments() const;
};

using ClassicalField = PhaseSpaceField;

/// Sampled bivariate Gaussian, normalized on the grid.
PhaseSpaceField gaussian_field(const PhaseSpaceGrid& grid, double x0, double p0, double vx,
                               double vp, double cxp = 0.0);

enum class KickKind {
  Classical,  // f(p) -> f(p - F dt)
  Moyal,      // exact quantum Liouville kick for the polynomial potential
};

enum class ClippingPolicy {
  ClipAndRenormalize,  // zero negatives left by spectral advection, restore mass
  None,
};

struct PhaseSpaceOptions {
  KickKind kick = KickKind::Classical;
  double diffusion = 0.0;  // D in D d^2f/dp^2
  ClippingPolicy clipping = ClippingPolicy::ClipAndRenormalize;
  /// Keep only the first-order (classical) term of the Moyal kick.
  bool drop_quantum_corrections = false;
};

/// Strang split-step solver for phase-space transport.
///
/// Free streaming is a spectral shear along x, the force (or Moyal) term a
/// spectral multiplier along p, which also carries the exact diffusion factor
/// exp(-D kappa^2 dt). Consecutive x half-shears are fused.
class PhaseSpacePropagator {
 public:
  PhaseSpacePropagator(const ModelSpec& model, const PhaseSpaceGrid& grid, double dt,
                       PhaseSpaceOptions options = {});

  void advance(PhaseSpaceField& field, std::size_t steps);

  /// Kushner-Stratonovich filtering under continuous position observation at
  /// strength k. The reweighting by 1 + sqrt(8k)(x - <x>) dW is applied at mid
  /// step, where it commutes with the momentum kick. Appends dy per step.
  void advance_conditioned(PhaseSpaceField& field, std::size_t steps, NoisePath& noise,
                           double k, std::vector<double>* record = nullptr);

  /// Total mass removed by clipping so far.
  double clipped_mass() const { return clipped_mass_; }
  double dt() const { return dt_; }

 private:
  void run(PhaseSpaceField& field, std::size_t steps, NoisePath* noise, double k,
           std::vector<double>* record);
  void shear_x(double* f, bool half);
  void kick_p(double* f, double t_mid);
  double reweight(double* f, NoisePath& noise, double k);
  void clip(PhaseSpaceField& field);

  ModelSpec model_;
  PhaseSpaceGrid grid_;
  double dt_;
  PhaseSpaceOptions options_;
  double clipped_mass_ = 0.0;
  AlignedVector<cplx> shear_half_;  // (n_x/2+1) x n_p
  AlignedVector<cplx> shear_full_;
  AlignedVector<cplx> spec_x_;
  AlignedVector<cplx> spec_p_;
  AlignedVector<cplx> row_factor_;
  std::vector<double> theta_;  // p-axis wavenumbers
  std::vector<double> xs_;
};

}  // namespace qchaos

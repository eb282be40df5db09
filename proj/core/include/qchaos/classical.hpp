#pragma once

#include <cstddef>
#include <vector>

#include "qchaos/model.hpp"
#include "qchaos/noise.hpp"
#include "qchaos/phase_space.hpp"

namespace qchaos {

// One-step conveniences over PhaseSpacePropagator. Each returns a new field;
// for many steps hold a propagator instead.

/// Noiseless transport (D ignored).
PhaseSpaceField liouville_step(const PhaseSpaceField& f, const ModelSpec& model, double dt);

/// Transport plus momentum diffusion with coefficient model.D.
PhaseSpaceField fokker_planck_step(const PhaseSpaceField& f, const ModelSpec& model, double dt);

/// Conditioned classical density under position observation at strength model.k.
struct KushnerResult {
  PhaseSpaceField field;
  double dy;
};
KushnerResult kushner_step(const PhaseSpaceField& f, const ModelSpec& model, NoisePath& noise,
                           double dt);

/// Wigner-space master equation: Moyal kick with diffusion D + hbar^2 k. With
/// quantum corrections dropped it reduces to fokker_planck_step (for k = 0).
PhaseSpaceField wigner_lindblad_step(const PhaseSpaceField& f, const ModelSpec& model, double dt,
                                     bool quantum_corrections = true);

/// Point particle driven by momentum noise: dq = p/m dt, dp = F dt + sqrt(2D) dW.
struct LangevinWalker {
  double q = 0.0;
  double p = 0.0;
  double t = 0.0;
  NoisePath noise;
};

/// Stochastic Heun: trapezoidal drift, one noise increment shared by the
/// predictor and the corrector (exact for additive noise).
void langevin_step(LangevinWalker& w, const ModelSpec& model, double dt);

/// Newtonian flow with the same Heun drift as langevin_step (no noise).
struct PhasePoint {
  double q;
  double p;
};
PhasePoint heun_step(PhasePoint s, const PotentialSpec& pot, double mass, double t, double dt);

/// Gaussian-closure centroid and covariance state.
struct CumulantState {
  double x = 0.0;
  double p = 0.0;
  double cxx = 0.0;
  double cxp = 0.0;
  double cpp = 0.0;
  double t = 0.0;
};

struct CumulantOptions {
  bool quantum_backaction = false;  // add hbar^2 k to the momentum diffusion
  double max_cxx = 1.0;             // ClosureBreakdown beyond this variance
};

/// Gaussian expectations <F> and <dF/dx> under Normal(mean, var), exact for
/// polynomial potentials.
struct GaussianForce {
  double force;
  double d_force;
};
GaussianForce gaussian_force(const PotentialSpec& pot, double mean, double var, double t);

/// One Ito step of the conditioned centroid and covariance equations:
///   dx = p/m dt + sqrt(8k) Cxx dW,    dp = <F> dt + sqrt(8k) Cxp dW
///   dCxx = (2 Cxp/m - 8k Cxx^2) dt
///   dCxp = (Cpp/m + Cxx <F'> - 8k Cxx Cxp) dt
///   dCpp = (2 Cxp <F'> + 2 D_eff - 8k Cxp^2) dt
/// Drift by Heun; the noise enters at the left point.
CumulantState cumulant_step(const CumulantState& c, const ModelSpec& model, NoisePath& noise,
                            double k, double dt, const CumulantOptions& options = {});

}  // namespace qchaos

#pragma once

#include <cstddef>
#include <vector>

#include "qchaos/fft.hpp"
#include "qchaos/model.hpp"
#include "qchaos/phase_space.hpp"
#include "qchaos/quantum.hpp"

namespace qchaos {

/// Density matrix rho(x_i, x_j), row-major: rho[i * n + j].
struct DensityState {
  explicit DensityState(SpatialGrid g) : grid(g), rho(g.size() * g.size()) {}

  SpatialGrid grid;
  AlignedVector<cplx> rho;
  double t = 0.0;

  static DensityState pure(const SpatialState& state);

  cplx& at(std::size_t i, std::size_t j) { return rho[i * grid.size() + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return rho[i * grid.size() + j]; }

  /// rho += weight |psi><psi|
  void add_outer(const SpatialState& state, double weight);

  double trace() const;
  double purity() const;              // tr rho^2
  double hermiticity_error() const;   // max |rho_ij - conj(rho_ji)|
  std::vector<double> diagonal() const;  // position density rho(x_i, x_i)
  double min_diagonal() const;
};

MomentSet moments(const DensityState& rho, double hbar);

/// Unconditioned master equation with momentum diffusion D + hbar^2 k.
///
/// Unitary part by split-step on both indices; diffusion by the exact
/// multiplier exp(-D_eff (x_i - x_j)^2 dt / hbar^2), which is local in this
/// representation. Half-kicks are fused across steps.
class LindbladPropagator {
 public:
  LindbladPropagator(const ModelSpec& model, const SpatialGrid& grid, double dt,
                     PropagatorOptions options = {});

  double diffusion() const { return diffusion_; }
  void advance(DensityState& rho, std::size_t steps);
  void step(DensityState& rho) { advance(rho, 1); }

 private:
  void kinetic(cplx* rho, const AlignedVector<cplx>& table);
  void position_step(cplx* rho, double t_mid);
  void check(const DensityState& rho) const;

  ModelSpec model_;
  SpatialGrid grid_;
  double dt_;
  double diffusion_;
  PropagatorOptions options_;
  std::size_t steps_ = 0;
  std::vector<double> xs_;
  AlignedVector<cplx> static_phase_;
  AlignedVector<cplx> half_kick_;
  AlignedVector<cplx> full_kick_;
  std::vector<double> decoherence_;  // indexed by |i - j|
  AlignedVector<cplx> phase_;
};

void lindblad_step(DensityState& rho, const ModelSpec& model, double dt);

/// Wigner function on the x grid of rho with 2n momentum samples spanning
/// [-pi hbar/dx, pi hbar/dx). rho is spectrally upsampled by two first so the
/// half-integer offsets x +- y/2 land on grid points; the p-marginal equals
/// the diagonal of rho.
PhaseSpaceField wigner_transform(const DensityState& rho, double hbar);
PhaseSpaceField wigner_transform(const SpatialState& state, double hbar);

/// The momentum grid wigner_transform produces for a given position grid.
PhaseSpaceGrid wigner_grid(const SpatialGrid& grid, double hbar);

}  // namespace qchaos

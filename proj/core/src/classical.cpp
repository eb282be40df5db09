#include "qchaos/classical.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qchaos/errors.hpp"

namespace qchaos {

PhaseSpaceField liouville_step(const PhaseSpaceField& f, const ModelSpec& model, double dt) {
  PhaseSpaceField out = f;
  PhaseSpacePropagator prop(model, f.grid, dt, {KickKind::Classical, 0.0});
  prop.advance(out, 1);
  return out;
}

PhaseSpaceField fokker_planck_step(const PhaseSpaceField& f, const ModelSpec& model, double dt) {
  PhaseSpaceField out = f;
  PhaseSpacePropagator prop(model, f.grid, dt, {KickKind::Classical, model.D});
  prop.advance(out, 1);
  return out;
}

KushnerResult kushner_step(const PhaseSpaceField& f, const ModelSpec& model, NoisePath& noise,
                           double dt) {
  KushnerResult out{f, 0.0};
  PhaseSpacePropagator prop(model, f.grid, dt, {KickKind::Classical, model.D});
  std::vector<double> rec;
  prop.advance_conditioned(out.field, 1, noise, model.k, &rec);
  out.dy = rec.front();
  return out;
}

PhaseSpaceField wigner_lindblad_step(const PhaseSpaceField& f, const ModelSpec& model, double dt,
                                     bool quantum_corrections) {
  PhaseSpaceField out = f;
  PhaseSpaceOptions opt;
  opt.kick = KickKind::Moyal;
  opt.diffusion = model.D + model.backaction_diffusion();
  opt.clipping = ClippingPolicy::None;
  opt.drop_quantum_corrections = !quantum_corrections;
  PhaseSpacePropagator prop(model, f.grid, dt, opt);
  prop.advance(out, 1);
  return out;
}

PhasePoint heun_step(PhasePoint s, const PotentialSpec& pot, double mass, double t, double dt) {
  const double f0 = pot.force(s.q, t);
  const double q1 = s.q + s.p / mass * dt;
  const double p1 = s.p + f0 * dt;
  const double f1 = pot.force(q1, t + dt);
  return {s.q + 0.5 * (s.p + p1) / mass * dt, s.p + 0.5 * (f0 + f1) * dt};
}

void langevin_step(LangevinWalker& w, const ModelSpec& model, double dt) {
  const double kick = model.D > 0.0 ? std::sqrt(2.0 * model.D) * w.noise.next_dw() : 0.0;
  const auto& pot = model.potential;
  const double f0 = pot.force(w.q, w.t);
  const double q1 = w.q + w.p / model.mass * dt;
  const double p1 = w.p + f0 * dt + kick;
  const double f1 = pot.force(q1, w.t + dt);
  w.q += 0.5 * (w.p + p1) / model.mass * dt;
  w.p += 0.5 * (f0 + f1) * dt + kick;
  w.t += dt;
  if (!std::isfinite(w.q) || !std::isfinite(w.p)) {
    throw NonfiniteState("langevin_step: non-finite walker at t=" + std::to_string(w.t));
  }
}

}  // namespace qchaos

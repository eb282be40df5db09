#include "qchaos/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qchaos {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

SpatialGrid::SpatialGrid(double x_min, double x_max, std::size_t n)
    : x_min_(x_min), x_max_(x_max), n_(n) {
  if (!is_power_of_two(n) || n < 16) {
    throw std::invalid_argument("SpatialGrid: n must be a power of two >= 16, got " +
                                std::to_string(n));
  }
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw std::invalid_argument("SpatialGrid: require finite x_min < x_max");
  }
}

double SpatialGrid::dp(double hbar) const {
  return 2.0 * std::numbers::pi * hbar / (static_cast<double>(n_) * dx());
}

double SpatialGrid::p_max(double hbar) const { return std::numbers::pi * hbar / dx(); }

double SpatialGrid::p(std::size_t j, double hbar) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  auto signed_j = static_cast<std::ptrdiff_t>(j);
  if (signed_j >= n / 2) signed_j -= n;
  return static_cast<double>(signed_j) * dp(hbar);
}

std::vector<double> SpatialGrid::positions() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

std::vector<double> SpatialGrid::momenta(double hbar) const {
  std::vector<double> ps(n_);
  for (std::size_t j = 0; j < n_; ++j) ps[j] = p(j, hbar);
  return ps;
}

PhaseSpaceGrid::PhaseSpaceGrid(SpatialGrid x, double p_min, double p_max, std::size_t n_p)
    : x_(x), p_min_(p_min), p_max_(p_max), n_p_(n_p) {
  if (!is_power_of_two(n_p) || n_p < 16) {
    throw std::invalid_argument("PhaseSpaceGrid: n_p must be a power of two >= 16");
  }
  if (!(p_max > p_min)) throw std::invalid_argument("PhaseSpaceGrid: require p_min < p_max");
}

std::size_t PhaseSpaceGrid::nearest_p_index(double p) const {
  const double j = std::round((p - p_min_) / dp());
  if (j <= 0.0) return 0;
  if (j >= static_cast<double>(n_p_ - 1)) return n_p_ - 1;
  return static_cast<std::size_t>(j);
}

PotentialSpec::PotentialSpec(std::vector<double> coeffs, double drive_amp, double drive_omega)
    : coeffs_(std::move(coeffs)), drive_amp_(drive_amp), drive_omega_(drive_omega) {
  if (coeffs_.size() > kMaxDegree + 1) {
    throw std::invalid_argument("PotentialSpec: polynomial degree must be <= 6");
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw std::invalid_argument("PotentialSpec: non-finite coefficient");
  }
}

std::size_t PotentialSpec::degree() const {
  std::size_t d = coeffs_.size();
  while (d > 0 && coeffs_[d - 1] == 0.0) --d;
  return d == 0 ? 0 : d - 1;
}

double polyval(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double PotentialSpec::static_potential(double x) const { return polyval(coeffs_, x); }

double PotentialSpec::drive_term(double x, double t) const {
  if (drive_amp_ == 0.0) return 0.0;
  return drive_amp_ * x * std::cos(drive_omega_ * t);
}

double PotentialSpec::derivative(double x, double t, unsigned order) const {
  if (order == 0) return value(x, t);
  // d^order/dx^order of sum c_j x^j = sum_{j>=order} c_j j!/(j-order)! x^(j-order)
  double acc = 0.0;
  for (std::size_t j = coeffs_.size(); j-- > order;) {
    double falling = 1.0;
    for (std::size_t r = 0; r < order; ++r) falling *= static_cast<double>(j - r);
    acc = acc * x + coeffs_[j] * falling;
  }
  if (order == 1) acc += drive_amp_ == 0.0 ? 0.0 : drive_amp_ * std::cos(drive_omega_ * t);
  return acc;
}

ForceDerivatives force_and_derivatives(const PotentialSpec& spec, double x, double t) {
  return {-spec.derivative(x, t, 1), -spec.derivative(x, t, 2), -spec.derivative(x, t, 3)};
}

void ModelSpec::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("ModelSpec: mass must be > 0");
  if (!(hbar >= 0.0)) throw std::invalid_argument("ModelSpec: hbar must be >= 0");
  if (!(k >= 0.0)) throw std::invalid_argument("ModelSpec: k must be >= 0");
  if (!(D >= 0.0)) throw std::invalid_argument("ModelSpec: D must be >= 0");
}

double ModelSpec::drive_period() const {
  const double w = potential.drive_omega();
  return w > 0.0 ? 2.0 * std::numbers::pi / w : 1.0;
}

ModelSpec duffing_spec() {
  ModelSpec m;
  m.potential = PotentialSpec({0.0, 0.0, -10.0, 0.0, 0.5}, 10.0, 6.07);
  m.mass = 1.0;
  return m;
}

ModelSpec harmonic_spec(double mass, double omega, bool inverted) {
  ModelSpec m;
  const double c2 = 0.5 * mass * omega * omega * (inverted ? -1.0 : 1.0);
  m.potential = PotentialSpec({0.0, 0.0, c2});
  m.mass = mass;
  return m;
}

}  // namespace qchaos

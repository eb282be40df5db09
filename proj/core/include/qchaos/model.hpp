#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace qchaos {

/// Uniform periodic position grid with n samples on [x_min, x_max).
///
/// The conjugate momentum grid follows from the discrete Fourier dual:
/// dp = 2*pi*hbar / (n*dx), spanning [-pi*hbar/dx, pi*hbar/dx).
class SpatialGrid {
 public:
  SpatialGrid(double x_min, double x_max, std::size_t n);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double dx() const { return (x_max_ - x_min_) / static_cast<double>(n_); }
  double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx(); }
  double length() const { return x_max_ - x_min_; }

  double dp(double hbar) const;
  double p_max(double hbar) const;
  /// Momentum of FFT bin j (standard FFT ordering, negative half last).
  double p(std::size_t j, double hbar) const;

  std::vector<double> positions() const;
  std::vector<double> momenta(double hbar) const;

  bool operator==(const SpatialGrid&) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
};

/// (x, p) grid used for Wigner functions and classical distributions.
/// Values are stored x-major: index = ix * n_p + ip.
class PhaseSpaceGrid {
 public:
  PhaseSpaceGrid(SpatialGrid x, double p_min, double p_max, std::size_t n_p);

  const SpatialGrid& x_grid() const { return x_; }
  std::size_t n_x() const { return x_.size(); }
  std::size_t n_p() const { return n_p_; }
  double p_min() const { return p_min_; }
  double p_max() const { return p_max_; }
  double dx() const { return x_.dx(); }
  double dp() const { return (p_max_ - p_min_) / static_cast<double>(n_p_); }
  double x(std::size_t i) const { return x_.x(i); }
  double p(std::size_t j) const { return p_min_ + static_cast<double>(j) * dp(); }
  double cell_area() const { return dx() * dp(); }
  std::size_t size() const { return n_x() * n_p_; }
  /// Index of the momentum sample closest to p.
  std::size_t nearest_p_index(double p) const;

  bool operator==(const PhaseSpaceGrid&) const = default;

 private:
  SpatialGrid x_;
  double p_min_;
  double p_max_;
  std::size_t n_p_;
};

struct ForceDerivatives {
  double force;        // F = -dV/dx
  double d_force;      // dF/dx
  double d2_force;     // d^2F/dx^2
};

/// V(x,t) = sum_j c_j x^j + drive_amp * x * cos(drive_omega * t), degree <= 6.
class PotentialSpec {
 public:
  static constexpr std::size_t kMaxDegree = 6;

  PotentialSpec() = default;
  PotentialSpec(std::vector<double> coeffs, double drive_amp = 0.0, double drive_omega = 0.0);

  const std::vector<double>& coeffs() const { return coeffs_; }
  double drive_amp() const { return drive_amp_; }
  double drive_omega() const { return drive_omega_; }
  bool driven() const { return drive_amp_ != 0.0; }
  std::size_t degree() const;

  /// Time-independent part V0(x).
  double static_potential(double x) const;
  double drive_term(double x, double t) const;
  double value(double x, double t) const { return static_potential(x) + drive_term(x, t); }

  /// order-th derivative of V(x,t) with respect to x (drive included).
  double derivative(double x, double t, unsigned order) const;

  double force(double x, double t) const { return -derivative(x, t, 1); }

  bool operator==(const PotentialSpec&) const = default;

 private:
  std::vector<double> coeffs_;  // ascending powers
  double drive_amp_ = 0.0;
  double drive_omega_ = 0.0;
};

ForceDerivatives force_and_derivatives(const PotentialSpec& spec, double x, double t);

/// Full physical configuration of the measured oscillator.
struct ModelSpec {
  PotentialSpec potential;
  double mass = 1.0;
  double hbar = 0.0;
  double k = 0.0;  // measurement strength
  double D = 0.0;  // environmental momentum diffusion

  /// Throws std::invalid_argument unless m > 0 and hbar, k, D >= 0.
  void validate() const;

  /// hbar^2 k: the momentum diffusion produced by measurement backaction.
  double backaction_diffusion() const { return hbar * hbar * k; }

  /// Drive period 2*pi/omega, or 1 for an undriven potential.
  double drive_period() const;

  bool operator==(const ModelSpec&) const = default;
};

/// Driven Duffing oscillator: V0 = 0.5 x^4 - 10 x^2, Lambda = 10, omega = 6.07, m = 1.
/// hbar, k and D are left at zero for the caller to set.
ModelSpec duffing_spec();

/// V = 0.5 m w^2 x^2 (or its inverted counterpart when inverted is true).
ModelSpec harmonic_spec(double mass = 1.0, double omega = 1.0, bool inverted = false);

/// Evaluate sum_j c_j x^j by Horner's rule.
double polyval(const std::vector<double>& coeffs, double x);

bool is_power_of_two(std::size_t n);

}  // namespace qchaos

#include "qchaos/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qchaos {

double l1_distance(std::span<const double> a, std::span<const double> b, double h) {
  if (a.size() != b.size()) throw std::invalid_argument("l1_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * h;
}

double relative_l1(std::span<const double> a, std::span<const double> reference) {
  double norm = 0.0;
  for (double v : reference) norm += std::abs(v);
  if (norm == 0.0) throw std::invalid_argument("relative_l1: reference is zero");
  return l1_distance(a, reference, 1.0) / norm;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

namespace {

// Q_KS(lambda) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2)
double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

DensityGrid kde2d(std::span<const double> xs, std::span<const double> ys, double bandwidth_x,
                  double bandwidth_y, double x_lo, double x_hi, double y_lo, double y_hi,
                  std::size_t nx, std::size_t ny) {
  if (xs.size() != ys.size() || xs.empty()) throw std::invalid_argument("kde2d: need matching non-empty samples");
  if (!(bandwidth_x > 0.0) || !(bandwidth_y > 0.0)) throw std::invalid_argument("kde2d: bandwidth must be > 0");
  DensityGrid g{x_lo, x_hi, y_lo, y_hi, nx, ny, std::vector<double>(nx * ny, 0.0)};
  const double dx = (x_hi - x_lo) / static_cast<double>(nx - 1);
  const double dy = (y_hi - y_lo) / static_cast<double>(ny - 1);
  std::vector<double> wx(nx), wy(ny);
  const double norm = 1.0 / (2.0 * std::numbers::pi * bandwidth_x * bandwidth_y * static_cast<double>(xs.size()));
  for (std::size_t s = 0; s < xs.size(); ++s) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double u = (x_lo + static_cast<double>(i) * dx - xs[s]) / bandwidth_x;
      wx[i] = std::exp(-0.5 * u * u);
    }
    for (std::size_t j = 0; j < ny; ++j) {
      const double u = (y_lo + static_cast<double>(j) * dy - ys[s]) / bandwidth_y;
      wy[j] = std::exp(-0.5 * u * u);
    }
    for (std::size_t i = 0; i < nx; ++i) {
      if (wx[i] < 1e-12) continue;
      for (std::size_t j = 0; j < ny; ++j) g.values[i * ny + j] += wx[i] * wy[j] * norm;
    }
  }
  return g;
}

double scott_bandwidth(std::span<const double> v) {
  return stddev(v) * std::pow(static_cast<double>(v.size()), -1.0 / 6.0);
}

std::vector<double> mass_above_levels(const DensityGrid& g, std::span<const double> levels) {
  const double peak = *std::max_element(g.values.begin(), g.values.end());
  const double cell = (g.x_hi - g.x_lo) / static_cast<double>(g.nx - 1) *
                      (g.y_hi - g.y_lo) / static_cast<double>(g.ny - 1);
  std::vector<double> out;
  for (double lv : levels) {
    double s = 0.0;
    for (double v : g.values) s += v >= lv * peak ? v : 0.0;
    out.push_back(s * cell);
  }
  return out;
}

}  // namespace qchaos

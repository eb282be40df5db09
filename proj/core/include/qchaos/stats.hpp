#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qchaos {

/// sum |a_i - b_i| * h
double l1_distance(std::span<const double> a, std::span<const double> b, double h);

/// L1 distance divided by the L1 norm of the reference b.
double relative_l1(std::span<const double> a, std::span<const double> reference);

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two samples.
double stddev(std::span<const double> v);

struct KsResult {
  double statistic;
  double p_value;  // asymptotic Kolmogorov distribution
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Gaussian kernel density estimate of 2-D points on a regular grid.
/// Returns values row-major [ix * ny + iy], normalized to unit integral.
struct DensityGrid {
  double x_lo, x_hi, y_lo, y_hi;
  std::size_t nx, ny;
  std::vector<double> values;
};
DensityGrid kde2d(std::span<const double> xs, std::span<const double> ys, double bandwidth_x,
                  double bandwidth_y, double x_lo, double x_hi, double y_lo, double y_hi,
                  std::size_t nx, std::size_t ny);

/// Scott's rule bandwidth n^(-1/6) * std for two-dimensional data.
double scott_bandwidth(std::span<const double> v);

/// Cumulative mass of the values at or above each contour level, where levels
/// are given as fractions of the maximum.
std::vector<double> mass_above_levels(const DensityGrid& g, std::span<const double> levels);

}  // namespace qchaos

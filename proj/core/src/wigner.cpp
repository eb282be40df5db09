#include <cmath>
#include <numbers>

#include "qchaos/density.hpp"

namespace qchaos {

namespace {

// Map a signed frequency of an n-point spectrum into a 2n-point spectrum.
std::size_t padded_index(std::ptrdiff_t k, std::size_t n2) {
  return k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k + static_cast<std::ptrdiff_t>(n2));
}

// Band-limited interpolation of rho onto the half-spacing grid.
AlignedVector<cplx> upsample2(const DensityState& rho) {
  const std::size_t n = rho.grid.size();
  const std::size_t n2 = 2 * n;
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  AlignedVector<cplx> spec(rho.rho.begin(), rho.rho.end());
  fft::forward_2d(spec.data(), n, n);

  // The Nyquist bin of the coarse grid is shared equally between +n/2 and
  // -n/2 on the fine grid so that real symmetric content stays symmetric.
  auto targets = [&](std::size_t a, std::size_t out[2], double w[2]) {
    auto k = static_cast<std::ptrdiff_t>(a);
    if (k >= half) k -= static_cast<std::ptrdiff_t>(n);
    if (k == -half) {
      out[0] = padded_index(-half, n2);
      out[1] = padded_index(half, n2);
      w[0] = w[1] = 0.5;
      return 2;
    }
    out[0] = padded_index(k, n2);
    w[0] = 1.0;
    return 1;
  };

  AlignedVector<cplx> fine(n2 * n2, cplx(0.0, 0.0));
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t ra[2], rb[2];
    double wa[2], wb[2];
    const int na = targets(a, ra, wa);
    for (std::size_t b = 0; b < n; ++b) {
      const int nb = targets(b, rb, wb);
      const cplx v = spec[a * n + b] * scale;
      for (int u = 0; u < na; ++u) {
        for (int q = 0; q < nb; ++q) fine[ra[u] * n2 + rb[q]] += v * (wa[u] * wb[q]);
      }
    }
  }
  fft::backward_2d(fine.data(), n2, n2);
  return fine;
}

}  // namespace

PhaseSpaceGrid wigner_grid(const SpatialGrid& grid, double hbar) {
  const double pm = grid.p_max(hbar);
  return PhaseSpaceGrid(grid, -pm, pm, 2 * grid.size());
}

PhaseSpaceField wigner_transform(const DensityState& rho, double hbar) {
  const std::size_t n = rho.grid.size();
  const std::size_t n2 = 2 * n;
  const auto fine = upsample2(rho);

  // W(x_j, p_m) = (h / (pi hbar)) sum_s rho(x_j + s h, x_j - s h) exp(-2 pi i m s / 2n), h = dx/2.
  // Separations 2 s h are kept below half the period: beyond it the pair wraps
  // onto points already covered, and at s = n both land on the diagonal at
  // x_j + L/2, which would plant a ghost copy of the state there.
  AlignedVector<cplx> lines(n * n2, cplx(0.0, 0.0));
  const std::size_t s_edge = n / 2;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t c = 2 * j;
    for (std::size_t s = 0; s < n2; ++s) {
      const std::size_t dist = s <= n ? s : n2 - s;
      if (dist > s_edge) continue;
      const double w = dist == s_edge ? 0.5 : 1.0;
      lines[j * n2 + s] = w * fine[((c + s) % n2) * n2 + (c + n2 - s) % n2];
    }
  }
  fft::forward(lines.data(), n2, n);

  PhaseSpaceField out(wigner_grid(rho.grid, hbar));
  out.t = rho.t;
  const double pref = 0.5 * rho.grid.dx() / (std::numbers::pi * hbar);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t m = 0; m < n2; ++m) {
      // FFT bin m holds signed frequency m (m < n) or m - 2n; grid index is signed + n.
      const std::size_t ip = m < n ? m + n : m - n;
      out.at(j, ip) = pref * lines[j * n2 + m].real();
    }
  }
  return out;
}

PhaseSpaceField wigner_transform(const SpatialState& state, double hbar) {
  return wigner_transform(DensityState::pure(state), hbar);
}

}  // namespace qchaos

#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pathreg/core/grid.hpp"

namespace pathreg::core {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 Cooley-Tukey. sign = -1 forward, +1 inverse
/// (unnormalized).
inline void fft_pow2(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace detail

/// Unnormalized DFT of arbitrary size: X_j = sum_k x_k exp(sign * 2*pi*i*j*k/n).
/// Radix-2 when possible, Bluestein's chirp-z otherwise.
inline void dft(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (detail::is_pow2(n)) {
    detail::fft_pow2(a, sign);
    return;
  }
  // Bluestein: x_k * chirp_k convolved with conj chirp, via a pow2 FFT.
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<cplx> u(m, cplx(0, 0)), v(m, cplx(0, 0));
  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small
    const std::size_t k2 = (static_cast<std::size_t>(k) * k) % (2 * n);
    const double ang = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = cplx(std::cos(ang), std::sin(ang));
  }
  for (std::size_t k = 0; k < n; ++k) u[k] = a[k] * chirp[k];
  v[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) v[k] = v[m - k] = std::conj(chirp[k]);
  detail::fft_pow2(u, -1);
  detail::fft_pow2(v, -1);
  for (std::size_t k = 0; k < m; ++k) u[k] *= v[k];
  detail::fft_pow2(u, +1);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = u[k] * inv_m * chirp[k];
}

/// Centered DFT on an odd lattice: given samples g_k at indices k-c
/// (c = (m-1)/2), returns G_j = sum_k g_k exp(sign * i * (2*pi/m) (k-c)(j-c)).
inline void centered_dft(std::vector<cplx>& a, int sign) {
  const std::size_t m = a.size();
  const std::size_t c = (m - 1) / 2;
  const double base = sign * 2.0 * std::numbers::pi / static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double ang = -base * static_cast<double>(c) * static_cast<double>(k);
    a[k] *= cplx(std::cos(ang), std::sin(ang));
  }
  dft(a, sign);
  for (std::size_t j = 0; j < m; ++j) {
    const double ang = -base * static_cast<double>(c) * (static_cast<double>(j) - static_cast<double>(c));
    a[j] *= cplx(std::cos(ang), std::sin(ang));
  }
}

/// Apply centered_dft along every axis of a row-major d-dimensional array
/// with equal axis length m.
inline void centered_dft_nd(std::vector<cplx>& a, int dim, std::size_t m, int sign) {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= m;
  if (a.size() != total) throw std::invalid_argument("centered_dft_nd: size mismatch");
  std::vector<cplx> line(m);
  std::size_t stride = 1;
  for (int axis = dim - 1; axis >= 0; --axis) {
    const std::size_t nlines = total / m;
    for (std::size_t l = 0; l < nlines; ++l) {
      // Base offset of the l-th line along this axis.
      const std::size_t block = l / stride;
      const std::size_t rem = l % stride;
      const std::size_t base = block * stride * m + rem;
      for (std::size_t k = 0; k < m; ++k) line[k] = a[base + k * stride];
      centered_dft(line, sign);
      for (std::size_t k = 0; k < m; ++k) a[base + k * stride] = line[k];
    }
    stride *= m;
  }
}

/// Transform gridded spectral values on a FrequencyGrid into spatial samples
/// on its dual box: f(x_j) = (2*pi)^{-d} * dz^d * sum_z F(z) e^{i<z,x_j>}.
inline std::vector<cplx> spectral_to_spatial(const FrequencyGrid& grid, std::vector<cplx> values) {
  centered_dft_nd(values, grid.dim, grid.points_per_axis, +1);
  double scale = 1.0;
  for (int a = 0; a < grid.dim; ++a) scale *= grid.dz() / (2.0 * std::numbers::pi);
  for (auto& v : values) v *= scale;
  return values;
}

/// Inverse of spectral_to_spatial: F(z_k) = dx^d * sum_x f(x) e^{-i<z_k,x>}.
inline std::vector<cplx> spatial_to_spectral(const FrequencyGrid& grid, std::vector<cplx> values) {
  centered_dft_nd(values, grid.dim, grid.points_per_axis, -1);
  const BoxGrid box = BoxGrid::dual_of(grid);
  double scale = 1.0;
  for (int a = 0; a < grid.dim; ++a) scale *= box.dx;
  for (auto& v : values) v *= scale;
  return values;
}

}  // namespace pathreg::core

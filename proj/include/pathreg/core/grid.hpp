#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathreg::core {

/// Uniform time grid 0 = t_0 < t_1 < ... < t_n = T.
struct TimeGrid {
  double horizon = 1.0;
  std::size_t steps = 1;  // n; the grid has n+1 points

  TimeGrid() = default;
  TimeGrid(double T, std::size_t n) : horizon(T), steps(n) {
    if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
    if (n < 1) throw std::invalid_argument("TimeGrid: need at least one step");
  }

  double dt() const { return horizon / static_cast<double>(steps); }
  std::size_t points() const { return steps + 1; }
  double time(std::size_t i) const { return horizon * static_cast<double>(i) / static_cast<double>(steps); }

  /// Index of a grid time; throws if t is not a grid point (within a small snap tolerance).
  std::size_t index_of(double t) const {
    const double x = t / dt();
    const double r = std::round(x);
    if (r < 0.0 || r > static_cast<double>(steps) || std::abs(x - r) > 1e-9 * (1.0 + std::abs(x)))
      throw std::invalid_argument("TimeGrid: time " + std::to_string(t) + " is not on the grid");
    return static_cast<std::size_t>(r);
  }

  bool operator==(const TimeGrid& o) const { return horizon == o.horizon && steps == o.steps; }
};

/// Uniform symmetric frequency lattice {-z_max, ..., z_max}^d with an odd
/// number of points per axis, so that z = 0 is a lattice point.
struct FrequencyGrid {
  int dim = 1;
  double z_max = 128.0;
  std::size_t points_per_axis = 513;  // odd

  FrequencyGrid() = default;
  FrequencyGrid(int d, double zmax, std::size_t m) : dim(d), z_max(zmax), points_per_axis(m) {
    if (d < 1 || d > 8) throw std::invalid_argument("FrequencyGrid: dimension must lie in [1, 8]");
    if (!(zmax > 0.0)) throw std::invalid_argument("FrequencyGrid: z_max must be positive");
    if (m < 3 || m % 2 == 0) throw std::invalid_argument("FrequencyGrid: points_per_axis must be odd and >= 3");
  }

  double dz() const { return 2.0 * z_max / static_cast<double>(points_per_axis - 1); }
  std::size_t center() const { return (points_per_axis - 1) / 2; }

  std::size_t total_points() const {
    std::size_t p = 1;
    for (int a = 0; a < dim; ++a) p *= points_per_axis;
    return p;
  }

  double coordinate(std::size_t axis_index) const {
    return -z_max + dz() * static_cast<double>(axis_index);
  }

  /// Decompose a flat (row-major) index into per-axis indices.
  void unflatten(std::size_t flat, std::size_t* axis_indices) const {
    for (int a = dim - 1; a >= 0; --a) {
      axis_indices[a] = flat % points_per_axis;
      flat /= points_per_axis;
    }
  }

  std::vector<double> frequency(std::size_t flat) const {
    std::vector<double> z(dim);
    std::size_t idx[8];
    unflatten(flat, idx);
    for (int a = 0; a < dim; ++a) z[a] = coordinate(idx[a]);
    return z;
  }

  double norm_sq(std::size_t flat) const {
    std::size_t idx[8];
    unflatten(flat, idx);
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double z = coordinate(idx[a]);
      s += z * z;
    }
    return s;
  }

  /// Flat index of the mirrored lattice point -z.
  std::size_t mirror(std::size_t flat) const {
    std::size_t idx[8];
    unflatten(flat, idx);
    std::size_t out = 0;
    for (int a = 0; a < dim; ++a) out = out * points_per_axis + (points_per_axis - 1 - idx[a]);
    return out;
  }

  bool operator==(const FrequencyGrid& o) const {
    return dim == o.dim && z_max == o.z_max && points_per_axis == o.points_per_axis;
  }
};

/// Spatial box dual to a FrequencyGrid under the discrete Fourier pairing:
/// dx * dz = 2*pi / m, so that centered DFTs between the two lattices invert
/// each other exactly.
struct BoxGrid {
  int dim = 1;
  double dx = 1.0;
  std::size_t points_per_axis = 3;  // odd, matches the frequency lattice

  static BoxGrid dual_of(const FrequencyGrid& g) {
    BoxGrid b;
    b.dim = g.dim;
    b.points_per_axis = g.points_per_axis;
    b.dx = 2.0 * std::numbers::pi / (g.dz() * static_cast<double>(g.points_per_axis));
    return b;
  }

  std::size_t center() const { return (points_per_axis - 1) / 2; }
  double extent() const { return dx * static_cast<double>(points_per_axis); }
  double coordinate(std::size_t axis_index) const {
    return dx * (static_cast<double>(axis_index) - static_cast<double>(center()));
  }

  std::size_t total_points() const {
    std::size_t p = 1;
    for (int a = 0; a < dim; ++a) p *= points_per_axis;
    return p;
  }

  void unflatten(std::size_t flat, std::size_t* axis_indices) const {
    for (int a = dim - 1; a >= 0; --a) {
      axis_indices[a] = flat % points_per_axis;
      flat /= points_per_axis;
    }
  }

  std::vector<double> point(std::size_t flat) const {
    std::vector<double> x(dim);
    std::size_t idx[8];
    unflatten(flat, idx);
    for (int a = 0; a < dim; ++a) x[a] = coordinate(idx[a]);
    return x;
  }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= dx;
    return v;
  }

  bool operator==(const BoxGrid& o) const {
    return dim == o.dim && dx == o.dx && points_per_axis == o.points_per_axis;
  }
};

}  // namespace pathreg::core

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathreg/core/grid.hpp"

namespace pathreg::funcspaces {

/// Dyadic partition of unity (chi, rho) evaluated on a frequency lattice.
///
/// chi is a radial low-pass bump equal to 1 for |z| <= a and supported in
/// |z| <= c; rho(z) = chi(z/2) - chi(z) is supported in the annulus
/// a <= |z| <= b with b = 2c, and chi + sum_{j>=0} rho(2^{-j} z) = 1.
/// The bumps are built from the smooth transition e^{-1/x} glued on the
/// radii and frozen here so block norms are reproducible.
///
/// Levels run from -1 (chi) to j_max = floor(log2(z_max / b)); blocks beyond
/// the lattice are dropped, which leaves the partition exact only below the
/// resolvable radius 2^{j_max+1} a.
struct DyadicPartition {
  core::FrequencyGrid grid;
  double a = 0.75, b = 2.0, c = 1.0;
  int j_max = 0;
  std::vector<std::vector<double>> level_values;  // index 0 is level -1 (chi)

  int levels() const { return j_max + 2; }
  double resolvable_radius() const { return std::pow(2.0, j_max + 1) * a; }

  const std::vector<double>& block(int j) const {
    if (j < -1 || j > j_max) throw std::invalid_argument("DyadicPartition: level out of range");
    return level_values[static_cast<std::size_t>(j + 1)];
  }

  /// Smooth cutoff: 1 for r <= a, 0 for r >= c.
  double chi_radial(double r) const {
    if (r <= a) return 1.0;
    if (r >= c) return 0.0;
    const double x = (r - a) / (c - a);
    auto g = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    return g(1.0 - x) / (g(1.0 - x) + g(x));
  }
  double rho_radial(double r) const { return chi_radial(0.5 * r) - chi_radial(r); }
};

/// Build the partition on a lattice. The admissibility constraints keep the
/// three support conditions satisfiable: a < c (a real transition region),
/// c < 2a (chi does not meet rho(2^{-j}.) for j >= 1), and b = 2c (the
/// dilates of rho telescope to 1).
inline DyadicPartition build_partition(const core::FrequencyGrid& grid, double a = 0.75, double b = 2.0,
                                       double c = 1.0) {
  if (!(a < c))
    throw std::invalid_argument("build_partition: inadmissible radii: need a < c (transition region)");
  if (!(c < 2.0 * a))
    throw std::invalid_argument(
        "build_partition: inadmissible radii: need c < 2a, otherwise supp(chi) meets supp(rho(2^{-j}.)) "
        "for j >= 1");
  if (std::abs(b - 2.0 * c) > 1e-12)
    throw std::invalid_argument(
        "build_partition: inadmissible radii: need b = 2c, otherwise the dilates of rho cannot sum to 1 "
        "(supports [2^j a, 2^j b] would leave gaps or overlap at more than one level)");
  DyadicPartition part;
  part.grid = grid;
  part.a = a;
  part.b = b;
  part.c = c;
  part.j_max = static_cast<int>(std::floor(std::log2(grid.z_max / b)));
  if (part.j_max < 0) throw std::invalid_argument("build_partition: lattice too small for one annulus");
  const std::size_t total = grid.total_points();
  part.level_values.assign(static_cast<std::size_t>(part.levels()), std::vector<double>(total, 0.0));
  for (std::size_t flat = 0; flat < total; ++flat) {
    const double r = std::sqrt(grid.norm_sq(flat));
    part.level_values[0][flat] = part.chi_radial(r);
    for (int j = 0; j <= part.j_max; ++j)
      part.level_values[static_cast<std::size_t>(j + 1)][flat] = part.rho_radial(std::pow(0.5, j) * r);
  }
  return part;
}

}  // namespace pathreg::funcspaces

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pathreg/core/fft.hpp"
#include "pathreg/funcspaces/partition.hpp"

namespace pathreg::funcspaces {

using core::cplx;

/// A complex field sampled on the spatial box dual to a frequency lattice.
struct GriddedField {
  core::FrequencyGrid grid;
  std::vector<cplx> values;  // on BoxGrid::dual_of(grid)

  core::BoxGrid box() const { return core::BoxGrid::dual_of(grid); }
};

/// Littlewood-Paley block Delta_j f: forward FFT, multiply by rho_j, inverse.
inline GriddedField lp_block(const GriddedField& field, const DyadicPartition& part, int j) {
  if (!(field.grid == part.grid)) throw std::invalid_argument("lp_block: field/partition grid mismatch");
  std::vector<cplx> hat = core::spatial_to_spectral(field.grid, field.values);
  const auto& w = part.block(j);
  for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= w[k];
  GriddedField out;
  out.grid = field.grid;
  out.values = core::spectral_to_spatial(field.grid, std::move(hat));
  return out;
}

/// Spectral tail mass beyond the partition's resolvable radius, relative to
/// the total; blocks out there are dropped by construction.
inline double dropped_tail_fraction(const GriddedField& field, const DyadicPartition& part) {
  std::vector<cplx> hat = core::spatial_to_spectral(field.grid, field.values);
  const double r2 = part.resolvable_radius() * part.resolvable_radius();
  double tail = 0.0, total = 0.0;
  for (std::size_t k = 0; k < hat.size(); ++k) {
    const double m = std::abs(hat[k]);
    total += m;
    if (field.grid.norm_sq(k) > r2) tail += m;
  }
  return total > 0.0 ? tail / total : 0.0;
}

struct BesovReport {
  double alpha = 0.0, p = 2.0, q = 2.0, kappa = 0.0;
  std::vector<double> block_norms;  // || <x>^kappa Delta_j f ||_{L^p}, j = -1..j_max
  double total = 0.0;
  double dropped_tail = 0.0;  // relative spectral mass beyond the top level
};

namespace detail {

inline double lp_norm(const core::BoxGrid& box, const std::vector<cplx>& vals, double p, double kappa) {
  const bool weight = kappa != 0.0;
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      double v = std::abs(vals[i]);
      if (weight) {
        const auto x = box.point(i);
        double n2 = 0.0;
        for (double xi : x) n2 += xi * xi;
        v *= std::pow(1.0 + n2, 0.5 * kappa);
      }
      m = std::max(m, v);
    }
    return m;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    double v = std::abs(vals[i]);
    if (weight) {
      const auto x = box.point(i);
      double n2 = 0.0;
      for (double xi : x) n2 += xi * xi;
      v *= std::pow(1.0 + n2, 0.5 * kappa);
    }
    acc += std::pow(v, p);
  }
  return std::pow(acc * box.cell_volume(), 1.0 / p);
}

}  // namespace detail

/// Weighted Besov norm || f ||_{B^alpha_{p,q}(<x>^kappa)} on the lattice:
/// l^q aggregation over levels of 2^{j alpha} || <x>^kappa Delta_j f ||_{L^p}.
inline BesovReport besov_norm(const GriddedField& field, const DyadicPartition& part, double alpha,
                              double p, double q, double kappa = 0.0) {
  if (p < 1.0 || q < 1.0) throw std::invalid_argument("besov_norm: p, q must lie in [1, inf]");
  BesovReport rep;
  rep.alpha = alpha;
  rep.p = p;
  rep.q = q;
  rep.kappa = kappa;
  rep.dropped_tail = dropped_tail_fraction(field, part);
  const core::BoxGrid box = field.box();

  std::vector<cplx> hat = core::spatial_to_spectral(field.grid, field.values);
  for (int j = -1; j <= part.j_max; ++j) {
    std::vector<cplx> blk = hat;
    const auto& w = part.block(j);
    for (std::size_t k = 0; k < blk.size(); ++k) blk[k] *= w[k];
    blk = core::spectral_to_spatial(field.grid, std::move(blk));
    rep.block_norms.push_back(detail::lp_norm(box, blk, p, kappa));
  }

  if (std::isinf(q)) {
    double m = 0.0;
    for (int j = -1; j <= part.j_max; ++j)
      m = std::max(m, std::pow(2.0, alpha * j) * rep.block_norms[static_cast<std::size_t>(j + 1)]);
    rep.total = m;
  } else {
    double acc = 0.0;
    for (int j = -1; j <= part.j_max; ++j)
      acc += std::pow(std::pow(2.0, alpha * j) * rep.block_norms[static_cast<std::size_t>(j + 1)], q);
    rep.total = std::pow(acc, 1.0 / q);
  }
  return rep;
}

/// Hoelder-Besov norm C^alpha = B^alpha_{inf,inf}.
inline BesovReport holder_norm(const GriddedField& field, const DyadicPartition& part, double alpha,
                               double kappa = 0.0) {
  return besov_norm(field, part, alpha, std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(), kappa);
}

}  // namespace pathreg::funcspaces

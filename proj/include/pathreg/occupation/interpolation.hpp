#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pathreg/funcspaces/besov.hpp"
#include "pathreg/occupation/exponent.hpp"
#include "pathreg/occupation/local_time.hpp"

namespace pathreg::occupation {

struct InterpolationReport {
  double alpha = 0.0, gamma = 0.0, kappa = 0.0;
  double lhs = 0.0;         // sup_{s,t,j} 2^{j alpha} ||Delta_j L_{s,t}||_inf / |t-s|^gamma
  double c1_factor = 0.0;   // sup 2^{-j d} ||Delta_j L_{s,t}||_inf / |t-s|
  double ck_factor = 0.0;   // sup 2^{j kappa} ||Delta_j L_{s,t}||_inf
  double rhs = 0.0;         // c1_factor^gamma * ck_factor^{1-gamma}
  double ratio = 0.0;
  std::size_t windows_used = 0;
};

/// Evaluates both sides of the interpolation inequality
///   ||L||_{C^gamma_T C^alpha} <= ||L||_{C^1_T C^{-d}}^gamma
///                                * sup_{s,t} ||L_{s,t}||_{C^kappa}^{1-gamma},
/// kappa = (alpha + gamma d) / (1 - gamma), on discrete Littlewood-Paley data
/// over a dyadic window family. The per-triple Hoelder split makes the ratio
/// <= 1 up to floating point, which is exactly what the report verifies.
inline InterpolationReport interpolation_check(const gauss::SamplePath& path, double alpha, double gamma,
                                               const core::FrequencyGrid& grid, const WindowSet& windows,
                                               double kappa_max = 64.0) {
  if (!(alpha > 0.0)) throw std::invalid_argument("interpolation_check: alpha must be positive");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("interpolation_check: gamma must lie in (0,1)");
  const int d = path.dimension;
  const double kappa = (alpha + gamma * d) / (1.0 - gamma);
  if (kappa > kappa_max)
    throw std::invalid_argument(
        "interpolation_check: gamma too close to 1; kappa = (alpha+gamma d)/(1-gamma) = " +
        std::to_string(kappa) + " exceeds the resolvable limit");
  windows.validate();

  const funcspaces::DyadicPartition part = funcspaces::build_partition(grid);
  InterpolationReport rep;
  rep.alpha = alpha;
  rep.gamma = gamma;
  rep.kappa = kappa;

  const std::size_t n = path.grid.steps;
  for (std::size_t j = windows.j_min; j <= windows.j_max; ++j) {
    const std::size_t hidx = n >> j;
    if (hidx == 0) continue;
    for (std::size_t q = 0; q < windows.offsets_per_scale; ++q) {
      const std::size_t smax = n - hidx;
      const std::size_t si = windows.offsets_per_scale == 1 ? 0 : (smax * q) / (windows.offsets_per_scale - 1);
      const auto spec = occupation_spectrum(path, path.grid.time(si), path.grid.time(si + hidx), grid);
      const double len = spec.length();
      // Block sup-norms of the window local time, computed spectrally.
      funcspaces::GriddedField f;
      f.grid = grid;
      const LocalTimeField lt = local_time(spec);
      f.values.assign(lt.values.begin(), lt.values.end());
      std::vector<core::cplx> hat = core::spatial_to_spectral(grid, f.values);
      for (int lev = -1; lev <= part.j_max; ++lev) {
        std::vector<core::cplx> blk = hat;
        const auto& w = part.block(lev);
        for (std::size_t k = 0; k < blk.size(); ++k) blk[k] *= w[k];
        blk = core::spectral_to_spatial(grid, std::move(blk));
        double sup = 0.0;
        for (const auto& v : blk) sup = std::max(sup, std::abs(v));
        const double two_j = std::pow(2.0, lev);
        rep.lhs = std::max(rep.lhs, std::pow(two_j, alpha) * sup / std::pow(len, gamma));
        rep.c1_factor = std::max(rep.c1_factor, std::pow(two_j, -d) * sup / len);
        rep.ck_factor = std::max(rep.ck_factor, std::pow(two_j, kappa) * sup);
      }
      ++rep.windows_used;
    }
  }
  rep.rhs = std::pow(rep.c1_factor, gamma) * std::pow(rep.ck_factor, 1.0 - gamma);
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

}  // namespace pathreg::occupation

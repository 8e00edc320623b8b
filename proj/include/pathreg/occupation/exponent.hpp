#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "pathreg/occupation/spectrum.hpp"

namespace pathreg::occupation {

/// Dyadic window family h = T 2^{-j}, j = j_min..j_max, with a fixed number
/// of evenly spaced window starts per scale.
struct WindowSet {
  std::size_t j_min = 2;
  std::size_t j_max = 7;
  std::size_t offsets_per_scale = 16;

  void validate() const {
    if (j_max < j_min || j_max - j_min + 1 < 2)
      throw std::invalid_argument("WindowSet: need at least 2 dyadic scales");
    if (offsets_per_scale < 1) throw std::invalid_argument("WindowSet: need at least one offset");
  }
};

struct ScalePoint {
  double h = 0.0;
  double sup_norm = 0.0;  // sup over window starts of ||mu_{s,s+h}||_{H^lambda}
};

/// Per-path scaling data and the batch-fitted Hoelder-in-time exponent of
/// t -> ||mu_{s,t}||_{H^lambda}.
struct ExponentReport {
  double lambda = 0.0;
  double gamma_hat = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  WindowSet windows;
  std::vector<double> per_path_slope;
  std::vector<ScalePoint> mean_scale_points;  // averaged over paths, for plotting
};

namespace detail {

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("ls_slope: degenerate regression (need >= 2 scales)");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("ls_slope: degenerate regression (single scale)");
  return sxy / sxx;
}

}  // namespace detail

/// Sup norms per scale for a single path: one pass of prefix snapshots over
/// the union of window endpoints, then H^lambda norms of snapshot differences.
inline std::vector<ScalePoint> scale_profile(const gauss::SamplePath& path, double lambda,
                                             const core::FrequencyGrid& grid, const WindowSet& windows) {
  windows.validate();
  const std::size_t n = path.grid.steps;
  std::set<std::size_t> endpoint_set;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> scale_windows;
  for (std::size_t j = windows.j_min; j <= windows.j_max; ++j) {
    const std::size_t hidx = n >> j;
    if (hidx == 0) throw std::invalid_argument("scale_profile: grid too coarse for the dyadic window set");
    std::vector<std::pair<std::size_t, std::size_t>> wins;
    const std::size_t slots = windows.offsets_per_scale;
    for (std::size_t q = 0; q < slots; ++q) {
      const std::size_t smax = n - hidx;
      const std::size_t si = slots == 1 ? 0 : (smax * q) / (slots - 1);
      wins.emplace_back(si, si + hidx);
      endpoint_set.insert(si);
      endpoint_set.insert(si + hidx);
    }
    scale_windows.push_back(std::move(wins));
  }
  std::vector<std::size_t> endpoints(endpoint_set.begin(), endpoint_set.end());
  const auto snaps = prefix_spectra(path, grid, endpoints);
  auto snap_of = [&](std::size_t idx) -> const std::vector<cplx>& {
    const auto it = std::lower_bound(endpoints.begin(), endpoints.end(), idx);
    return snaps[static_cast<std::size_t>(it - endpoints.begin())];
  };
  std::vector<ScalePoint> out;
  std::size_t row = 0;
  for (std::size_t j = windows.j_min; j <= windows.j_max; ++j, ++row) {
    ScalePoint p;
    p.h = path.grid.horizon * std::pow(0.5, static_cast<double>(j));
    for (const auto& [si, ti] : scale_windows[row])
      p.sup_norm = std::max(p.sup_norm, sobolev_norm_values(grid, snap_of(si), snap_of(ti), lambda));
    out.push_back(p);
  }
  return out;
}

/// Least-squares slope of log sup-norm against log h per path, then batch
/// mean with its standard error.
inline ExponentReport holder_exponent(const std::vector<gauss::SamplePath>& paths, double lambda,
                                      const core::FrequencyGrid& grid, const WindowSet& windows,
                                      std::size_t min_paths = 20) {
  windows.validate();
  if (paths.size() < min_paths)
    throw std::invalid_argument("holder_exponent: need at least " + std::to_string(min_paths) + " paths");
  ExponentReport rep;
  rep.lambda = lambda;
  rep.windows = windows;
  rep.n_paths = paths.size();
  const std::size_t n_scales = windows.j_max - windows.j_min + 1;
  rep.mean_scale_points.assign(n_scales, ScalePoint{});
  for (const auto& path : paths) {
    const auto pts = scale_profile(path, lambda, grid, windows);
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      lx.push_back(std::log(pts[k].h));
      ly.push_back(std::log(pts[k].sup_norm));
      rep.mean_scale_points[k].h = pts[k].h;
      rep.mean_scale_points[k].sup_norm += pts[k].sup_norm / static_cast<double>(paths.size());
    }
    rep.per_path_slope.push_back(detail::ls_slope(lx, ly));
  }
  double mean = 0.0;
  for (double s : rep.per_path_slope) mean += s;
  mean /= static_cast<double>(rep.per_path_slope.size());
  double var = 0.0;
  for (double s : rep.per_path_slope) var += (s - mean) * (s - mean);
  var /= static_cast<double>(rep.per_path_slope.size() > 1 ? rep.per_path_slope.size() - 1 : 1);
  rep.gamma_hat = mean;
  rep.std_error = std::sqrt(var / static_cast<double>(rep.per_path_slope.size()));
  return rep;
}

}  // namespace pathreg::occupation

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathreg/averaging/average.hpp"

namespace pathreg::averaging {

struct HolderInTimeReport {
  double gamma = 0.0, alpha = 0.0, kappa = 0.0;
  std::vector<double> per_jet;  // sup over windows/box of |grad^l T| <x>^{-kappa} / |t-s|^gamma
  std::vector<std::size_t> argmax_window;
  double total = 0.0;  // max over jet orders
};

/// Weighted C^gamma-in-time estimate of the averaged field, per jet order:
/// sup over windows and box points of |grad^l T_{s,t}(x)| <x>^{-kappa} /
/// |t-s|^gamma. alpha is carried as report metadata (the spatial class the
/// jets discretize).
inline HolderInTimeReport holder_in_time_norm(const AveragedField& field, double gamma, double alpha,
                                              double kappa, std::size_t min_windows = 3) {
  if (field.windows.size() < min_windows)
    throw std::invalid_argument("holder_in_time_norm: need at least " + std::to_string(min_windows) +
                                " windows");
  HolderInTimeReport rep;
  rep.gamma = gamma;
  rep.alpha = alpha;
  rep.kappa = kappa;
  rep.per_jet.assign(static_cast<std::size_t>(field.jet_order) + 1, 0.0);
  rep.argmax_window.assign(static_cast<std::size_t>(field.jet_order) + 1, 0);
  const std::size_t pts = field.box.total_points();
  std::vector<double> wgt(pts);
  for (std::size_t i = 0; i < pts; ++i) {
    const auto x = field.box.point(i);
    double n2 = 0.0;
    for (double xi : x) n2 += xi * xi;
    wgt[i] = std::pow(1.0 + n2, -0.5 * kappa);
  }
  for (std::size_t w = 0; w < field.windows.size(); ++w) {
    const auto& win = field.windows[w];
    const double len = win.t - win.s;
    if (len <= 0.0) continue;
    const double denom = std::pow(len, gamma);
    for (int l = 0; l <= field.jet_order; ++l) {
      double sup = 0.0;
      for (const auto& comp : win.jets[static_cast<std::size_t>(l)])
        for (std::size_t i = 0; i < pts; ++i) sup = std::max(sup, std::abs(comp[i]) * wgt[i]);
      const double q = sup / denom;
      if (q > rep.per_jet[static_cast<std::size_t>(l)]) {
        rep.per_jet[static_cast<std::size_t>(l)] = q;
        rep.argmax_window[static_cast<std::size_t>(l)] = w;
      }
    }
  }
  for (double v : rep.per_jet) rep.total = std::max(rep.total, v);
  return rep;
}

struct MollifyReport {
  std::vector<double> scales;
  std::vector<double> norms;  // || T^w b - T^w b_eps || in the weighted C^gamma sense
  bool monotone = true;
  double floor = 1e-12;
  std::vector<std::string> warnings;
};

/// Convergence table for T^w b_eps -> T^w b across mollification scales; the
/// norms must
/// decrease beyond the resolution floor (non-monotone entries flag lattice
/// under-resolution).
inline MollifyReport mollify_convergence(const SpectralDrift& drift, const std::vector<double>& scales,
                                         const std::vector<occupation::OccupationSpectrum>& spectra,
                                         double gamma, double kappa, int jet_order = 0) {
  if (scales.size() < 2) throw std::invalid_argument("mollify_convergence: need at least 2 scales");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] < scales[i - 1]))
      throw std::invalid_argument("mollify_convergence: scales must decrease");
  MollifyReport rep;
  rep.scales = scales;
  const AveragedField base = average(drift, spectra, jet_order);
  for (double eps : scales) {
    const AveragedField moll = average(drift.mollified(eps), spectra, jet_order);
    AveragedField diff = base;
    for (std::size_t w = 0; w < diff.windows.size(); ++w)
      for (std::size_t l = 0; l < diff.windows[w].jets.size(); ++l)
        for (std::size_t ct = 0; ct < diff.windows[w].jets[l].size(); ++ct)
          for (std::size_t i = 0; i < diff.windows[w].jets[l][ct].size(); ++i)
            diff.windows[w].jets[l][ct][i] -= moll.windows[w].jets[l][ct][i];
    rep.norms.push_back(holder_in_time_norm(diff, gamma, 0.0, kappa).total);
  }
  for (std::size_t i = 1; i < rep.norms.size(); ++i) {
    if (rep.norms[i] >= rep.norms[i - 1] && rep.norms[i] > rep.floor) {
      rep.monotone = false;
      rep.warnings.push_back("mollify_convergence: non-monotone step at scale " +
                             std::to_string(scales[i]) + " (grid under-resolution)");
    }
  }
  return rep;
}

}  // namespace pathreg::averaging

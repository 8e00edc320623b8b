#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathreg/averaging/drift.hpp"
#include "pathreg/core/fft.hpp"
#include "pathreg/occupation/spectrum.hpp"

namespace pathreg::averaging {

/// Jets of the averaging operator on a spatial box over a family of windows.
/// jets[l] holds d * d^l real fields (component index c, then the tensor
/// multi-index, row-major over axes), each sampled on the box.
struct AveragedField {
  core::BoxGrid box;
  int dim = 1;
  int jet_order = 0;
  double kappa = 0.0;
  struct Window {
    double s = 0.0, t = 0.0;
    std::vector<std::vector<std::vector<double>>> jets;  // [l][c*d^l+tau][box point]
  };
  std::vector<Window> windows;
  std::vector<std::string> warnings;

  static std::size_t tensor_count(int dim, int level) {
    std::size_t n = static_cast<std::size_t>(dim);
    for (int l = 0; l < level; ++l) n *= static_cast<std::size_t>(dim);
    return n;
  }
};

namespace detail {

/// Estimated fraction of symbol mass beyond the lattice cutoff, probed on
/// [z_max, 4 z_max] along each axis (closed-form symbols only).
inline double tail_fraction(const SpectralDrift& drift, int component, const core::FrequencyGrid& grid) {
  const auto* cf = std::get_if<ClosedFormSymbol>(&drift.kind);
  if (cf == nullptr) return 0.0;
  const auto& sym = cf->components[static_cast<std::size_t>(component)];
  const int probes = 64;
  double inside = 0.0, outside = 0.0;
  std::vector<double> z(static_cast<std::size_t>(grid.dim), 0.0);
  for (int axis = 0; axis < grid.dim; ++axis) {
    for (int q = 0; q < probes; ++q) {
      std::fill(z.begin(), z.end(), 0.0);
      const double inner = grid.z_max * (static_cast<double>(q) + 0.5) / probes;
      z[static_cast<std::size_t>(axis)] = inner;
      inside += std::abs(sym(z)) * (grid.z_max / probes);
      const double outer = grid.z_max * (1.0 + 3.0 * (static_cast<double>(q) + 0.5) / probes);
      z[static_cast<std::size_t>(axis)] = outer;
      outside += std::abs(sym(z)) * (3.0 * grid.z_max / probes);
    }
  }
  return inside + outside > 0.0 ? outside / (inside + outside) : 0.0;
}

}  // namespace detail

/// Realize T^w_{s,t} b and its spatial jets on the box dual to the spectrum
/// lattice, via the convolution theorem:
///   grad^l T^w_{s,t} b(x) = (2 pi)^{-d} sum_z (i z)^{(x)l} bhat(z)
///                            mu_hat_{s,t}(z) e^{i<z,x>} dz.
/// Fields are real after Hermitian symmetrization. Degenerate windows s = t
/// produce the zero field without transform work.
inline AveragedField average(const SpectralDrift& drift, const std::vector<occupation::OccupationSpectrum>& spectra,
                             int jet_order = 0, int jet_cap = 4) {
  drift.validate();
  if (spectra.empty()) throw std::invalid_argument("average: need at least one window spectrum");
  if (jet_order < 0 || jet_order > jet_cap)
    throw std::invalid_argument("average: jet order exceeds the cap (" + std::to_string(jet_cap) + ")");
  const core::FrequencyGrid grid = spectra.front().grid;
  for (const auto& s : spectra)
    if (!(s.grid == grid)) throw std::invalid_argument("average: all spectra must share one lattice");
  if (grid.dim != drift.dim) throw std::invalid_argument("average: drift/spectrum dimension mismatch");

  AveragedField field;
  field.box = core::BoxGrid::dual_of(grid);
  field.dim = drift.dim;
  field.jet_order = jet_order;
  field.kappa = drift.kappa;

  std::vector<std::vector<core::cplx>> symbols;
  for (int c = 0; c < drift.dim; ++c) {
    symbols.push_back(drift.sampled_symbol(c, grid));
    const double tail = detail::tail_fraction(drift, c, grid);
    if (tail > 0.10)
      field.warnings.push_back("average: drift '" + drift.name() + "' component " + std::to_string(c) +
                               " has " + std::to_string(100.0 * tail) +
                               "% of its probed symbol mass beyond z_max (truncated)");
  }

  const std::size_t total = grid.total_points();
  for (const auto& spec : spectra) {
    AveragedField::Window win;
    win.s = spec.window_start;
    win.t = spec.window_end;
    win.jets.resize(static_cast<std::size_t>(jet_order) + 1);
    const bool degenerate = spec.window_end == spec.window_start;
    for (int l = 0; l <= jet_order; ++l) {
      const std::size_t count = AveragedField::tensor_count(drift.dim, l);
      auto& fields_l = win.jets[static_cast<std::size_t>(l)];
      fields_l.resize(count);
      for (auto& f : fields_l) f.assign(field.box.total_points(), 0.0);
      if (degenerate) continue;
      const std::size_t per_comp = count / static_cast<std::size_t>(drift.dim);
      for (int c = 0; c < drift.dim; ++c) {
        for (std::size_t tau = 0; tau < per_comp; ++tau) {
          std::vector<core::cplx> g(total);
          for (std::size_t k = 0; k < total; ++k) {
            const auto z = grid.frequency(k);
            g[k] = detail::iz_power(z, tau, l, drift.dim) * symbols[static_cast<std::size_t>(c)][k] *
                   spec.values[k];
          }
          // Hermitian symmetrization keeps the field exactly real.
          for (std::size_t k = 0; k < total; ++k) {
            const std::size_t mk = grid.mirror(k);
            if (mk < k) continue;
            const core::cplx avg = 0.5 * (g[k] + std::conj(g[mk]));
            g[k] = avg;
            g[mk] = std::conj(avg);
          }
          const auto spatial = core::spectral_to_spatial(grid, std::move(g));
          auto& dst = fields_l[static_cast<std::size_t>(c) * per_comp + tau];
          for (std::size_t i = 0; i < spatial.size(); ++i) dst[i] = spatial[i].real();
        }
      }
    }
    field.windows.push_back(std::move(win));
  }
  return field;
}

inline AveragedField average(const SpectralDrift& drift, const occupation::OccupationSpectrum& spectrum,
                             int jet_order = 0, int jet_cap = 4) {
  return average(drift, std::vector<occupation::OccupationSpectrum>{spectrum}, jet_order, jet_cap);
}

/// Exact point evaluation of jet l of T^w_{s,t} b at x (no interpolation),
/// for lattice-symbol drifts.
inline std::vector<double> average_at(const SpectralDrift& drift, const occupation::OccupationSpectrum& spec,
                                      const std::vector<double>& x, int level) {
  drift.validate();
  const auto& grid = spec.grid;
  const std::size_t per_comp = AveragedField::tensor_count(drift.dim, level) / static_cast<std::size_t>(drift.dim);
  std::vector<double> out(AveragedField::tensor_count(drift.dim, level), 0.0);
  double vol = 1.0;
  for (int a = 0; a < grid.dim; ++a) vol *= grid.dz() / (2.0 * std::numbers::pi);
  for (int c = 0; c < drift.dim; ++c) {
    const auto symbol = drift.sampled_symbol(c, grid);
    for (std::size_t tau = 0; tau < per_comp; ++tau) {
      core::cplx acc(0.0, 0.0);
      for (std::size_t k = 0; k < symbol.size(); ++k) {
        const auto z = grid.frequency(k);
        double phase = 0.0;
        for (int a = 0; a < grid.dim; ++a) phase += z[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
        acc += detail::iz_power(z, tau, level, drift.dim) * symbol[k] * spec.values[k] *
               std::polar(1.0, phase);
      }
      out[static_cast<std::size_t>(c) * per_comp + tau] = (acc * vol).real();
    }
  }
  return out;
}

}  // namespace pathreg::averaging

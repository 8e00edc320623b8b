#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pathreg/occupation/spectrum.hpp"

namespace pathreg::occupation {

/// Local time field L_{s,t} reconstructed on the spatial box dual to the
/// frequency lattice.
struct LocalTimeField {
  core::BoxGrid box;
  double window_start = 0.0;
  double window_end = 0.0;
  std::vector<double> values;
  double imag_residual = 0.0;    // max |Im| / max |Re| before discarding Im
  double mass_rel_error = 0.0;   // |integral - (t-s)| / (t-s)
  std::vector<std::string> warnings;

  double integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * box.cell_volume();
  }
  double max_value() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
  double min_value() const { return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end()); }
};

/// Inverse Fourier reconstruction L(x) = (2 pi)^{-d} sum_z mu_hat(z)
/// exp(-i<z,x>) dz^d after Hermitian symmetrization. The spatial field is
/// only used for visualization and closed-form checks; norms stay on the
/// Fourier side.
///
/// taper_cells > 0 applies a Gaussian spectral window exp(-|z|^2 sx^2 / 2)
/// with sx = taper_cells * dx. The default 0 keeps the hard cutoff; the
/// window trades the slowly decaying Gibbs tails of the hard cutoff for a
/// smooth transition confined to a few cells around jumps, with the total
/// mass preserved exactly (the window is 1 at z = 0).
inline LocalTimeField local_time(const OccupationSpectrum& spec, double taper_cells = 0.0) {
  const auto& grid = spec.grid;
  LocalTimeField field;
  field.box = core::BoxGrid::dual_of(grid);
  field.window_start = spec.window_start;
  field.window_end = spec.window_end;

  std::vector<cplx> sym(spec.values.size());
  for (std::size_t flat = 0; flat < sym.size(); ++flat)
    sym[flat] = 0.5 * (spec.values[flat] + std::conj(spec.values[grid.mirror(flat)]));
  if (taper_cells > 0.0) {
    const double sx = taper_cells * field.box.dx;
    for (std::size_t flat = 0; flat < sym.size(); ++flat)
      sym[flat] *= std::exp(-0.5 * sx * sx * grid.norm_sq(flat));
  }

  // L(x) = (2pi)^{-d} int mu_hat(z) e^{-i<z,x>} dz; with mu_hat(z) =
  // int e^{+i<z,w>} this is the (sign-flipped) dual of spectral_to_spatial.
  for (auto& v : sym) v = std::conj(v);
  std::vector<cplx> spatial = core::spectral_to_spatial(grid, std::move(sym));
  for (auto& v : spatial) v = std::conj(v);

  field.values.resize(spatial.size());
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < spatial.size(); ++i) {
    field.values[i] = spatial[i].real();
    max_re = std::max(max_re, std::abs(spatial[i].real()));
    max_im = std::max(max_im, std::abs(spatial[i].imag()));
  }
  field.imag_residual = max_re > 0.0 ? max_im / max_re : 0.0;

  const double mass = field.integral();
  const double len = spec.length();
  field.mass_rel_error = len > 0.0 ? std::abs(mass - len) / len : std::abs(mass);

  const double mx = field.max_value();
  if (field.min_value() < -0.05 * mx)
    field.warnings.push_back(
        "local_time: reconstructed field has severe negativity; the z_max cutoff is too aggressive "
        "for this window");
  return field;
}

/// Box-coverage guidance: warn when the path range does not fit the dual box
/// (the reconstruction then wraps around, i.e. the frequency lattice is too
/// coarse for the path's range).
inline std::vector<std::string> resolution_warnings(const gauss::SamplePath& path,
                                                    const core::FrequencyGrid& grid) {
  std::vector<std::string> out;
  const core::BoxGrid box = core::BoxGrid::dual_of(grid);
  for (int a = 0; a < path.dimension; ++a) {
    const double lo = path.values.col(a).minCoeff();
    const double hi = path.values.col(a).maxCoeff();
    if (hi - lo > 0.9 * box.extent())
      out.push_back("occupation: path range " + std::to_string(hi - lo) + " on axis " + std::to_string(a) +
                    " approaches the dual box extent " + std::to_string(box.extent()) +
                    "; decrease dz (more points or smaller z_max) to avoid wrap-around");
  }
  return out;
}

}  // namespace pathreg::occupation

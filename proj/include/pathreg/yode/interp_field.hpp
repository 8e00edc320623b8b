#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pathreg/core/fft.hpp"
#include "pathreg/yode/field.hpp"

namespace pathreg::yode {

/// AveragedField-backed nonlinear field (d = 1): prefix jets of T^w b on the
/// spatial box at every grid index, cubic interpolation between nodes, linear
/// (exact LeftRiemann) extension below the grid in time. Queries outside the
/// box interior raise an error; the weighted growth <x>^kappa is not
/// represented off the box, so extrapolation is never attempted.
class InterpolatedAveragedField final : public NonlinearField {
 public:
  InterpolatedAveragedField(averaging::SpectralDrift drift, const gauss::SamplePath& path,
                            const core::FrequencyGrid& fgrid, int jet_order, double gamma = 0.75,
                            double delta = 2.0)
      : drift_(std::move(drift)), fgrid_(fgrid), box_(core::BoxGrid::dual_of(fgrid)), tgrid_(path.grid),
        order_(jet_order), gamma_(gamma), delta_(delta) {
    drift_.validate();
    if (drift_.dim != 1 || path.dimension != 1)
      throw std::invalid_argument("InterpolatedAveragedField: d = 1 only");
    const auto symbol = drift_.sampled_symbol(0, fgrid_);
    const std::size_t n = tgrid_.steps;
    const std::size_t m = fgrid_.points_per_axis;
    const double h = tgrid_.dt();
    jets_.assign(static_cast<std::size_t>(order_) + 1, std::vector<double>((n + 1) * m, 0.0));
    std::vector<core::cplx> acc(m, core::cplx(0, 0));  // running prefix spectrum
    std::vector<core::cplx> g(m);
    for (std::size_t i = 0; i <= n; ++i) {
      for (int l = 0; l <= order_; ++l) {
        for (std::size_t kz = 0; kz < m; ++kz) {
          core::cplx izp(1.0, 0.0);
          const double zv = fgrid_.coordinate(kz);
          for (int j = 0; j < l; ++j) izp *= core::cplx(0.0, zv);
          g[kz] = izp * symbol[kz] * acc[kz];
        }
        // Hermitian symmetrize, transform, keep the real part
        for (std::size_t kz = 0; kz < m; ++kz) {
          const std::size_t mk = m - 1 - kz;
          if (mk < kz) break;
          const core::cplx avg = 0.5 * (g[kz] + std::conj(g[mk]));
          g[kz] = avg;
          g[mk] = std::conj(avg);
        }
        auto spatial = core::spectral_to_spatial(fgrid_, g);
        for (std::size_t node = 0; node < m; ++node)
          jets_[static_cast<std::size_t>(l)][i * m + node] = spatial[node].real();
      }
      if (i < n) {
        const double w = path.values(static_cast<Eigen::Index>(i), 0);
        core::cplx cur = std::polar(1.0, -fgrid_.z_max * w);
        const core::cplx step = std::polar(1.0, fgrid_.dz() * w);
        for (std::size_t kz = 0; kz < m; ++kz) {
          acc[kz] += h * cur;
          cur *= step;
        }
      }
    }
    check_exponents();
  }

  int dim() const override { return 1; }
  const core::TimeGrid& grid() const override { return tgrid_; }
  int max_jet_order() const override { return order_; }
  double gamma() const override { return gamma_; }
  double delta() const override { return delta_; }

  void jet(double s, double t, const VecD& x, int order, double* out) const override {
    if (order > order_) throw std::invalid_argument("InterpolatedAveragedField: jet order not available");
    out[0] = prefix_at(order, t, x(0)) - prefix_at(order, s, x(0));
  }

 private:
  double prefix_at(int order, double tau, double x) const {
    const double h = tgrid_.dt();
    double fi = tau / h;
    std::size_t i = static_cast<std::size_t>(std::max(0.0, std::floor(fi + 1e-9)));
    i = std::min(i, tgrid_.steps);
    const double frac = std::clamp(fi - static_cast<double>(i), 0.0, 1.0);
    const double lo = interp_node(order, i, x);
    if (frac < 1e-12 || i == tgrid_.steps) return lo;
    const double hi = interp_node(order, i + 1, x);
    return lo + frac * (hi - lo);
  }

  double interp_node(int order, std::size_t i, double x) const {
    const std::size_t m = fgrid_.points_per_axis;
    const double dx = box_.dx;
    const double left = box_.coordinate(0);
    const double pos = (x - left) / dx;
    const auto j = static_cast<std::ptrdiff_t>(std::floor(pos));
    if (j < 1 || j + 2 >= static_cast<std::ptrdiff_t>(m))
      throw std::domain_error("InterpolatedAveragedField: query outside the spatial box interior");
    const double xi = pos - static_cast<double>(j);
    const double* row = jets_[static_cast<std::size_t>(order)].data() + i * m;
    const double f0 = row[j - 1], f1 = row[j], f2 = row[j + 1], f3 = row[j + 2];
    return 0.5 * (2.0 * f1 + xi * (-f0 + f2) + xi * xi * (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) +
                  xi * xi * xi * (-f0 + 3.0 * f1 - 3.0 * f2 + f3));
  }

  averaging::SpectralDrift drift_;
  core::FrequencyGrid fgrid_;
  core::BoxGrid box_;
  core::TimeGrid tgrid_;
  int order_;
  double gamma_, delta_;
  std::vector<std::vector<double>> jets_;  // [order][(n+1) * m]
};

}  // namespace pathreg::yode

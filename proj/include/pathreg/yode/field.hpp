#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "pathreg/averaging/drift.hpp"
#include "pathreg/core/grid.hpp"
#include "pathreg/gauss/sample.hpp"

namespace pathreg::yode {

using VecD = Eigen::VectorXd;

/// Two-parameter nonlinear field Y_{s,t}(x) with spatial jets, additive in
/// time and vanishing on the diagonal. Backends realize T^w b for the
/// supported drift representations. Jets of order j are laid out as
/// [c * d^j + tau] with tau a row-major multi-index over axes.
class NonlinearField {
 public:
  virtual ~NonlinearField() = default;

  virtual int dim() const = 0;
  virtual const core::TimeGrid& grid() const = 0;
  virtual int max_jet_order() const = 0;

  /// Declared time Hoelder exponent (gamma in (1/2, 1]).
  virtual double gamma() const = 0;
  /// Declared spatial gradient exponent (delta with delta * gamma > 1).
  virtual double delta() const = 0;

  virtual void jet(double s, double t, const VecD& x, int order, double* out) const = 0;

  VecD value(double s, double t, const VecD& x) const {
    VecD out(dim());
    jet(s, t, x, 0, out.data());
    return out;
  }

  std::vector<double> jet_v(double s, double t, const VecD& x, int order) const {
    std::size_t count = static_cast<std::size_t>(dim());
    for (int j = 0; j < order; ++j) count *= static_cast<std::size_t>(dim());
    std::vector<double> out(count);
    jet(s, t, x, order, out.data());
    return out;
  }

  void check_exponents() const {
    if (!(gamma() > 0.5 && gamma() <= 1.0))
      throw std::invalid_argument("NonlinearField: gamma must lie in (1/2, 1]");
    if (!(delta() * gamma() > 1.0))
      throw std::invalid_argument("NonlinearField: need delta * gamma > 1");
  }
};

namespace detail {

/// Window (s,t) split into whole path cells plus partial ends; f(i, weight)
/// receives each contributing cell. LeftRiemann cell density is constant, so
/// the partial-cell weight is the exact additive extension below the grid.
template <typename F>
void for_window_cells(const core::TimeGrid& grid, double s, double t, F&& f) {
  if (!(t >= s)) throw std::invalid_argument("NonlinearField: need s <= t");
  if (s < -1e-12 || t > grid.horizon * (1.0 + 1e-12))
    throw std::invalid_argument("NonlinearField: window outside [0, T]");
  const double h = grid.dt();
  const double eps = 1e-9 * h;
  std::size_t i0 = static_cast<std::size_t>(std::max(0.0, std::floor(s / h + 1e-9)));
  std::size_t i1 = static_cast<std::size_t>(std::max(0.0, std::floor(t / h + 1e-9)));
  i0 = std::min(i0, grid.steps);
  i1 = std::min(i1, grid.steps);
  if (i0 == i1) {
    if (t - s > eps) f(i0 == grid.steps ? i0 - 1 : i0, t - s);
    return;
  }
  const double head = grid.time(i0 + 1) - s;
  if (head > eps) f(i0, head);
  for (std::size_t i = i0 + 1; i < i1; ++i) f(i, h);
  const double tail = t - grid.time(i1);
  if (tail > eps && i1 < grid.steps) f(i1, tail);
}

}  // namespace detail

/// T^w b for a smooth classical scalar drift (d = 1) with analytic
/// derivatives: jets are LeftRiemann window averages of b^{(j)}(x + w).
class SmoothDriftField final : public NonlinearField {
 public:
  SmoothDriftField(averaging::SmoothDrift1D drift, gauss::SamplePath path, int jet_order,
                   double gamma = 1.0, double delta = 2.0)
      : drift_(std::move(drift)), path_(std::move(path)), order_(jet_order), gamma_(gamma), delta_(delta) {
    if (path_.dimension != 1) throw std::invalid_argument("SmoothDriftField: d = 1 only");
    if (drift_.derivatives.size() < static_cast<std::size_t>(order_) + 1)
      throw std::invalid_argument("SmoothDriftField: missing derivatives up to the jet order");
    check_exponents();
  }

  int dim() const override { return 1; }
  const core::TimeGrid& grid() const override { return path_.grid; }
  int max_jet_order() const override { return order_; }
  double gamma() const override { return gamma_; }
  double delta() const override { return delta_; }

  void jet(double s, double t, const VecD& x, int order, double* out) const override {
    if (order > order_) throw std::invalid_argument("SmoothDriftField: jet order not available");
    const auto& deriv = drift_.derivatives[static_cast<std::size_t>(order)];
    double acc = 0.0;
    detail::for_window_cells(path_.grid, s, t,
                             [&](std::size_t i, double wgt) { acc += wgt * deriv(x(0) + path_.values(static_cast<Eigen::Index>(i), 0)); });
    out[0] = acc;
  }

 private:
  averaging::SmoothDrift1D drift_;
  gauss::SamplePath path_;
  int order_;
  double gamma_, delta_;
};

/// T^w b for a finite trigonometric drift, exact in space: per comb line the
/// window integral of e^{i<z, x + w_r>} is a cached prefix sum times a phase.
class CombDriftField final : public NonlinearField {
 public:
  CombDriftField(averaging::SpectralDrift drift, gauss::SamplePath path, int jet_order, double gamma = 0.75,
                 double delta = 2.0)
      : drift_(std::move(drift)), path_(std::move(path)), order_(jet_order), gamma_(gamma), delta_(delta) {
    drift_.validate();
    const auto* comb = std::get_if<averaging::CombSymbol>(&drift_.kind);
    if (comb == nullptr) throw std::invalid_argument("CombDriftField: drift must be a comb symbol");
    if (drift_.dim != path_.dimension) throw std::invalid_argument("CombDriftField: dimension mismatch");
    check_exponents();
    // unique frequency list across components
    for (int c = 0; c < drift_.dim; ++c) {
      for (const auto& line : comb->components[static_cast<std::size_t>(c)]) {
        std::size_t idx = freqs_.size();
        for (std::size_t q = 0; q < freqs_.size(); ++q) {
          double diff = 0.0;
          for (int a = 0; a < drift_.dim; ++a)
            diff += std::abs(freqs_[q][static_cast<std::size_t>(a)] - line.freq[static_cast<std::size_t>(a)]);
          if (diff < 1e-14) {
            idx = q;
            break;
          }
        }
        if (idx == freqs_.size()) freqs_.push_back(line.freq);
        lines_.push_back({c, idx, line.coeff});
      }
    }
    // prefix sums of h * e^{i<z, w_i>} and the per-cell phase densities
    const std::size_t n = path_.grid.steps;
    const double h = path_.grid.dt();
    prefix_.assign(freqs_.size(), std::vector<core::cplx>(n + 1, core::cplx(0, 0)));
    dens_.assign(freqs_.size(), std::vector<core::cplx>(n, core::cplx(0, 0)));
    for (std::size_t q = 0; q < freqs_.size(); ++q) {
      for (std::size_t i = 0; i < n; ++i) {
        double phase = 0.0;
        for (int a = 0; a < drift_.dim; ++a)
          phase += freqs_[q][static_cast<std::size_t>(a)] * path_.values(static_cast<Eigen::Index>(i), a);
        dens_[q][i] = std::polar(1.0, phase);
        prefix_[q][i + 1] = prefix_[q][i] + h * dens_[q][i];
      }
    }
  }

  int dim() const override { return drift_.dim; }
  const core::TimeGrid& grid() const override { return path_.grid; }
  int max_jet_order() const override { return order_; }
  double gamma() const override { return gamma_; }
  double delta() const override { return delta_; }

  void jet(double s, double t, const VecD& x, int order, double* out) const override {
    if (order > order_) throw std::invalid_argument("CombDriftField: jet order not available");
    const int d = drift_.dim;
    std::size_t per_comp = 1;
    for (int j = 0; j < order; ++j) per_comp *= static_cast<std::size_t>(d);
    for (std::size_t q = 0; q < per_comp * static_cast<std::size_t>(d); ++q) out[q] = 0.0;
    // window integrals per frequency
    std::vector<core::cplx> wint(freqs_.size());
    for (std::size_t q = 0; q < freqs_.size(); ++q) wint[q] = window_integral(q, s, t);
    for (const auto& line : lines_) {
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += freqs_[line.freq_index][static_cast<std::size_t>(a)] * x(a);
      const core::cplx base = line.coeff * std::polar(1.0, phase) * wint[line.freq_index];
      for (std::size_t tau = 0; tau < per_comp; ++tau) {
        const core::cplx v =
            base * averaging::detail::iz_power(freqs_[line.freq_index], tau, order, d);
        out[static_cast<std::size_t>(line.component) * per_comp + tau] += v.real();
      }
    }
  }

 private:
  core::cplx window_integral(std::size_t q, double s, double t) const {
    core::cplx acc(0.0, 0.0);
    detail::for_window_cells(path_.grid, s, t,
                             [&](std::size_t i, double wgt) { acc += wgt * dens_[q][i]; });
    return acc;
  }

  struct LineRef {
    int component;
    std::size_t freq_index;
    core::cplx coeff;
  };

  averaging::SpectralDrift drift_;
  gauss::SamplePath path_;
  int order_;
  double gamma_, delta_;
  std::vector<std::vector<double>> freqs_;
  std::vector<LineRef> lines_;
  std::vector<std::vector<core::cplx>> prefix_;
  std::vector<std::vector<core::cplx>> dens_;
};

/// T^w b for a lattice symbol (d = 1): prefix occupation spectra cached at
/// every grid index; jets are exact partial sums over the lattice (no spatial
/// interpolation).
class GridSymbolField final : public NonlinearField {
 public:
  GridSymbolField(averaging::SpectralDrift drift, const gauss::SamplePath& path,
                  const core::FrequencyGrid& fgrid, int jet_order, double gamma = 0.75, double delta = 2.0)
      : drift_(std::move(drift)), fgrid_(fgrid), tgrid_(path.grid), order_(jet_order), gamma_(gamma),
        delta_(delta) {
    drift_.validate();
    if (drift_.dim != 1 || path.dimension != 1)
      throw std::invalid_argument("GridSymbolField: d = 1 only (use comb/smooth fields otherwise)");
    if (!drift_.has_lattice_symbol())
      throw std::invalid_argument("GridSymbolField: drift has no lattice symbol");
    symbol_ = drift_.sampled_symbol(0, fgrid_);
    const std::size_t n = tgrid_.steps;
    const std::size_t m = fgrid_.points_per_axis;
    const double h = tgrid_.dt();
    prefix_.assign((n + 1) * m, core::cplx(0, 0));
    dens_.assign(n * m, core::cplx(0, 0));
    std::vector<core::cplx> phases(m);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = path.values(static_cast<Eigen::Index>(i), 0);
      core::cplx cur = std::polar(1.0, -fgrid_.z_max * w);
      const core::cplx step = std::polar(1.0, fgrid_.dz() * w);
      for (std::size_t kz = 0; kz < m; ++kz) {
        dens_[i * m + kz] = cur;
        prefix_[(i + 1) * m + kz] = prefix_[i * m + kz] + h * cur;
        cur *= step;
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
    if (order > order_) throw std::invalid_argument("GridSymbolField: jet order not available");
    const std::size_t m = fgrid_.points_per_axis;
    // assemble the window spectrum lazily: whole-cell span via prefixes plus
    // partial cells via the cached densities
    const double h = tgrid_.dt();
    const double eps = 1e-9 * h;
    std::size_t i0 = static_cast<std::size_t>(std::max(0.0, std::floor(s / h + 1e-9)));
    std::size_t i1 = static_cast<std::size_t>(std::max(0.0, std::floor(t / h + 1e-9)));
    i0 = std::min(i0, tgrid_.steps);
    i1 = std::min(i1, tgrid_.steps);
    const double head = i0 == i1 ? t - s : tgrid_.time(i0 + 1) - s;
    const double tail = i0 == i1 ? 0.0 : t - tgrid_.time(i1);

    core::cplx acc(0.0, 0.0);
    const core::cplx eix = std::polar(1.0, fgrid_.dz() * x(0));
    core::cplx phase = std::polar(1.0, -fgrid_.z_max * x(0));
    const double dz = fgrid_.dz();
    for (std::size_t kz = 0; kz < m; ++kz) {
      core::cplx wspec = prefix_[i1 * m + kz] - prefix_[std::min(i0 + 1, tgrid_.steps) * m + kz];
      if (i0 == i1) {
        wspec = core::cplx(0.0, 0.0);
      }
      if (head > eps) wspec += head * dens_[std::min(i0, tgrid_.steps - 1) * m + kz];
      if (tail > eps && i1 < tgrid_.steps) wspec += tail * dens_[i1 * m + kz];
      core::cplx term = symbol_[kz] * wspec * phase;
      if (order > 0) {
        const double zv = fgrid_.coordinate(kz);
        core::cplx izp(1.0, 0.0);
        for (int j = 0; j < order; ++j) izp *= core::cplx(0.0, zv);
        term *= izp;
      }
      acc += term;
      phase *= eix;
    }
    out[0] = (acc * (dz / (2.0 * std::numbers::pi))).real();
  }

 private:
  averaging::SpectralDrift drift_;
  core::FrequencyGrid fgrid_;
  core::TimeGrid tgrid_;
  int order_;
  double gamma_, delta_;
  std::vector<core::cplx> symbol_;
  std::vector<core::cplx> prefix_;  // (n+1) x m
  std::vector<core::cplx> dens_;    // n x m
};

}  // namespace pathreg::yode

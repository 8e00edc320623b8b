#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pathreg/core/fft.hpp"
#include "pathreg/core/grid.hpp"

namespace pathreg::averaging {

using core::cplx;

struct BesovTag {
  double alpha = 0.0;
  double p = 2.0;
  double q = 2.0;
};

namespace detail {

/// (i z)^tau factor for a tensor multi-index tau (row-major over axes).
inline core::cplx iz_power(const std::vector<double>& z, std::size_t tau, int level, int dim) {
  core::cplx p(1.0, 0.0);
  for (int m = 0; m < level; ++m) {
    const std::size_t axis = tau % static_cast<std::size_t>(dim);
    tau /= static_cast<std::size_t>(dim);
    p *= core::cplx(0.0, z[axis]);
  }
  return p;
}

}  // namespace detail

/// Closed-form Fourier symbol, one callable per drift component.
struct ClosedFormSymbol {
  std::vector<std::function<cplx(const std::vector<double>&)>> components;  // bhat_c(z)
  std::string name = "symbol";
};

/// Finite trigonometric drift: component c is sum_k coeff e^{i<freq,x>}.
/// Frequencies must come in Hermitian pairs so the drift is real-valued.
struct CombSymbol {
  struct Line {
    std::vector<double> freq;
    cplx coeff;
  };
  std::vector<std::vector<Line>> components;
  std::string name = "comb";
};

/// Symbol samples on a frequency lattice, one array per component.
struct GriddedSymbol {
  core::FrequencyGrid grid;
  std::vector<std::vector<cplx>> components;
  std::string name = "gridded";
};

/// Smooth classical drift on R (d = 1) with analytic derivatives, used for
/// oracle comparisons against the spectral route.
struct SmoothDrift1D {
  std::vector<std::function<double(double)>> derivatives;  // order 0..K
  std::string name = "smooth";
};

/// A tempered-distribution drift b : R^d -> R^d represented spectrally, plus
/// its declared polynomial growth class kappa. Operations never read the
/// symbol beyond a lattice cutoff without recording the truncation.
struct SpectralDrift {
  std::variant<ClosedFormSymbol, CombSymbol, GriddedSymbol, SmoothDrift1D> kind;
  int dim = 1;
  double kappa = 0.0;
  std::optional<BesovTag> besov;

  std::string name() const {
    return std::visit([](const auto& k) { return k.name; }, kind);
  }

  void validate() const {
    if (dim < 1) throw std::invalid_argument("SpectralDrift: dimension must be >= 1");
    if (const auto* c = std::get_if<ClosedFormSymbol>(&kind)) {
      if (static_cast<int>(c->components.size()) != dim)
        throw std::invalid_argument("SpectralDrift: need one symbol per component");
    } else if (const auto* cb = std::get_if<CombSymbol>(&kind)) {
      if (static_cast<int>(cb->components.size()) != dim)
        throw std::invalid_argument("SpectralDrift: need one comb per component");
      for (const auto& comp : cb->components)
        for (const auto& line : comp)
          if (static_cast<int>(line.freq.size()) != dim)
            throw std::invalid_argument("SpectralDrift: comb frequency dimension mismatch");
    } else if (const auto* g = std::get_if<GriddedSymbol>(&kind)) {
      if (static_cast<int>(g->components.size()) != dim)
        throw std::invalid_argument("SpectralDrift: need one symbol array per component");
      for (const auto& comp : g->components)
        if (comp.size() != g->grid.total_points())
          throw std::invalid_argument("SpectralDrift: gridded symbol size mismatch");
      if (g->grid.dim != dim) throw std::invalid_argument("SpectralDrift: gridded symbol grid dimension mismatch");
      // Hermitian symmetry bhat(-z) = conj bhat(z): the drift is real.
      for (const auto& comp : g->components) {
        double worst = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < comp.size(); ++k) {
          worst = std::max(worst, std::abs(comp[k] - std::conj(comp[g->grid.mirror(k)])));
          scale = std::max(scale, std::abs(comp[k]));
        }
        if (worst > 1e-9 * std::max(scale, 1.0))
          throw std::invalid_argument("SpectralDrift: gridded symbol violates Hermitian symmetry");
      }
    } else if (const auto* s = std::get_if<SmoothDrift1D>(&kind)) {
      if (dim != 1) throw std::invalid_argument("SpectralDrift: smooth classical drifts are 1-d");
      if (s->derivatives.empty() || !s->derivatives[0])
        throw std::invalid_argument("SpectralDrift: smooth drift needs at least the order-0 callable");
    }
  }

  /// Symbol values of one component on a lattice (delta lines of combs and
  /// classical drifts are not lattice-representable).
  std::vector<cplx> sampled_symbol(int component, const core::FrequencyGrid& grid) const {
    if (const auto* c = std::get_if<ClosedFormSymbol>(&kind)) {
      std::vector<cplx> out(grid.total_points());
      for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = c->components[static_cast<std::size_t>(component)](grid.frequency(k));
      return out;
    }
    if (const auto* g = std::get_if<GriddedSymbol>(&kind)) {
      if (!(g->grid == grid))
        throw std::invalid_argument("SpectralDrift: symbol gridded on a different lattice");
      return g->components[static_cast<std::size_t>(component)];
    }
    throw std::invalid_argument("SpectralDrift: " + name() + " has no lattice symbol");
  }

  bool has_lattice_symbol() const {
    return std::holds_alternative<ClosedFormSymbol>(kind) || std::holds_alternative<GriddedSymbol>(kind);
  }

  /// Gaussian mollification b_eps = b * phi_eps: the symbol is damped by
  /// exp(-eps^2 |z|^2 / 2).
  SpectralDrift mollified(double eps) const {
    SpectralDrift out = *this;
    const double e2 = 0.5 * eps * eps;
    if (auto* c = std::get_if<ClosedFormSymbol>(&out.kind)) {
      for (auto& comp : c->components) {
        auto base = comp;
        comp = [base, e2](const std::vector<double>& z) {
          double n2 = 0.0;
          for (double zi : z) n2 += zi * zi;
          return base(z) * std::exp(-e2 * n2);
        };
      }
      c->name += "_eps";
      return out;
    }
    if (auto* cb = std::get_if<CombSymbol>(&out.kind)) {
      for (auto& comp : cb->components)
        for (auto& line : comp) {
          double n2 = 0.0;
          for (double zi : line.freq) n2 += zi * zi;
          line.coeff *= std::exp(-e2 * n2);
        }
      return out;
    }
    if (auto* g = std::get_if<GriddedSymbol>(&out.kind)) {
      for (auto& comp : g->components)
        for (std::size_t k = 0; k < comp.size(); ++k) comp[k] *= std::exp(-e2 * g->grid.norm_sq(k));
      return out;
    }
    throw std::invalid_argument("SpectralDrift: cannot mollify a classical drift spectrally");
  }
};

// ---- ready-made drifts ----

/// b = delta (Dirac at the origin): symbol identically 1. kappa = 0: the
/// pairing with a compactly supported local time makes weights irrelevant.
inline SpectralDrift dirac_drift(int dim = 1) {
  ClosedFormSymbol s;
  for (int c = 0; c < dim; ++c)
    s.components.push_back([](const std::vector<double>&) { return cplx(1.0, 0.0); });
  s.name = "dirac";
  SpectralDrift d;
  d.kind = std::move(s);
  d.dim = dim;
  d.kappa = 0.0;
  return d;
}

/// b = derivative of delta along an axis: symbol i z_axis.
inline SpectralDrift dirac_derivative_drift(int dim = 1, int axis = 0) {
  ClosedFormSymbol s;
  for (int c = 0; c < dim; ++c)
    s.components.push_back(
        [axis](const std::vector<double>& z) { return cplx(0.0, z[static_cast<std::size_t>(axis)]); });
  s.name = "dirac_derivative";
  SpectralDrift d;
  d.kind = std::move(s);
  d.dim = dim;
  d.kappa = 0.0;
  return d;
}

/// Gaussian density of width sigma: symbol exp(-sigma^2 |z|^2 / 2) (smooth,
/// integrable drift; useful as the generic "nice b").
inline SpectralDrift gaussian_drift(double sigma, int dim = 1) {
  ClosedFormSymbol s;
  const double s2 = 0.5 * sigma * sigma;
  for (int c = 0; c < dim; ++c)
    s.components.push_back([s2](const std::vector<double>& z) {
      double n2 = 0.0;
      for (double zi : z) n2 += zi * zi;
      return cplx(std::exp(-s2 * n2), 0.0);
    });
  s.name = "gaussian";
  SpectralDrift d;
  d.kind = std::move(s);
  d.dim = dim;
  d.kappa = 0.0;
  return d;
}

/// b(x) = amplitude * sin(freq * x) as a two-line comb (d = 1).
inline SpectralDrift sine_drift(double amplitude = 1.0, double freq = 1.0) {
  CombSymbol cb;
  cb.components.resize(1);
  cb.components[0].push_back({{freq}, cplx(0.0, -0.5 * amplitude)});
  cb.components[0].push_back({{-freq}, cplx(0.0, 0.5 * amplitude)});
  cb.name = "sine";
  SpectralDrift d;
  d.kind = std::move(cb);
  d.dim = 1;
  d.kappa = 0.0;
  d.besov = BesovTag{1.0, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  return d;
}

}  // namespace pathreg::averaging

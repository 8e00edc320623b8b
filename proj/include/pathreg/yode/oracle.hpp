#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

#include "pathreg/averaging/drift.hpp"
#include "pathreg/gauss/sample.hpp"

namespace pathreg::yode {

/// Pointwise evaluator b(x) for drifts with a classical realization (combs
/// and smooth 1-d drifts).
inline std::function<Eigen::VectorXd(const Eigen::VectorXd&)> classical_evaluator(
    const averaging::SpectralDrift& drift) {
  if (const auto* comb = std::get_if<averaging::CombSymbol>(&drift.kind)) {
    const auto lines = comb->components;
    const int d = drift.dim;
    return [lines, d](const Eigen::VectorXd& x) {
      Eigen::VectorXd out(d);
      for (int c = 0; c < d; ++c) {
        core::cplx acc(0.0, 0.0);
        for (const auto& line : lines[static_cast<std::size_t>(c)]) {
          double phase = 0.0;
          for (int a = 0; a < d; ++a) phase += line.freq[static_cast<std::size_t>(a)] * x(a);
          acc += line.coeff * std::polar(1.0, phase);
        }
        out(c) = acc.real();
      }
      return out;
    };
  }
  if (const auto* smooth = std::get_if<averaging::SmoothDrift1D>(&drift.kind)) {
    const auto f = smooth->derivatives.at(0);
    return [f](const Eigen::VectorXd& x) {
      Eigen::VectorXd out(1);
      out(0) = f(x(0));
      return out;
    };
  }
  throw std::invalid_argument("classical_evaluator: drift '" + drift.name() +
                              "' has no pointwise classical form");
}

/// High-order classical integration of ydot = b(y + w) treating the sampled w
/// as a known forcing, held at its left grid value within each cell (the same
/// reading of the data the LeftRiemann averaging quadrature uses). RK4 with
/// substeps per cell; the right-hand side is smooth inside each cell.
inline Eigen::MatrixXd classical_oracle(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& b,
                                        const gauss::SamplePath& path, const Eigen::VectorXd& x0,
                                        int substeps = 8) {
  const std::size_t n = path.grid.steps;
  const double h = path.grid.dt();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n) + 1, path.dimension);
  Eigen::VectorXd y = x0;
  out.row(0) = y.transpose();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd w = path.values.row(static_cast<Eigen::Index>(i)).transpose();
    auto f = [&](const Eigen::VectorXd& yy) { return b(yy + w); };
    const double dt = h / substeps;
    for (int s = 0; s < substeps; ++s) {
      const Eigen::VectorXd k1 = f(y);
      const Eigen::VectorXd k2 = f(y + 0.5 * dt * k1);
      const Eigen::VectorXd k3 = f(y + 0.5 * dt * k2);
      const Eigen::VectorXd k4 = f(y + dt * k3);
      y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.row(static_cast<Eigen::Index>(i) + 1) = y.transpose();
  }
  return out;
}

}  // namespace pathreg::yode

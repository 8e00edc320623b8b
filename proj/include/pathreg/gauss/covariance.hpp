#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathreg/core/grid.hpp"
#include "pathreg/gauss/model.hpp"

namespace pathreg::gauss {

/// Covariance matrix of one coordinate over the supplied times.
inline Eigen::MatrixXd covariance_matrix(const GaussianModel& model, const std::vector<double>& times) {
  model.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = model.covariance(times[static_cast<std::size_t>(j)], times[static_cast<std::size_t>(i)]);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

namespace detail {

/// Uniform-grid covariance of a Volterra model. Cov(t_j, t_i) for j <= i is
/// int_0^{t_j} k(u + (i-j) h) k(u) du; for each gap the integral is assembled
/// cell by cell (prefix sums over j), so every matrix entry shares the same
/// quadrature panels: one adaptive singular cell per gap plus fixed
/// Gauss-Kronrod panels on the smooth cells.
template <typename Kernel, typename Variance>
Eigen::MatrixXd volterra_grid_covariance(const Kernel& k, const Variance& closed_variance,
                                         const core::TimeGrid& grid, bool include_origin, double rel_tol) {
  const std::size_t n = grid.steps;
  const double h = grid.dt();
  const std::size_t off = include_origin ? 1 : 0;
  const Eigen::Index size = static_cast<Eigen::Index>(n + off);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(size, size);
  std::vector<double> cells(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const Eigen::Index d = static_cast<Eigen::Index>(j - 1 + off);
    K(d, d) = closed_variance(grid.time(j));
  }
  for (std::size_t g = 1; g < n; ++g) {
    const double gap = static_cast<double>(g) * h;
    auto f = [&](double u) { return k(u + gap) * k(u); };
    // first cell: substitution u = v^2 absorbs the kernel singularity at 0
    auto f0 = [&](double v) { return 2.0 * v * k(v * v + gap) * k(v * v); };
    cells[0] = core::integrate(f0, 0.0, std::sqrt(h), rel_tol, 1e-300);
    for (std::size_t l = 1; l + g < n; ++l)
      cells[l] = core::detail::gk15(f, static_cast<double>(l) * h, static_cast<double>(l + 1) * h).value;
    double acc = 0.0;
    for (std::size_t j = 1; j + g <= n; ++j) {
      acc += cells[j - 1];
      const Eigen::Index row = static_cast<Eigen::Index>(j - 1 + off);
      const Eigen::Index col = static_cast<Eigen::Index>(j - 1 + g + off);
      K(row, col) = acc;
      K(col, row) = acc;
    }
  }
  return K;
}

}  // namespace detail

inline Eigen::MatrixXd covariance_matrix(const GaussianModel& model, const core::TimeGrid& grid,
                                         bool include_origin = false) {
  if (const auto* p = std::get_if<PLogBmSpec>(&model.kind)) {
    model.validate();
    if (grid.horizon >= 1.0) throw std::domain_error("covariance_matrix: p-log BM grid must stay below t = 1");
    auto k = [pp = p->p](double u) { return std::sqrt(plog_kernel_sq(u, pp)); };
    auto var = [pp = p->p](double t) { return plog_variance(t, pp); };
    return detail::volterra_grid_covariance(k, var, grid, include_origin, model.quadrature_rel_tol);
  }
  if (const auto* c = std::get_if<CustomKernelSpec>(&model.kind); c && c->singular_at_zero) {
    model.validate();
    auto var = [&model](double t) { return model.covariance(t, t); };
    return detail::volterra_grid_covariance(c->kernel, var, grid, include_origin, model.quadrature_rel_tol);
  }
  std::vector<double> times;
  times.reserve(grid.points());
  for (std::size_t i = include_origin ? 0 : 1; i <= grid.steps; ++i) times.push_back(grid.time(i));
  return covariance_matrix(model, times);
}

struct CholeskyResult {
  Eigen::MatrixXd factor;   // lower triangular L with K + jitter*I = L L^T
  double jitter_used = 0.0; // absolute value added to the diagonal
};

/// Cholesky factorization with the declared jitter policy: a diagonal shift of
/// rel_jitter * trace/n is always added before factorizing (p-log covariance
/// matrices are severely ill-conditioned on fine grids); on failure the shift
/// escalates by 100x up to max_rel_jitter, then the model/grid is rejected
/// with the offending eigenvalue in the diagnostic.
inline CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& K, double rel_jitter = 1e-12,
                                           double max_rel_jitter = 1e-6) {
  const Eigen::Index n = K.rows();
  const double scale = K.trace() / static_cast<double>(n);
  double rel = rel_jitter;
  while (rel <= max_rel_jitter) {
    const double jitter = rel * scale;
    Eigen::MatrixXd shifted = K;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      return {Eigen::MatrixXd(llt.matrixL()), jitter};
    }
    rel *= 100.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
  throw std::runtime_error(
      "covariance factorization failed: matrix is not PSD within the jitter tolerance "
      "(smallest eigenvalue " +
      std::to_string(es.eigenvalues().minCoeff()) + ")");
}

}  // namespace pathreg::gauss

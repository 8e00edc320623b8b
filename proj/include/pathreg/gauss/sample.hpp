#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathreg/core/fft.hpp"
#include "pathreg/core/grid.hpp"
#include "pathreg/core/rng.hpp"
#include "pathreg/gauss/covariance.hpp"
#include "pathreg/gauss/model.hpp"

namespace pathreg::gauss {

/// A d-dimensional sample on a uniform grid, starting at the origin, with
/// provenance for exact reproduction.
struct SamplePath {
  core::TimeGrid grid;
  int dimension = 1;
  Eigen::MatrixXd values;  // (n+1) x d, values.row(0) == 0
  std::uint64_t seed = 0;
  std::string model_tag;

  Eigen::VectorXd component(int c) const { return values.col(c); }
};

namespace detail {

/// Davies-Harte circulant embedding for one coordinate of a stationary-
/// increment model. Returns the n increments; draws 2n normals from g.
inline std::vector<double> davies_harte_increments(const GaussianModel& model, std::size_t n,
                                                   core::GaussianSampler& g) {
  const double h = model.horizon / static_cast<double>(n);
  // Autocovariance of increments: r_k = Cov(w_{t+h}-w_t, w_{t+kh+h}-w_{t+kh}).
  std::vector<double> r(n + 1);
  auto variogram = [&](double lag) { return model.stationary_variogram(lag); };
  for (std::size_t k = 0; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    r[k] = 0.5 * (variogram((kk + 1.0) * h) + variogram(std::abs(kk - 1.0) * h)) - variogram(kk * h);
  }
  const std::size_t m = 2 * n;
  std::vector<core::cplx> row(m);
  for (std::size_t k = 0; k < n; ++k) row[k] = r[k];
  row[n] = r[n];
  for (std::size_t k = n + 1; k < m; ++k) row[k] = r[m - k];
  core::dft(row, -1);
  double min_eig = 0.0;
  for (auto& v : row) min_eig = std::min(min_eig, v.real());
  const double max_eig = [&] {
    double mx = 0.0;
    for (auto& v : row) mx = std::max(mx, v.real());
    return mx;
  }();
  if (min_eig < -1e-9 * max_eig)
    throw std::runtime_error("covariance factorization failed: circulant embedding eigenvalue " +
                             std::to_string(min_eig) + " is negative");
  std::vector<core::cplx> a(m);
  {
    const double l0 = std::max(row[0].real(), 0.0);
    const double ln = std::max(row[n].real(), 0.0);
    a[0] = std::sqrt(l0 / static_cast<double>(m)) * g.next();
    a[n] = std::sqrt(ln / static_cast<double>(m)) * g.next();
    for (std::size_t k = 1; k < n; ++k) {
      const double lk = std::max(row[k].real(), 0.0);
      const double s = std::sqrt(lk / static_cast<double>(2 * m));
      const double z1 = g.next();
      const double z2 = g.next();
      a[k] = core::cplx(s * z1, s * z2);
      a[m - k] = std::conj(a[k]);
    }
  }
  core::dft(a, -1);
  std::vector<double> inc(n);
  for (std::size_t k = 0; k < n; ++k) inc[k] = a[k].real();
  return inc;
}

}  // namespace detail

/// Exact-in-law Gaussian sample on the grid. Stationary-increment models use
/// circulant embedding; everything else factorizes the covariance matrix.
/// Identical (model, n, seed) yields bit-identical output.
inline SamplePath sample(const GaussianModel& model, std::size_t n, std::uint64_t seed) {
  model.validate();
  if (n < 2) throw std::invalid_argument("sample: need at least 2 steps");
  core::TimeGrid grid(model.horizon, n);
  SamplePath path;
  path.grid = grid;
  path.dimension = model.dimension;
  path.seed = seed;
  path.model_tag = model.tag();
  path.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) + 1, model.dimension);

  core::GaussianSampler g(seed);

  if (const auto* ser = std::get_if<FbmSeriesSpec>(&model.kind)) {
    // Sum of independent fBms, each sampled by circulant embedding.
    for (int c = 0; c < model.dimension; ++c) {
      for (std::size_t term = 0; term < ser->lambdas.size(); ++term) {
        GaussianModel single;
        single.kind = FbmSpec{ser->hursts[term]};
        single.horizon = model.horizon;
        const auto inc = detail::davies_harte_increments(single, n, g);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += ser->lambdas[term] * inc[i];
          path.values(static_cast<Eigen::Index>(i) + 1, c) += acc;
        }
      }
    }
    return path;
  }

  if (model.has_stationary_increments()) {
    for (int c = 0; c < model.dimension; ++c) {
      const auto inc = detail::davies_harte_increments(model, n, g);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += inc[i];
        path.values(static_cast<Eigen::Index>(i) + 1, c) = acc;
      }
    }
    return path;
  }

  // Dense route: factor the covariance over t_1..t_n once, share across
  // coordinates.
  const Eigen::MatrixXd K = covariance_matrix(model, grid, /*include_origin=*/false);
  const CholeskyResult chol = cholesky_with_jitter(K);
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));
  for (int c = 0; c < model.dimension; ++c) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = g.next();
    Eigen::VectorXd w = chol.factor.triangularView<Eigen::Lower>() * z;
    path.values.block(1, c, static_cast<Eigen::Index>(n), 1) = w;
  }
  return path;
}

/// Batch of independent samples with the deterministic seed split
/// seed_i = base_seed + i. Dense-route models factorize their covariance
/// once and share the factor across the batch.
inline std::vector<SamplePath> sample_batch(const GaussianModel& model, std::size_t n,
                                            std::uint64_t base_seed, std::size_t count) {
  model.validate();
  if (n < 2) throw std::invalid_argument("sample_batch: need at least 2 steps");
  std::vector<SamplePath> out;
  out.reserve(count);
  if (model.has_stationary_increments()) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(sample(model, n, core::split_seed(base_seed, i)));
    return out;
  }
  core::TimeGrid grid(model.horizon, n);
  const Eigen::MatrixXd K = covariance_matrix(model, grid, /*include_origin=*/false);
  const CholeskyResult chol = cholesky_with_jitter(K);
  for (std::size_t b = 0; b < count; ++b) {
    SamplePath path;
    path.grid = grid;
    path.dimension = model.dimension;
    path.seed = core::split_seed(base_seed, b);
    path.model_tag = model.tag();
    path.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) + 1, model.dimension);
    core::GaussianSampler g(path.seed);
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (int c = 0; c < model.dimension; ++c) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = g.next();
      path.values.block(1, c, static_cast<Eigen::Index>(n), 1) =
          chol.factor.triangularView<Eigen::Lower>() * z;
    }
    out.push_back(std::move(path));
  }
  return out;
}

/// Deterministic path w_r = a + b*r sampled on a grid; used by closed-form
/// local-time checks.
inline SamplePath linear_path(double a, double b, double T, std::size_t n, int dim = 1) {
  SamplePath path;
  path.grid = core::TimeGrid(T, n);
  path.dimension = dim;
  path.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) + 1, dim);
  for (std::size_t i = 0; i <= n; ++i)
    for (int c = 0; c < dim; ++c) path.values(static_cast<Eigen::Index>(i), c) = a + b * path.grid.time(i);
  path.model_tag = "linear";
  return path;
}

/// The zero path on a grid.
inline SamplePath zero_path(double T, std::size_t n, int dim = 1) {
  SamplePath path;
  path.grid = core::TimeGrid(T, n);
  path.dimension = dim;
  path.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) + 1, dim);
  path.model_tag = "zero";
  return path;
}

}  // namespace pathreg::gauss

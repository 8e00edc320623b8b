#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "pathreg/core/grid.hpp"
#include "pathreg/gauss/covariance.hpp"
#include "pathreg/gauss/model.hpp"

namespace pathreg::gauss {

/// Conditional law of one coordinate of w_r given the grid observations up to
/// s: the mean is the linear functional mean_weights . (w_{t_1},...,w_{t_k}),
/// the covariance is sigma2 * I_d (deterministic for Gaussian processes).
struct ConditionalLaw {
  Eigen::VectorXd mean_weights;
  double sigma2 = 0.0;
  double jitter_used = 0.0;
  int dimension = 1;

  /// Conditional mean for one coordinate, given the observed prefix
  /// (w_{t_1}, ..., w_{t_k}) of that coordinate.
  double mean(const Eigen::Ref<const Eigen::VectorXd>& prefix_values) const {
    if (prefix_values.size() != mean_weights.size())
      throw std::invalid_argument("ConditionalLaw: prefix length mismatch");
    return mean_weights.dot(prefix_values);
  }
};

/// Shared conditioning engine for a (model, grid) pair. One Cholesky of the
/// full-grid covariance provides every prefix factor as a leading block, so
/// all Schur complements derive from a single consistent factorization.
class PrefixConditioner {
 public:
  PrefixConditioner(const GaussianModel& model, const core::TimeGrid& grid)
      : grid_(grid), dim_(model.dimension) {
    model.validate();
    covj_ = covariance_matrix(model, grid, /*include_origin=*/false);
    const CholeskyResult res = cholesky_with_jitter(covj_);
    chol_ = res.factor;
    jitter_ = res.jitter_used;
    // The Schur algebra must stay consistent with the factorized matrix.
    covj_.diagonal().array() += jitter_;
  }

  const core::TimeGrid& grid() const { return grid_; }
  double jitter() const { return jitter_; }
  Eigen::Index size() const { return covj_.rows(); }

  /// Matrix index of a grid time t_i (t_0 = 0 is excluded; it carries no
  /// information since the process starts at the origin).
  Eigen::Index row_of(std::size_t grid_index) const {
    if (grid_index < 1 || grid_index > grid_.steps)
      throw std::invalid_argument("PrefixConditioner: grid index out of range");
    return static_cast<Eigen::Index>(grid_index) - 1;
  }

  /// sigma^2(r | F_s) and the mean weights, with prefix_len rows of
  /// conditioning (prefix_len = 0 means the trivial sigma-field).
  ConditionalLaw law(Eigen::Index prefix_len, Eigen::Index target_row) const {
    if (target_row < prefix_len) throw std::invalid_argument("PrefixConditioner: target must lie after the prefix");
    ConditionalLaw out;
    out.dimension = dim_;
    out.jitter_used = jitter_;
    if (prefix_len == 0) {
      out.mean_weights = Eigen::VectorXd::Zero(0);
      out.sigma2 = covj_(target_row, target_row);
      return out;
    }
    const auto L = chol_.topLeftCorner(prefix_len, prefix_len).triangularView<Eigen::Lower>();
    Eigen::VectorXd c = covj_.col(target_row).head(prefix_len);
    Eigen::VectorXd u = L.solve(c);
    out.sigma2 = covj_(target_row, target_row) - u.squaredNorm();
    out.mean_weights = L.transpose().solve(u);
    return out;
  }

  /// Conditional variances sigma^2(t_j | F_{t_s}) for the first max_count
  /// grid times after the prefix, batched through one triangular solve.
  Eigen::VectorXd variances_after(Eigen::Index prefix_len, Eigen::Index max_count = -1) const {
    const Eigen::Index n = size();
    Eigen::Index count = n - prefix_len;
    if (max_count >= 0) count = std::min(count, max_count);
    if (count <= 0) return Eigen::VectorXd();
    if (prefix_len == 0) return covj_.diagonal().head(count);
    const auto L = chol_.topLeftCorner(prefix_len, prefix_len).triangularView<Eigen::Lower>();
    Eigen::MatrixXd C = covj_.block(0, prefix_len, prefix_len, count);
    Eigen::MatrixXd U = L.solve(C);
    Eigen::VectorXd out(count);
    for (Eigen::Index j = 0; j < count; ++j)
      out(j) = covj_(prefix_len + j, prefix_len + j) - U.col(j).squaredNorm();
    return out;
  }

  /// Batched conditional laws of the count grid rows following the prefix:
  /// variances sigma^2(t_{prefix+j} | F_prefix) and the mean-weight matrix
  /// (column j holds the weights of target j), from one triangular solve.
  void window_laws(Eigen::Index prefix_len, Eigen::Index count, Eigen::MatrixXd& mean_weights,
                   Eigen::VectorXd& sigma2) const {
    const Eigen::Index n = size();
    count = std::min(count, n - prefix_len);
    sigma2.resize(count);
    if (prefix_len == 0) {
      mean_weights.resize(0, count);
      sigma2 = covj_.diagonal().head(count);
      return;
    }
    const auto L = chol_.topLeftCorner(prefix_len, prefix_len).triangularView<Eigen::Lower>();
    Eigen::MatrixXd U = L.solve(covj_.block(0, prefix_len, prefix_len, count));
    for (Eigen::Index j = 0; j < count; ++j)
      sigma2(j) = covj_(prefix_len + j, prefix_len + j) - U.col(j).squaredNorm();
    mean_weights = L.transpose().solve(U);
  }

  /// Conditional covariance matrix of the block (rows prefix_len..hi-1) given
  /// the first prefix_len observations, plus the mean map applied to a prefix:
  /// mean_map * prefix_values gives the conditional mean of the block.
  void block_law(Eigen::Index prefix_len, Eigen::Index hi, Eigen::MatrixXd& cond_cov,
                 Eigen::MatrixXd& mean_map) const {
    const Eigen::Index count = hi - prefix_len;
    if (count < 0) throw std::invalid_argument("PrefixConditioner: empty block");
    if (prefix_len == 0) {
      cond_cov = covj_.topLeftCorner(hi, hi);
      mean_map = Eigen::MatrixXd::Zero(hi, 0);
      return;
    }
    const auto L = chol_.topLeftCorner(prefix_len, prefix_len).triangularView<Eigen::Lower>();
    Eigen::MatrixXd C = covj_.block(0, prefix_len, prefix_len, count);  // prefix x block
    Eigen::MatrixXd U = L.solve(C);
    cond_cov = covj_.block(prefix_len, prefix_len, count, count) - U.transpose() * U;
    mean_map = L.transpose().solve(U).transpose();  // count x prefix
  }

  const Eigen::MatrixXd& covariance() const { return covj_; }
  const Eigen::MatrixXd& cholesky_factor() const { return chol_; }

 private:
  core::TimeGrid grid_;
  int dim_;
  Eigen::MatrixXd covj_;  // jittered covariance (factorized)
  Eigen::MatrixXd chol_;
  double jitter_ = 0.0;
};

/// Conditional law of w_r given F_s (grid observations up to and including s).
inline ConditionalLaw conditional_law(const GaussianModel& model, const core::TimeGrid& grid, double s,
                                      double r) {
  if (!(s < r)) throw std::invalid_argument("conditional_law: need s < r");
  PrefixConditioner cond(model, grid);
  const std::size_t is = grid.index_of(s);
  const std::size_t ir = grid.index_of(r);
  const Eigen::Index prefix_len = is == 0 ? 0 : cond.row_of(is) + 1;
  return cond.law(prefix_len, cond.row_of(ir));
}

}  // namespace pathreg::gauss

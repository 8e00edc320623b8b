#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pathreg/core/grid.hpp"

namespace pathreg::sewing {

using VecD = Eigen::VectorXd;

/// Two-parameter germ Xi on the simplex, with declared size/coherence
/// exponents. Xi_{s,s} must vanish.
struct Germ {
  std::function<VecD(double, double)> evaluate;
  int dim = 1;
  double alpha = 1.0;  // declared |Xi_{s,t}| ~ |t-s|^alpha
  double beta = 2.0;   // declared |delta_u Xi_{s,t}| ~ |t-s|^beta
};

inline VecD delta(const Germ& germ, double s, double u, double t) {
  return germ.evaluate(s, t) - germ.evaluate(s, u) - germ.evaluate(u, t);
}

/// Result of sewing a germ over dyadic partitions of [t0, t1].
struct SewnPath {
  double t0 = 0.0, t1 = 1.0;
  int achieved_refinement = 0;          // dyadic depth of the returned values
  std::vector<VecD> values;             // I(Xi)_{t0, t0 + (t1-t0) i/2^depth}, i = 0..2^depth
  std::vector<VecD> values_coarse;      // the depth-1 level, kept for extrapolation
  std::vector<double> level_diffs;      // sup |I_k - I_{k-1}| across levels
  double rate_estimate = 0.0;           // fitted beta_hat from level-diff ratios

  double time(std::size_t i) const {
    return t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(values.size() - 1);
  }
  VecD increment(std::size_t i, std::size_t j) const { return values[j] - values[i]; }

  /// Richardson extrapolation against the coarser level using the fitted
  /// rate: values live at the coarse resolution, with the leading
  /// 2^{-depth (beta-1)} error term cancelled. Falls back to the fine level
  /// when the fitted rate is too close to 1 to extrapolate.
  std::vector<VecD> extrapolated() const {
    const double r = std::pow(2.0, rate_estimate - 1.0);
    std::vector<VecD> out(values_coarse.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = r > 1.001 ? ((r * values[2 * i] - values_coarse[i]) / (r - 1.0)).eval() : values[2 * i];
    return out;
  }
};

struct DivergenceError : std::runtime_error {
  std::vector<double> level_diffs;
  explicit DivergenceError(const std::string& msg, std::vector<double> diffs)
      : std::runtime_error(msg), level_diffs(std::move(diffs)) {}
};

/// Compensated Riemann sums of the germ over dyadic partitions, to the
/// requested depth. Uniqueness of the sewing lets us refine along the
/// cheapest (dyadic) partition family; beta_hat is fitted from the last
/// level-difference ratios, and level differences that fail to shrink across
/// three consecutive levels raise a divergence error carrying the table.
inline SewnPath sew(const Germ& germ, double t0, double t1, int depth) {
  if (!(t1 > t0)) throw std::invalid_argument("sew: need t0 < t1");
  if (depth < 2) throw std::invalid_argument("sew: need depth >= 2");
  SewnPath out;
  out.t0 = t0;
  out.t1 = t1;
  out.achieved_refinement = depth;
  const double span = t1 - t0;

  std::vector<VecD> prev;  // running sums at the previous level
  int rising = 0;
  for (int level = 0; level <= depth; ++level) {
    const std::size_t cells = static_cast<std::size_t>(1) << level;
    std::vector<VecD> vals(cells + 1);
    vals[0] = VecD::Zero(germ.dim);
    for (std::size_t i = 0; i < cells; ++i) {
      const double a = t0 + span * static_cast<double>(i) / static_cast<double>(cells);
      const double b = t0 + span * static_cast<double>(i + 1) / static_cast<double>(cells);
      vals[i + 1] = vals[i] + germ.evaluate(a, b);
    }
    if (level > 0) {
      double diff = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < prev.size(); ++i) {
        diff = std::max(diff, (vals[2 * i] - prev[i]).template lpNorm<Eigen::Infinity>());
        scale = std::max(scale, vals[2 * i].template lpNorm<Eigen::Infinity>());
      }
      out.level_diffs.push_back(diff);
      const std::size_t nd = out.level_diffs.size();
      if (nd >= 2 && out.level_diffs[nd - 1] >= out.level_diffs[nd - 2] &&
          out.level_diffs[nd - 1] > 1e-13 * std::max(1.0, scale)) {
        if (++rising >= 3) {
          std::ostringstream os;
          os << "sew: germ is not coherent (level differences non-decreasing across 3 levels):";
          for (double d : out.level_diffs) os << " " << d;
          throw DivergenceError(os.str(), out.level_diffs);
        }
      } else {
        rising = 0;
      }
    }
    if (level == depth) {
      out.values_coarse = std::move(prev);
      out.values = std::move(vals);
    } else {
      prev = std::move(vals);
    }
  }

  // beta_hat from the geometric mean of the last (up to) 4 level-diff ratios;
  // early levels are pre-asymptotic.
  std::vector<double> ratios;
  for (std::size_t i = 1; i < out.level_diffs.size(); ++i)
    if (out.level_diffs[i] > 1e-300 && out.level_diffs[i - 1] > 1e-300)
      ratios.push_back(out.level_diffs[i - 1] / out.level_diffs[i]);
  if (!ratios.empty()) {
    const std::size_t take = std::min<std::size_t>(4, ratios.size());
    double logsum = 0.0;
    for (std::size_t i = ratios.size() - take; i < ratios.size(); ++i) logsum += std::log2(ratios[i]);
    out.rate_estimate = 1.0 + logsum / static_cast<double>(take);
  }
  return out;
}

struct CoherenceReport {
  double xi_norm = 0.0;        // sup |Xi_{s,t}| / |t-s|^alpha_hat
  double delta_norm = 0.0;     // sup |delta_u Xi_{s,t}| / |t-s|^beta_hat
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
};

/// Sup-quotients of the germ and its coherence defect over dyadic scales,
/// with exponents fitted by log-log regression across scales.
inline CoherenceReport coherence_norm(const Germ& germ, double t0, double t1, int levels = 8,
                                      int offsets = 16) {
  if (levels < 2) throw std::invalid_argument("coherence_norm: need >= 2 scales");
  const double span = t1 - t0;
  if ((static_cast<std::size_t>(1) << levels) < 16)
    throw std::invalid_argument("coherence_norm: need a grid of at least 16 points");
  std::vector<double> lh, lxi, ldelta;
  bool delta_alive = false;
  for (int level = 1; level <= levels; ++level) {
    const double h = span * std::pow(0.5, level);
    double sup_xi = 0.0, sup_delta = 0.0;
    for (int q = 0; q < offsets; ++q) {
      const double smax = span - h;
      const double s = t0 + (offsets == 1 ? 0.0 : smax * static_cast<double>(q) / (offsets - 1));
      sup_xi = std::max(sup_xi, germ.evaluate(s, s + h).template lpNorm<Eigen::Infinity>());
      sup_delta = std::max(sup_delta, delta(germ, s, s + 0.5 * h, s + h).template lpNorm<Eigen::Infinity>());
    }
    lh.push_back(std::log(h));
    lxi.push_back(std::log(std::max(sup_xi, 1e-300)));
    ldelta.push_back(std::log(std::max(sup_delta, 1e-300)));
    if (sup_delta > 1e-14 * std::max(1.0, sup_xi)) delta_alive = true;
  }
  auto slope = [](const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
  };
  CoherenceReport rep;
  rep.alpha_hat = slope(lh, lxi);
  rep.beta_hat = delta_alive ? slope(lh, ldelta) : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lh.size(); ++i) {
    rep.xi_norm = std::max(rep.xi_norm, std::exp(lxi[i] - rep.alpha_hat * lh[i]));
    if (delta_alive) rep.delta_norm = std::max(rep.delta_norm, std::exp(ldelta[i] - rep.beta_hat * lh[i]));
  }
  return rep;
}

}  // namespace pathreg::sewing

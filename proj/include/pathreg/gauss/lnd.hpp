#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pathreg/gauss/conditional.hpp"

namespace pathreg::gauss {

struct LndQuotient {
  std::size_t s_index = 0;  // grid index of s
  std::size_t t_index = 0;  // grid index of t
  double strong = 0.0;      // min eig cov(w_t|F_s) / (t-s)^{2 zeta}
  double weak = 0.0;        // min eig cov(w_t - w_s) / (t-s)^{2 zeta}
};

/// Table of local non-determinism quotients over grid pairs s < t, in the
/// strong (conditional, past sigma-field) and weak (increment) forms.
struct LndProfile {
  double zeta = 0.0;
  double tolerance = 1e-9;
  std::vector<LndQuotient> table;
  double strong_infimum = std::numeric_limits<double>::infinity();
  double weak_infimum = std::numeric_limits<double>::infinity();

  bool is_lnd_strong() const { return strong_infimum > tolerance; }
  bool is_lnd_weak() const { return weak_infimum > tolerance; }

  /// Min quotient over pairs with t - s <= max_lag grid steps.
  double near_diagonal_strong(std::size_t max_lag = 1) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& q : table)
      if (q.t_index - q.s_index <= max_lag) m = std::min(m, q.strong);
    return m;
  }
};

/// Evaluate the LND quotients for every grid pair with lag at most max_lag
/// (max_lag = 0 means all pairs). Coordinates are independent copies, so the
/// minimal eigenvalue of the conditional covariance is the scalar conditional
/// variance.
inline LndProfile lnd_profile(const GaussianModel& model, const core::TimeGrid& grid, double zeta,
                              std::size_t max_lag = 0, double tolerance = 1e-9) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("lnd_profile: zeta must lie in (0,1)");
  if (grid.points() < 3) throw std::invalid_argument("lnd_profile: need at least 3 grid points");
  PrefixConditioner cond(model, grid);
  LndProfile out;
  out.zeta = zeta;
  out.tolerance = tolerance;
  const std::size_t n = grid.steps;
  if (max_lag == 0) max_lag = n;
  for (std::size_t is = 0; is < n; ++is) {
    const Eigen::Index prefix_len = static_cast<Eigen::Index>(is);  // rows 0..is-1 = times t_1..t_is
    const Eigen::VectorXd sig2 = cond.variances_after(prefix_len, static_cast<Eigen::Index>(max_lag));
    const std::size_t it_hi = std::min(n, is + max_lag);
    for (std::size_t it = is + 1; it <= it_hi; ++it) {
      const double gap = grid.time(it) - grid.time(is);
      const double denom = std::pow(gap, 2.0 * zeta);
      LndQuotient q;
      q.s_index = is;
      q.t_index = it;
      q.strong = sig2(static_cast<Eigen::Index>(it - is) - 1) / denom;
      q.weak = model.increment_variance(grid.time(is), grid.time(it)) / denom;
      out.strong_infimum = std::min(out.strong_infimum, q.strong);
      out.weak_infimum = std::min(out.weak_infimum, q.weak);
      out.table.push_back(q);
    }
  }
  return out;
}

}  // namespace pathreg::gauss

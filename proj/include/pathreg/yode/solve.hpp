#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pathreg/sewing/sew.hpp"
#include "pathreg/yode/field.hpp"

namespace pathreg::yode {

enum class SolveStatus { Complete, Exploded, MaxIterations };

struct SolveConfig {
  double gamma_prime = 0.0;  // 0: pick automatically inside the admissible range
  double picard_tol = 1e-10;
  int max_picard_iters = 64;
  double step_factor = 0.5;        // target contraction for the envelope-based step size
  double contraction_accept = 0.9; // accepted subintervals must certify below this
  double explosion_threshold = 1e6;
  int extra_depth = 4;             // dyadic refinement below the path grid
  std::size_t max_cells = 0;       // cap on cells per subinterval (0: none)
  double picard_init_offset = 0.0; // shift of the constant initial guess (uniqueness probes)

  /// gamma' in (1-gamma, gamma) with gamma + delta(1-gamma') > 1 and
  /// gamma + (delta-1) gamma' > 1 (what the contraction argument needs).
  double resolve_gamma_prime(double gamma, double delta) const {
    double lo = std::max(1.0 - gamma, (1.0 - gamma) / (delta - 1.0));
    lo = std::nextafter(lo, 1.0);
    const double hi = gamma;
    double gp = gamma_prime;
    if (gp == 0.0) gp = 0.5 * (lo + hi);
    if (!(gp > 1.0 - gamma && gp < hi))
      throw std::invalid_argument("SolveConfig: gamma_prime outside (1-gamma, gamma)");
    if (!(gamma + delta * (1.0 - gp) > 1.0))
      throw std::invalid_argument("SolveConfig: exponents violate gamma + delta(1-gamma') > 1");
    if (!(gamma + (delta - 1.0) * gp > 1.0))
      throw std::invalid_argument("SolveConfig: exponents violate gamma + (delta-1) gamma' > 1");
    return gp;
  }

  void validate(double gamma, double delta) const {
    if (!(gamma > 0.5 && gamma <= 1.0)) throw std::invalid_argument("SolveConfig: gamma must lie in (1/2, 1]");
    if (!(delta * gamma > 1.0)) throw std::invalid_argument("SolveConfig: need delta * gamma > 1");
    if (!(picard_tol > 0.0)) throw std::invalid_argument("SolveConfig: picard_tol must be positive");
    if (max_picard_iters < 4) throw std::invalid_argument("SolveConfig: need max_picard_iters >= 4");
    if (extra_depth < 0 || extra_depth > 16) throw std::invalid_argument("SolveConfig: extra_depth out of range");
    (void)resolve_gamma_prime(gamma, delta);
  }
};

struct PicardLogEntry {
  int level = 0;
  double t0 = 0.0, t1 = 0.0;
  int iterations = 0;
  double contraction = 0.0;  // measured ||Gamma z - Gamma z~|| / ||z - z~||
  double tau_inverse = 0.0;  // 1 / subinterval length (local boundedness of T*(x)^{-1})
};

/// Solution trajectory with flow-derivative levels: level l holds grad^l y
/// flattened as [c * d^l + tau] per grid row. Frozen rows beyond t_star keep
/// the last accepted value.
struct FlowJet {
  core::TimeGrid grid;
  int dim = 1;
  int order = 0;
  SolveStatus status = SolveStatus::Complete;
  double t_star = 0.0;
  std::size_t last_index = 0;
  double gamma_prime_used = 0.0;
  std::vector<Eigen::MatrixXd> levels;
  std::vector<PicardLogEntry> contraction_log;
  double asymmetry_residual = 0.0;

  const Eigen::MatrixXd& trajectory() const { return levels[0]; }
};

namespace detail {

inline std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

inline const std::vector<std::vector<int>>& compositions(int l) {
  static std::vector<std::vector<std::vector<int>>> cache;  // cache[l] = compositions of l
  if (static_cast<int>(cache.size()) <= l) {
    for (int m = static_cast<int>(cache.size()); m <= l; ++m) {
      std::vector<std::vector<int>> comps;
      std::vector<int> cur;
      // ordered tuples of positive integers summing to m
      std::function<void(int)> rec = [&](int rest) {
        if (rest == 0) {
          comps.push_back(cur);
          return;
        }
        for (int first = 1; first <= rest; ++first) {
          cur.push_back(first);
          rec(rest - first);
          cur.pop_back();
        }
      };
      if (m > 0) rec(m);
      cache.push_back(std::move(comps));
    }
  }
  return cache[static_cast<std::size_t>(l)];
}

/// Germ of flow level l: Y^l_{u,v}(z^{<=l}) = sum over j and compositions
/// i_1+...+i_j = l of grad^j T_{u,v}(z^0)(z^{i_1} x ... x z^{i_j}).
inline void level_germ(const NonlinearField& field, int l, double u, double v,
                       const std::vector<const Eigen::VectorXd*>& z, Eigen::VectorXd& out) {
  const int d = field.dim();
  if (l == 0) {
    out.resize(d);
    field.jet(u, v, *z[0], 0, out.data());
    return;
  }
  const std::size_t dl = ipow(static_cast<std::size_t>(d), l);
  out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dl) * d);
  std::vector<std::vector<double>> jets(static_cast<std::size_t>(l) + 1);
  for (int j = 1; j <= l; ++j) jets[static_cast<std::size_t>(j)] = field.jet_v(u, v, *z[0], j);
  for (const auto& comp : compositions(l)) {
    const int j = static_cast<int>(comp.size());
    const auto& jet = jets[static_cast<std::size_t>(j)];
    const std::size_t dj = ipow(static_cast<std::size_t>(d), j);
    for (int c = 0; c < d; ++c) {
      for (std::size_t aflat = 0; aflat < dj; ++aflat) {
        const double coeff = jet[static_cast<std::size_t>(c) * dj + aflat];
        if (coeff == 0.0) continue;
        // digits of aflat, most significant first
        int adig[8];
        std::size_t rest = aflat;
        for (int m = j - 1; m >= 0; --m) {
          adig[m] = static_cast<int>(rest % static_cast<std::size_t>(d));
          rest /= static_cast<std::size_t>(d);
        }
        // odometer over the beta blocks
        std::size_t bdim[8];
        std::size_t bidx[8];
        for (int m = 0; m < j; ++m) {
          bdim[m] = ipow(static_cast<std::size_t>(d), comp[static_cast<std::size_t>(m)]);
          bidx[m] = 0;
        }
        while (true) {
          double prod = coeff;
          std::size_t tau = 0;
          for (int m = 0; m < j; ++m) {
            const auto& zi = *z[static_cast<std::size_t>(comp[static_cast<std::size_t>(m)])];
            prod *= zi(static_cast<Eigen::Index>(static_cast<std::size_t>(adig[m]) * bdim[m] + bidx[m]));
            tau = tau * bdim[m] + bidx[m];
          }
          out(static_cast<Eigen::Index>(static_cast<std::size_t>(c) * dl + tau)) += prod;
          int m = j - 1;
          while (m >= 0 && ++bidx[m] == bdim[m]) bidx[m--] = 0;
          if (m < 0) break;
        }
      }
    }
  }
}

/// Symmetrize a level-l tensor state over its l lower indices; returns the
/// asymmetry residual that was removed.
inline double symmetrize_level(Eigen::VectorXd& state, int d, int l) {
  if (l < 2 || d < 2) return 0.0;
  const std::size_t dl = ipow(static_cast<std::size_t>(d), l);
  std::vector<int> digits(static_cast<std::size_t>(l));
  std::vector<int> perm(static_cast<std::size_t>(l));
  double residual = 0.0;
  Eigen::VectorXd sym = Eigen::VectorXd::Zero(state.size());
  for (int c = 0; c < d; ++c) {
    for (std::size_t tau = 0; tau < dl; ++tau) {
      std::size_t rest = tau;
      for (int m = l - 1; m >= 0; --m) {
        digits[static_cast<std::size_t>(m)] = static_cast<int>(rest % static_cast<std::size_t>(d));
        rest /= static_cast<std::size_t>(d);
      }
      for (int m = 0; m < l; ++m) perm[static_cast<std::size_t>(m)] = m;
      double acc = 0.0;
      std::size_t count = 0;
      std::sort(perm.begin(), perm.end());
      do {
        std::size_t ptau = 0;
        for (int m = 0; m < l; ++m)
          ptau = ptau * static_cast<std::size_t>(d) +
                 static_cast<std::size_t>(digits[static_cast<std::size_t>(perm[static_cast<std::size_t>(m)])]);
        acc += state(static_cast<Eigen::Index>(static_cast<std::size_t>(c) * dl + ptau));
        ++count;
      } while (std::next_permutation(perm.begin(), perm.end()));
      sym(static_cast<Eigen::Index>(static_cast<std::size_t>(c) * dl + tau)) =
          acc / static_cast<double>(count);
    }
  }
  residual = (state - sym).lpNorm<Eigen::Infinity>();
  state = sym;
  return residual;
}

struct PicardOutcome {
  bool converged = false;
  int iterations = 0;
  double contraction = 0.0;
  double asymmetry = 0.0;
};

/// Picard iteration of Gamma(z)_t = z_a + int_a^t Y^l_{dr}(z_r) over the
/// dyadic points [i0, i1] of a subinterval (times supplied), writing the
/// fixed point into state[l][i0..i1]. Lower levels must already be solved on
/// those points.
inline PicardOutcome picard_level(const NonlinearField& field, int l, const std::vector<double>& times,
                                  std::size_t i0, std::size_t i1, std::vector<std::vector<Eigen::VectorXd>>& state,
                                  const SolveConfig& cfg) {
  PicardOutcome res;
  const Eigen::VectorXd z_init = state[static_cast<std::size_t>(l)][i0];
  Eigen::VectorXd guess = z_init;
  if (cfg.picard_init_offset != 0.0) guess.array() += cfg.picard_init_offset;
  std::vector<Eigen::VectorXd> cur(i1 - i0 + 1, guess);
  cur[0] = z_init;
  std::vector<Eigen::VectorXd> next(i1 - i0 + 1);
  std::vector<const Eigen::VectorXd*> zptr(static_cast<std::size_t>(l) + 1);
  double prev_diff = -1.0;
  Eigen::VectorXd germ;
  for (int iter = 1; iter <= cfg.max_picard_iters; ++iter) {
    next[0] = z_init;
    for (std::size_t i = i0; i < i1; ++i) {
      for (int ll = 0; ll < l; ++ll) zptr[static_cast<std::size_t>(ll)] = &state[static_cast<std::size_t>(ll)][i];
      zptr[static_cast<std::size_t>(l)] = &cur[i - i0];
      level_germ(field, l, times[i], times[i + 1], zptr, germ);
      next[i - i0 + 1] = next[i - i0] + germ;
    }
    if (l >= 2 && field.dim() >= 2)
      for (auto& v : next) res.asymmetry = std::max(res.asymmetry, symmetrize_level(v, field.dim(), l));
    double diff = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i)
      diff = std::max(diff, (next[i] - cur[i]).lpNorm<Eigen::Infinity>());
    cur.swap(next);
    res.iterations = iter;
    if (prev_diff > 10.0 * cfg.picard_tol && diff > 0.0)
      res.contraction = std::max(res.contraction, diff / prev_diff);
    if (diff < cfg.picard_tol) {
      res.converged = true;
      break;
    }
    prev_diff = diff;
  }
  if (res.converged && res.contraction < 1.0) {
    for (std::size_t i = i0; i <= i1; ++i) state[static_cast<std::size_t>(l)][i] = cur[i - i0];
  }
  return res;
}

/// Measured envelope sup over a ball of (|Y_{a,b}| + |grad Y_{a,b}|) /
/// (b-a)^gamma, probed at the center and along the axes.
inline double measured_envelope(const NonlinearField& field, double a, double b, const Eigen::VectorXd& x,
                                double radius) {
  const int d = field.dim();
  std::vector<Eigen::VectorXd> probes{x};
  for (int ax = 0; ax < d; ++ax)
    for (double r : {0.5 * radius, radius})
      for (double sg : {-1.0, 1.0}) {
        Eigen::VectorXd p = x;
        p(ax) += sg * r;
        probes.push_back(p);
      }
  double g = 0.0;
  std::size_t evaluated = 0;
  for (const auto& p : probes) {
    try {
      double v = field.value(a, b, p).lpNorm<Eigen::Infinity>();
      if (field.max_jet_order() >= 1) {
        const auto j1 = field.jet_v(a, b, p, 1);
        for (double e : j1) v = std::max(v, std::abs(e));
      }
      g = std::max(g, v);
      ++evaluated;
    } catch (const std::domain_error&) {
      // probe outside the field's box; skip
    }
  }
  if (evaluated == 0) throw std::domain_error("measured_envelope: every probe left the field's domain");
  return g / std::pow(b - a, field.gamma());
}

}  // namespace detail

/// Nonlinear Young integral int_s^t Y_{dr}(y_r) via sewing of the germ
/// Y_{u,v}(y_u) over dyadic partitions. y is sampled at the dyadic points.
inline Eigen::VectorXd nonlinear_young_integral(const NonlinearField& field,
                                                const std::function<Eigen::VectorXd(double)>& y, double s,
                                                double t, int depth = 12) {
  field.check_exponents();
  // measured Hoelder check of y against the field's exponents
  {
    const double gp_needed = 1.0 - field.gamma();
    double worst = 0.0;
    const int probes = 16;
    for (int lev = 1; lev <= 4; ++lev) {
      const double h = (t - s) * std::pow(0.5, lev);
      for (int q = 0; q < probes; ++q) {
        const double a = s + (t - s - h) * static_cast<double>(q) / (probes - 1);
        const double quot = (y(a + h) - y(a)).lpNorm<Eigen::Infinity>() / std::pow(h, gp_needed + 0.05);
        worst = std::max(worst, quot);
      }
    }
    if (!std::isfinite(worst))
      throw std::invalid_argument("nonlinear_young_integral: y fails the Hoelder quotient check");
  }
  sewing::Germ germ;
  germ.dim = field.dim();
  germ.alpha = field.gamma();
  germ.beta = field.gamma() + (1.0 - field.gamma()) + 0.05;
  germ.evaluate = [&](double u, double v) { return field.value(u, v, y(u)); };
  const auto sewn = sewing::sew(germ, s, t, depth);
  return sewn.values.back();
}

/// Solve the lower-triangular flow system for (y, grad y, ..., grad^k y) by
/// Picard continuation. Level 0 is the scalar solve; higher levels are
/// affine and reuse level-0 subintervals (splitting internally if needed), so
/// the level-0 trajectory is bit-identical for every k under a fixed config.
inline FlowJet solve_flow(const NonlinearField& field, const Eigen::VectorXd& x, int k,
                          const SolveConfig& cfg = {},
                          const std::vector<Eigen::VectorXd>& custom_init = {}) {
  field.check_exponents();
  cfg.validate(field.gamma(), field.delta());
  if (k < 0) throw std::invalid_argument("solve_flow: negative jet order");
  if (field.max_jet_order() < k + 1)
    throw std::invalid_argument("solve_flow: field must provide jets to order k+1 = " +
                                std::to_string(k + 1));
  if (x.size() != field.dim()) throw std::invalid_argument("solve_flow: initial condition dimension mismatch");
  if (!custom_init.empty() && custom_init.size() != static_cast<std::size_t>(k) + 1)
    throw std::invalid_argument("solve_flow: custom initial data must cover levels 0..k");

  const core::TimeGrid& grid = field.grid();
  const int d = field.dim();
  const std::size_t n = grid.steps;

  FlowJet jet;
  jet.grid = grid;
  jet.dim = d;
  jet.order = k;
  jet.t_star = grid.horizon;
  jet.last_index = n;
  jet.gamma_prime_used = cfg.resolve_gamma_prime(field.gamma(), field.delta());
  jet.levels.resize(static_cast<std::size_t>(k) + 1);
  std::vector<Eigen::VectorXd> init(static_cast<std::size_t>(k) + 1);
  for (int l = 0; l <= k; ++l) {
    const std::size_t dl1 = detail::ipow(static_cast<std::size_t>(d), l) * static_cast<std::size_t>(d);
    jet.levels[static_cast<std::size_t>(l)] =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) + 1, static_cast<Eigen::Index>(dl1));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dl1));
    if (l == 0) v = x;
    if (l == 1)
      for (int c = 0; c < d; ++c) v(static_cast<Eigen::Index>(c) * d + c) = 1.0;  // identity jet
    if (!custom_init.empty() && l >= 1) {
      if (custom_init[static_cast<std::size_t>(l)].size() != v.size())
        throw std::invalid_argument("solve_flow: custom initial data has the wrong size at level " +
                                    std::to_string(l));
      v = custom_init[static_cast<std::size_t>(l)];
    }
    init[static_cast<std::size_t>(l)] = v;
    jet.levels[static_cast<std::size_t>(l)].row(0) = v.transpose();
  }

  const double h = grid.dt();
  std::size_t cursor = 0;  // grid index reached so far
  std::vector<Eigen::VectorXd> carry = init;

  while (cursor < n) {
    const std::size_t remaining = n - cursor;
    // envelope-based step guess on the ball B_{2|x|} around the current state
    std::size_t cells;
    {
      const double radius = std::max(1.0, carry[0].lpNorm<Eigen::Infinity>());
      const double probe_end = std::min(grid.horizon, grid.time(cursor) + static_cast<double>(remaining) * h);
      const double env = detail::measured_envelope(field, grid.time(cursor), probe_end, carry[0], radius);
      double tau = grid.horizon;
      if (env > 0.0) {
        const double gp = jet.gamma_prime_used;
        const double e1 = std::pow(cfg.step_factor / env, 1.0 / std::max(1e-9, field.gamma() + gp - 1.0));
        const double e2 = std::pow(cfg.step_factor / env, 1.0 / gp);
        tau = std::min(e1, e2);
      }
      std::size_t want = static_cast<std::size_t>(std::max(1.0, std::floor(tau / h)));
      want = std::min(want, remaining);
      if (cfg.max_cells > 0) want = std::min(want, cfg.max_cells);
      cells = 1;
      while (cells * 2 <= want) cells *= 2;
    }

    bool accepted = false;
    while (!accepted) {
      const int depth = cfg.extra_depth + static_cast<int>(std::log2(static_cast<double>(cells)));
      const std::size_t pts = (static_cast<std::size_t>(1) << depth);
      std::vector<double> times(pts + 1);
      const double a = grid.time(cursor);
      const double b = grid.time(cursor + cells);
      for (std::size_t i = 0; i <= pts; ++i)
        times[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(pts);
      std::vector<std::vector<Eigen::VectorXd>> state(static_cast<std::size_t>(k) + 1);
      for (int l = 0; l <= k; ++l)
        state[static_cast<std::size_t>(l)].assign(pts + 1, carry[static_cast<std::size_t>(l)]);

      const auto out0 = detail::picard_level(field, 0, times, 0, pts, state, cfg);
      jet.contraction_log.push_back({0, a, b, out0.iterations,
                                     out0.contraction, 1.0 / (b - a)});
      if (!out0.converged || out0.contraction >= cfg.contraction_accept) {
        if (cells == 1) {
          jet.status = SolveStatus::MaxIterations;
          jet.t_star = a;
          jet.last_index = cursor;
          return jet;
        }
        cells /= 2;
        jet.contraction_log.back().level = -1;  // rejected attempt
        continue;
      }

      // higher levels: affine equations on the same dyadic points, with
      // recursive halving that never touches level 0
      bool levels_ok = true;
      for (int l = 1; l <= k && levels_ok; ++l) {
        std::function<bool(std::size_t, std::size_t)> solve_rec = [&](std::size_t i0, std::size_t i1) -> bool {
          const auto out = detail::picard_level(field, l, times, i0, i1, state, cfg);
          if (out.converged && out.contraction < cfg.contraction_accept) {
            jet.asymmetry_residual = std::max(jet.asymmetry_residual, out.asymmetry);
            jet.contraction_log.push_back({l, times[i0], times[i1], out.iterations, out.contraction,
                                           1.0 / (times[i1] - times[i0])});
            return true;
          }
          if (i1 - i0 < 2) return false;
          const std::size_t mid = i0 + (i1 - i0) / 2;
          return solve_rec(i0, mid) && solve_rec(mid, i1);
        };
        levels_ok = solve_rec(0, pts);
      }
      if (!levels_ok) {
        jet.status = SolveStatus::MaxIterations;
        jet.t_star = a;
        jet.last_index = cursor;
        return jet;
      }

      // write grid rows and check explosion on the level-0 trajectory
      const std::size_t stride = pts / cells;
      for (std::size_t cidx = 1; cidx <= cells; ++cidx) {
        const std::size_t row = cursor + cidx;
        for (int l = 0; l <= k; ++l)
          jet.levels[static_cast<std::size_t>(l)].row(static_cast<Eigen::Index>(row)) =
              state[static_cast<std::size_t>(l)][cidx * stride].transpose();
        if (state[0][cidx * stride].lpNorm<Eigen::Infinity>() >= cfg.explosion_threshold) {
          jet.status = SolveStatus::Exploded;
          jet.t_star = grid.time(row);
          jet.last_index = row;
          // freeze later rows at the last value
          for (std::size_t r = row + 1; r <= n; ++r)
            for (int l = 0; l <= k; ++l)
              jet.levels[static_cast<std::size_t>(l)].row(static_cast<Eigen::Index>(r)) =
                  jet.levels[static_cast<std::size_t>(l)].row(static_cast<Eigen::Index>(row));
          return jet;
        }
      }
      for (int l = 0; l <= k; ++l) carry[static_cast<std::size_t>(l)] = state[static_cast<std::size_t>(l)][pts];
      cursor += cells;
      accepted = true;
    }
  }
  return jet;
}

inline FlowJet solve(const NonlinearField& field, const Eigen::VectorXd& x, const SolveConfig& cfg = {}) {
  return solve_flow(field, x, 0, cfg);
}

/// Translate back to the perturbed equation: y~ = y + w on the shared grid.
inline Eigen::MatrixXd reconstruct_solution(const FlowJet& jet, const gauss::SamplePath& path) {
  if (!(jet.grid == path.grid)) throw std::invalid_argument("reconstruct_solution: grid mismatch");
  if (jet.dim != path.dimension) throw std::invalid_argument("reconstruct_solution: dimension mismatch");
  return jet.levels[0] + path.values;
}

/// Measured Hoelder quotient sup |y_{s,t}| / |t-s|^gamma over dyadic pairs.
inline double holder_quotient(const Eigen::MatrixXd& values, const core::TimeGrid& grid, double gamma,
                              int levels = 8, int offsets = 32) {
  double worst = 0.0;
  for (int lev = 1; lev <= levels; ++lev) {
    const std::size_t span = grid.steps >> lev;
    if (span == 0) break;
    for (int q = 0; q < offsets; ++q) {
      const std::size_t smax = grid.steps - span;
      const std::size_t si = offsets == 1 ? 0 : smax * static_cast<std::size_t>(q) / (offsets - 1);
      const double num = (values.row(static_cast<Eigen::Index>(si + span)) - values.row(static_cast<Eigen::Index>(si)))
                             .lpNorm<Eigen::Infinity>();
      worst = std::max(worst, num / std::pow(grid.dt() * static_cast<double>(span), gamma));
    }
  }
  return worst;
}

}  // namespace pathreg::yode

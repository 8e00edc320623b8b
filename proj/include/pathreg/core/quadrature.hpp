#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace pathreg::core {

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (positive half; symmetric).
inline constexpr double gk_nodes[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813};
inline constexpr double gk_wk[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double gk_wg[4] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870};

struct PanelResult {
  double value;
  double error;
};

template <typename F>
PanelResult gk15(const F& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  const double f0 = f(c);
  double kron = gk_wk[0] * f0;
  double gauss = gk_wg[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = h * gk_nodes[i];
    const double fs = f(c - dx) + f(c + dx);
    kron += gk_wk[i] * fs;
    if (i % 2 == 0) gauss += gk_wg[i / 2] * fs;
  }
  kron *= h;
  gauss *= h;
  const double diff = std::abs(kron - gauss);
  return {kron, diff};
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double rel_tol, double abs_tol, int depth) {
  const PanelResult r = gk15(f, a, b);
  if (depth <= 0) return r.value;
  if (r.error <= abs_tol || r.error <= rel_tol * std::abs(r.value)) return r.value;
  const double c = 0.5 * (a + b);
  return adaptive_gk(f, a, c, rel_tol, abs_tol * 0.5, depth - 1) +
         adaptive_gk(f, c, b, rel_tol, abs_tol * 0.5, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a,b].
template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 1e-14,
                 int max_depth = 40) {
  if (!(b >= a)) throw std::invalid_argument("integrate: bad interval");
  if (a == b) return 0.0;
  return detail::adaptive_gk(f, a, b, rel_tol, abs_tol, max_depth);
}

}  // namespace pathreg::core

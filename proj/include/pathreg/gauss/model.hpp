#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pathreg/core/quadrature.hpp"

namespace pathreg::gauss {

/// Fractional Brownian motion with Hurst exponent H in (0,1).
/// Cov(w_s, w_t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2.
struct FbmSpec {
  double hurst = 0.5;
};

/// Gaussian Volterra process w_t = int_0^t k(t-s) dB_s with the kernel
/// k(u) = |u ln(1/u)^{2p}|^{-1/2}. The kernel is non-integrable at u = 1,
/// so the horizon must satisfy T < 1.
struct PLogBmSpec {
  double p = 2.0;
};

/// Finite sum of independent fBms: w = sum_n lambda_n B^{H_n}.
struct FbmSeriesSpec {
  std::vector<double> lambdas;
  std::vector<double> hursts;
};

/// User-supplied square-integrable Volterra kernel, w_t = int_0^t k(t-s) dB_s.
struct CustomKernelSpec {
  std::function<double(double)> kernel;
  std::string name = "custom";
  bool singular_at_zero = true;  // hint for the quadrature substitution
};

inline double plog_kernel_sq(double u, double p) {
  // k(u)^2 = 1 / (u * ln(1/u)^{2p}) on (0,1)
  const double l = std::log(1.0 / u);
  return 1.0 / (u * std::pow(l, 2.0 * p));
}

/// Closed form int_0^t k(u)^2 du = (2p-1)^{-1} ln(1/t)^{1-2p}.
inline double plog_variance(double t, double p) {
  if (t <= 0.0) return 0.0;
  return std::pow(std::log(1.0 / t), 1.0 - 2.0 * p) / (2.0 * p - 1.0);
}

inline double fbm_covariance(double H, double s, double t) {
  const double a = std::pow(std::abs(s), 2.0 * H);
  const double b = std::pow(std::abs(t), 2.0 * H);
  const double c = std::pow(std::abs(t - s), 2.0 * H);
  return 0.5 * (a + b - c);
}

namespace detail {

/// Cov(w_s, w_t) = int_0^{s^t} k(t-r) k(s-r) dr for a Volterra kernel,
/// evaluated as int_0^{min} k(u + |t-s|) k(u) du with the substitution
/// u = v^2 to absorb an inverse-square-root singularity at u = 0.
inline double volterra_covariance(const std::function<double(double)>& k, double s, double t,
                                  bool singular, double rel_tol) {
  if (s > t) std::swap(s, t);
  if (s <= 0.0) return 0.0;
  const double gap = t - s;
  if (singular) {
    const double vmax = std::sqrt(s);
    auto g = [&](double v) { return 2.0 * v * k(v * v + gap) * k(v * v); };
    return core::integrate(g, 0.0, vmax, rel_tol, 1e-300);
  }
  auto g = [&](double u) { return k(u + gap) * k(u); };
  return core::integrate(g, 0.0, s, rel_tol, 1e-300);
}

}  // namespace detail

/// Declarative description of a centered Gaussian process with d independent
/// coordinates on [0, T]. All covariances below are per coordinate.
struct GaussianModel {
  std::variant<FbmSpec, PLogBmSpec, FbmSeriesSpec, CustomKernelSpec> kind = FbmSpec{};
  int dimension = 1;
  double horizon = 1.0;
  double quadrature_rel_tol = 1e-8;

  void validate() const {
    if (dimension < 1) throw std::invalid_argument("GaussianModel: dimension must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("GaussianModel: horizon must be positive");
    if (const auto* f = std::get_if<FbmSpec>(&kind)) {
      if (!(f->hurst > 0.0 && f->hurst < 1.0))
        throw std::invalid_argument("GaussianModel: fBm Hurst exponent must lie in (0,1)");
    } else if (const auto* p = std::get_if<PLogBmSpec>(&kind)) {
      if (!(p->p > 0.5)) throw std::invalid_argument("GaussianModel: p-log BM requires p > 1/2");
      if (!(horizon < 1.0))
        throw std::domain_error(
            "GaussianModel: p-log BM requires horizon T < 1 (kernel not integrable at 1)");
    } else if (const auto* s = std::get_if<FbmSeriesSpec>(&kind)) {
      if (s->lambdas.empty() || s->lambdas.size() != s->hursts.size())
        throw std::invalid_argument("GaussianModel: fBm series needs matching non-empty lambda/Hurst lists");
      for (double l : s->lambdas)
        if (!(l > 0.0)) throw std::invalid_argument("GaussianModel: fBm series weights must be positive");
      for (double h : s->hursts)
        if (!(h > 0.0 && h < 1.0))
          throw std::invalid_argument("GaussianModel: fBm series Hurst exponents must lie in (0,1)");
    } else if (const auto* c = std::get_if<CustomKernelSpec>(&kind)) {
      if (!c->kernel) throw std::invalid_argument("GaussianModel: custom kernel is empty");
    }
  }

  /// Per-coordinate covariance Cov(w_s, w_t), s,t in [0,T].
  double covariance(double s, double t) const {
    if (s < 0.0 || t < 0.0 || s > horizon + 1e-12 || t > horizon + 1e-12)
      throw std::domain_error("GaussianModel: covariance argument outside [0,T]");
    if (std::holds_alternative<PLogBmSpec>(kind) && (s >= 1.0 || t >= 1.0))
      throw std::domain_error("GaussianModel: p-log BM grid must stay below t = 1");
    if (s == 0.0 || t == 0.0) return 0.0;
    if (const auto* f = std::get_if<FbmSpec>(&kind)) {
      return fbm_covariance(f->hurst, s, t);
    }
    if (const auto* p = std::get_if<PLogBmSpec>(&kind)) {
      if (s == t) return plog_variance(t, p->p);
      auto k = [pp = p->p](double u) { return std::sqrt(plog_kernel_sq(u, pp)); };
      return detail::volterra_covariance(k, s, t, true, quadrature_rel_tol);
    }
    if (const auto* ser = std::get_if<FbmSeriesSpec>(&kind)) {
      double acc = 0.0;
      for (std::size_t n = 0; n < ser->lambdas.size(); ++n)
        acc += ser->lambdas[n] * ser->lambdas[n] * fbm_covariance(ser->hursts[n], s, t);
      return acc;
    }
    const auto& c = std::get<CustomKernelSpec>(kind);
    if (s == t) {
      auto k2 = [&](double u) { return c.kernel(u) * c.kernel(u); };
      if (c.singular_at_zero) {
        auto g = [&](double v) { return 2.0 * v * k2(v * v); };
        return core::integrate(g, 0.0, std::sqrt(t), quadrature_rel_tol, 1e-300);
      }
      return core::integrate(k2, 0.0, t, quadrature_rel_tol, 1e-300);
    }
    return detail::volterra_covariance(c.kernel, s, t, c.singular_at_zero, quadrature_rel_tol);
  }

  /// Var(w_t - w_s) per coordinate.
  double increment_variance(double s, double t) const {
    return covariance(s, s) + covariance(t, t) - 2.0 * covariance(s, t);
  }

  bool has_stationary_increments() const {
    return std::holds_alternative<FbmSpec>(kind) || std::holds_alternative<FbmSeriesSpec>(kind);
  }

  /// Var(w_{t+lag} - w_t) for stationary-increment models, valid for any
  /// lag >= 0 (no horizon check; circulant embedding needs lags up to 2T).
  double stationary_variogram(double lag) const {
    if (lag <= 0.0) return 0.0;
    if (const auto* f = std::get_if<FbmSpec>(&kind)) return std::pow(lag, 2.0 * f->hurst);
    if (const auto* s = std::get_if<FbmSeriesSpec>(&kind)) {
      double acc = 0.0;
      for (std::size_t n = 0; n < s->lambdas.size(); ++n)
        acc += s->lambdas[n] * s->lambdas[n] * std::pow(lag, 2.0 * s->hursts[n]);
      return acc;
    }
    throw std::logic_error("stationary_variogram: model does not have stationary increments");
  }

  std::string tag() const {
    std::ostringstream os;
    if (const auto* f = std::get_if<FbmSpec>(&kind)) {
      os << "fbm(H=" << f->hurst << ")";
    } else if (const auto* p = std::get_if<PLogBmSpec>(&kind)) {
      os << "plog(p=" << p->p << ")";
    } else if (const auto* s = std::get_if<FbmSeriesSpec>(&kind)) {
      os << "fbm_series(n=" << s->lambdas.size() << ")";
    } else {
      os << std::get<CustomKernelSpec>(kind).name;
    }
    os << ",d=" << dimension << ",T=" << horizon;
    return os.str();
  }

  /// Truncating an in principle infinite series forfeits the tail
  /// sum_{n>=N} lambda_n^2 t^{2H_n} <= sum lambda_n^2 T^{2 min H}; we report
  /// the last retained term's weight as a proxy for what was dropped.
  double series_tail_weight() const {
    if (const auto* s = std::get_if<FbmSeriesSpec>(&kind)) {
      return s->lambdas.back() * s->lambdas.back();
    }
    return 0.0;
  }
};

}  // namespace pathreg::gauss

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pathreg/core/fft.hpp"
#include "pathreg/core/grid.hpp"
#include "pathreg/core/quadrature.hpp"
#include "pathreg/core/rng.hpp"

using namespace pathreg;
using core::cplx;

namespace {

std::vector<cplx> naive_dft(const std::vector<cplx>& x, int sign) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n, cplx(0, 0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(j) * static_cast<double>(k) /
                         static_cast<double>(n);
      out[j] += x[k] * cplx(std::cos(ang), std::sin(ang));
    }
  return out;
}

}  // namespace

TEST(Fft, MatchesNaiveDftAcrossSizes) {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {8u, 16u, 129u, 257u, 513u}) {
    std::vector<cplx> x(n);
    for (auto& v : x) v = cplx(u(eng), u(eng));
    auto got = x;
    core::dft(got, -1);
    const auto want = naive_dft(x, -1);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
    EXPECT_LT(worst, 1e-9) << "size " << n;
  }
}

TEST(Fft, CenteredTransformsInvertExactly) {
  core::FrequencyGrid grid(1, 32.0, 129);
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> spec(grid.total_points());
  for (auto& v : spec) v = cplx(u(eng), u(eng));
  const auto spatial = core::spectral_to_spatial(grid, spec);
  const auto back = core::spatial_to_spectral(grid, spatial);
  double worst = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) worst = std::max(worst, std::abs(spec[k] - back[k]));
  EXPECT_LT(worst, 1e-12);
}

TEST(Fft, CenteredDftMatchesDirectSum) {
  core::FrequencyGrid grid(1, 8.0, 17);
  std::vector<cplx> spec(17);
  for (std::size_t k = 0; k < 17; ++k) spec[k] = cplx(std::sin(0.3 * k), std::cos(0.7 * k));
  const auto spatial = core::spectral_to_spatial(grid, spec);
  const core::BoxGrid box = core::BoxGrid::dual_of(grid);
  for (std::size_t j : {0u, 5u, 16u}) {
    cplx direct(0, 0);
    for (std::size_t k = 0; k < 17; ++k)
      direct += spec[k] * std::polar(1.0, grid.coordinate(k) * box.coordinate(j));
    direct *= grid.dz() / (2.0 * std::numbers::pi);
    EXPECT_LT(std::abs(direct - spatial[j]), 1e-12);
  }
}

TEST(Fft, TwoDimensionalRoundTrip) {
  core::FrequencyGrid grid(2, 12.0, 25);
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> spec(grid.total_points());
  for (auto& v : spec) v = cplx(u(eng), u(eng));
  const auto back = core::spatial_to_spectral(grid, core::spectral_to_spatial(grid, spec));
  double worst = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) worst = std::max(worst, std::abs(spec[k] - back[k]));
  EXPECT_LT(worst, 1e-12);
}

TEST(Rng, DeterministicAcrossInstances) {
  core::GaussianSampler a(123), b(123);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next(), b.next());
  core::GaussianSampler c(124);
  bool differs = false;
  core::GaussianSampler a2(123);
  for (int i = 0; i < 10; ++i) differs |= (a2.next() != c.next());
  EXPECT_TRUE(differs);
}

TEST(Rng, MomentsLookGaussian) {
  core::GaussianSampler g(42);
  const int n = 200000;
  double m = 0.0, m2 = 0.0, m4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.next();
    m += x;
    m2 += x * x;
    m4 += x * x * x * x;
  }
  m /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(m, 0.0, 0.01);
  EXPECT_NEAR(m2, 1.0, 0.02);
  EXPECT_NEAR(m4, 3.0, 0.1);
}

TEST(Quadrature, KnownIntegrals) {
  EXPECT_NEAR(core::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi), 2.0, 1e-12);
  EXPECT_NEAR(core::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0),
              std::sqrt(std::numbers::pi), 1e-10);
  // integrable endpoint singularity via the sqrt substitution used in the
  // covariance quadrature: int_0^1 u^{-1/2} du = [u = v^2] int_0^1 2 dv
  const double v = core::integrate([](double) { return 2.0; }, 0.0, 1.0);
  EXPECT_NEAR(v, 2.0, 1e-13);
}

TEST(Grid, TimeGridIndexing) {
  core::TimeGrid g(2.0, 8);
  EXPECT_DOUBLE_EQ(g.dt(), 0.25);
  EXPECT_EQ(g.index_of(0.75), 3u);
  EXPECT_THROW(g.index_of(0.3), std::invalid_argument);
  EXPECT_THROW(core::TimeGrid(-1.0, 4), std::invalid_argument);
}

TEST(Grid, FrequencyGridGeometry) {
  core::FrequencyGrid g(2, 48.0, 129);
  EXPECT_EQ(g.total_points(), 129u * 129u);
  EXPECT_DOUBLE_EQ(g.coordinate(g.center()), 0.0);
  const auto z = g.frequency(0);
  EXPECT_DOUBLE_EQ(z[0], -48.0);
  EXPECT_DOUBLE_EQ(z[1], -48.0);
  EXPECT_EQ(g.mirror(0), g.total_points() - 1);
  EXPECT_THROW(core::FrequencyGrid(1, 10.0, 128), std::invalid_argument);
  const core::BoxGrid box = core::BoxGrid::dual_of(g);
  EXPECT_NEAR(box.dx * g.dz() * static_cast<double>(g.points_per_axis), 2.0 * std::numbers::pi, 1e-12);
}

TEST(Rng, SeedSplittingIsAffine) {
  EXPECT_EQ(core::split_seed(100, 0), 100u);
  EXPECT_EQ(core::split_seed(100, 7), 107u);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pathreg/gauss/sample.hpp"
#include "pathreg/occupation/exponent.hpp"
#include "pathreg/occupation/interpolation.hpp"
#include "pathreg/occupation/local_time.hpp"
#include "pathreg/occupation/spectrum.hpp"

using namespace pathreg;
using occupation::Quadrature;

namespace {

gauss::SamplePath brownian(std::size_t n, std::uint64_t seed, double T = 1.0) {
  gauss::GaussianModel m;
  m.kind = gauss::FbmSpec{0.5};
  m.horizon = T;
  return gauss::sample(m, n, seed);
}

}  // namespace

TEST(Spectrum, ConstantPathIsFlat) {
  const auto path = gauss::zero_path(1.0, 64);
  core::FrequencyGrid grid(1, 16.0, 65);
  const auto spec = occupation::occupation_spectrum(path, 0.25, 0.75, grid);
  for (const auto& v : spec.values) {
    EXPECT_NEAR(v.real(), 0.5, 1e-14);
    EXPECT_NEAR(v.imag(), 0.0, 1e-14);
  }
}

TEST(Spectrum, MassIsExactForLeftRiemann) {
  const auto path = brownian(512, 3);
  core::FrequencyGrid grid(1, 32.0, 129);
  const auto spec = occupation::occupation_spectrum(path, 0.25, 0.875, grid);
  EXPECT_DOUBLE_EQ(spec.mass().real(), 0.625);
  EXPECT_DOUBLE_EQ(spec.mass().imag(), 0.0);  // exact: the zero frequency never leaves 1
}

TEST(Spectrum, LinearPathApproachesClosedForm) {
  // exact antiderivative (e^{izt} - e^{izs}) / (iz) as the quadrature oracle
  core::FrequencyGrid grid(1, 8.0, 33);
  double coarse_err = 0.0, fine_err = 0.0, trap_err = 0.0;
  for (int round = 0; round < 2; ++round) {
    const std::size_t n = round == 0 ? 512 : 4096;
    const auto path = gauss::linear_path(0.0, 1.0, 1.0, n);
    const auto spec = occupation::occupation_spectrum(path, 0.0, 1.0, grid);
    const auto trap = occupation::occupation_spectrum(path, 0.0, 1.0, grid, Quadrature::Trapezoid);
    double worst = 0.0, worst_trap = 0.0;
    for (std::size_t k = 0; k < spec.values.size(); ++k) {
      const double z = grid.coordinate(k);
      core::cplx want;
      if (std::abs(z) < 1e-12) {
        want = core::cplx(1.0, 0.0);
      } else {
        want = (std::polar(1.0, z) - core::cplx(1.0, 0.0)) / core::cplx(0.0, z);
      }
      worst = std::max(worst, std::abs(spec.values[k] - want));
      worst_trap = std::max(worst_trap, std::abs(trap.values[k] - want));
    }
    (round == 0 ? coarse_err : fine_err) = worst;
    if (round == 1) trap_err = worst_trap;
  }
  EXPECT_LT(fine_err, coarse_err / 4.0);  // first-order quadrature
  EXPECT_LT(fine_err, 1e-3);
  EXPECT_LT(trap_err, 1e-6);  // trapezoid is second order
}

TEST(Spectrum, HermitianSymmetryAndBoundedness) {
  const auto path = brownian(256, 11);
  core::FrequencyGrid grid(1, 24.0, 97);
  const auto spec = occupation::occupation_spectrum(path, 0.0, 1.0, grid);
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    EXPECT_LT(std::abs(spec.values[k] - std::conj(spec.values[grid.mirror(k)])), 1e-13);
    EXPECT_LE(std::abs(spec.values[k]), 1.0 + 1e-12);
  }
}

TEST(Spectrum, TimeAdditivityIsExact) {
  const auto path = brownian(256, 12);
  core::FrequencyGrid grid(1, 24.0, 97);
  const auto a = occupation::occupation_spectrum(path, 0.0, 0.5, grid);
  const auto b = occupation::occupation_spectrum(path, 0.5, 1.0, grid);
  const auto c = occupation::occupation_spectrum(path, 0.0, 1.0, grid);
  double worst = 0.0;
  for (std::size_t k = 0; k < c.values.size(); ++k)
    worst = std::max(worst, std::abs(a.values[k] + b.values[k] - c.values[k]));
  EXPECT_LT(worst, 1e-12);
}

TEST(Spectrum, WindowOffTheGridIsRejected) {
  const auto path = brownian(64, 1);
  core::FrequencyGrid grid(1, 8.0, 17);
  EXPECT_THROW(occupation::occupation_spectrum(path, 0.1234, 0.5, grid), std::invalid_argument);
  EXPECT_THROW(occupation::occupation_spectrum(path, 0.5, 0.5, grid), std::invalid_argument);
}

TEST(Spectrum, PrefixSnapshotsMatchDirectWindows) {
  const auto path = brownian(128, 4);
  core::FrequencyGrid grid(1, 16.0, 65);
  const auto snaps = occupation::prefix_spectra(path, grid, {0, 32, 96, 128});
  const auto direct = occupation::occupation_spectrum(path, 0.25, 0.75, grid);
  double worst = 0.0;
  for (std::size_t k = 0; k < direct.values.size(); ++k)
    worst = std::max(worst, std::abs(snaps[2][k] - snaps[1][k] - direct.values[k]));
  EXPECT_LT(worst, 1e-13);
}

TEST(Spectrum, TwoDimensionalMassAndSymmetry) {
  gauss::GaussianModel m;
  m.kind = gauss::FbmSpec{0.5};
  m.dimension = 2;
  const auto path = gauss::sample(m, 128, 21);
  core::FrequencyGrid grid(2, 12.0, 25);
  const auto spec = occupation::occupation_spectrum(path, 0.0, 1.0, grid);
  EXPECT_DOUBLE_EQ(spec.mass().real(), 1.0);
  for (std::size_t k = 0; k < spec.values.size(); ++k)
    EXPECT_LT(std::abs(spec.values[k] - std::conj(spec.values[grid.mirror(k)])), 1e-13);
}

TEST(LocalTime, LinearPathReproducesIndicator) {
  // w_r = r on [0,1]: L_1 = 1_{(0,1]}. The interval integral is checked on
  // the default hard-cutoff reconstruction; the pointwise L1 comparison away
  // from a 3-cell band at each jump needs the Gaussian spectral taper, since
  // the hard cutoff leaves ~3.6% of slowly decaying Gibbs tails.
  const auto path = gauss::linear_path(0.0, 1.0, 1.0, 4096);
  core::FrequencyGrid grid(1, 128.0, 513);
  const auto spec = occupation::occupation_spectrum(path, 0.0, 1.0, grid);
  const auto box = core::BoxGrid::dual_of(grid);
  const double band = 3.0 * box.dx;

  const auto hard = occupation::local_time(spec);
  double mass_inside = 0.0;
  for (std::size_t j = 0; j < hard.values.size(); ++j) {
    const double x = box.coordinate(j);
    if (x > 0.0 && x <= 1.0) mass_inside += hard.values[j] * box.dx;
  }
  EXPECT_NEAR(mass_inside, 1.0, 0.02);
  EXPECT_LT(hard.imag_residual, 1e-8);

  const auto smooth = occupation::local_time(spec, 0.7);
  double l1 = 0.0;
  for (std::size_t j = 0; j < smooth.values.size(); ++j) {
    const double x = box.coordinate(j);
    const double want = (x > 0.0 && x <= 1.0) ? 1.0 : 0.0;
    if (std::abs(x - 0.0) > band && std::abs(x - 1.0) > band)
      l1 += std::abs(smooth.values[j] - want) * box.dx;
  }
  EXPECT_LT(l1, 0.02);
  EXPECT_NEAR(smooth.integral(), 1.0, 1e-9);  // the taper never touches z = 0
}

TEST(LocalTime, ZeroPathConcentratesAtOrigin) {
  const auto path = gauss::zero_path(1.0, 256);
  core::FrequencyGrid grid(1, 64.0, 257);
  const auto spec = occupation::occupation_spectrum(path, 0.0, 1.0, grid);
  const auto lt = occupation::local_time(spec);
  double near = 0.0;
  for (std::size_t j = 0; j < lt.values.size(); ++j)
    if (std::abs(lt.box.coordinate(j)) <= 2.0 * lt.box.dx) near += lt.values[j] * lt.box.dx;
  EXPECT_GT(near, 0.85);
  EXPECT_NEAR(lt.integral(), 1.0, 1e-6);
}

TEST(LocalTime, BrownianHistogramOracle) {
  const auto path = brownian(16384, 1);
  core::FrequencyGrid grid(1, 128.0, 513);
  const auto spec = occupation::occupation_spectrum(path, 0.0, 1.0, grid);
  const auto lt = occupation::local_time(spec);
  EXPECT_NEAR(lt.integral(), 1.0, 1e-3);
  EXPECT_GT(lt.min_value(), -0.01 * lt.max_value());
  // cloud-in-cell histogram of visits on the same box
  std::vector<double> hist(lt.values.size(), 0.0);
  const double h = path.grid.dt();
  for (std::size_t i = 0; i < path.grid.steps; ++i) {
    const double x = path.values(static_cast<Eigen::Index>(i), 0);
    const double pos = (x - lt.box.coordinate(0)) / lt.box.dx;
    const auto j = static_cast<std::ptrdiff_t>(std::floor(pos));
    const double f = pos - std::floor(pos);
    if (j >= 0 && j + 1 < static_cast<std::ptrdiff_t>(hist.size())) {
      hist[static_cast<std::size_t>(j)] += (1.0 - f) * h / lt.box.dx;
      hist[static_cast<std::size_t>(j) + 1] += f * h / lt.box.dx;
    }
  }
  double l1 = 0.0;
  for (std::size_t j = 0; j < hist.size(); ++j) l1 += std::abs(hist[j] - lt.values[j]) * lt.box.dx;
  EXPECT_LT(l1, 0.05);
}

TEST(LocalTime, SevereNegativityWarns) {
  // far too small a cutoff for a spread-out path: truncation ringing
  const auto path = brownian(512, 23);
  core::FrequencyGrid grid(1, 6.0, 25);
  const auto spec = occupation::occupation_spectrum(path, 0.0, 1.0, grid);
  const auto lt = occupation::local_time(spec);
  if (lt.min_value() < -0.05 * lt.max_value()) {
    EXPECT_FALSE(lt.warnings.empty());
  }
}

TEST(Sobolev, FlatSpectrumClosedForm) {
  const auto path = gauss::zero_path(1.0, 64);
  core::FrequencyGrid grid(1, 16.0, 65);
  const double t = 0.5;
  const auto spec = occupation::occupation_spectrum(path, 0.0, t, grid);
  const double want = t * std::sqrt(grid.dz() * static_cast<double>(grid.total_points()));
  EXPECT_NEAR(occupation::sobolev_norm(spec, 0.0), want, 1e-12);
}

TEST(Sobolev, StableUnderCutoffDoubling) {
  const auto path = brownian(4096, 29);
  const auto spec64 = occupation::occupation_spectrum(path, 0.0, 1.0, core::FrequencyGrid(1, 64.0, 257));
  const auto spec128 = occupation::occupation_spectrum(path, 0.0, 1.0, core::FrequencyGrid(1, 128.0, 513));
  const double a = occupation::sobolev_norm(spec64, 0.0);
  const double b = occupation::sobolev_norm(spec128, 0.0);
  EXPECT_NEAR(a, b, 0.02 * std::max(a, b));
}

TEST(Sobolev, WindowTriangleInequality) {
  const auto path = brownian(512, 31);
  core::FrequencyGrid grid(1, 32.0, 129);
  const auto ab = occupation::occupation_spectrum(path, 0.0, 0.5, grid);
  const auto bc = occupation::occupation_spectrum(path, 0.5, 1.0, grid);
  const auto ac = occupation::occupation_spectrum(path, 0.0, 1.0, grid);
  for (double lambda : {-0.5, 0.0, 0.5})
    EXPECT_LE(occupation::sobolev_norm(ac, lambda),
              occupation::sobolev_norm(ab, lambda) + occupation::sobolev_norm(bc, lambda) + 1e-12);
}

TEST(Exponent, LinearPathMatchesClosedFormSlopeOracle) {
  // |mu_hat_{s,s+h}(z)| for w_r = r depends only on h; the slope oracle is
  // computed from the exact spectrum on the same lattice and window set.
  core::FrequencyGrid grid(1, 64.0, 257);
  occupation::WindowSet windows;
  std::vector<double> lx, ly;
  for (std::size_t j = windows.j_min; j <= windows.j_max; ++j) {
    const double h = std::pow(0.5, static_cast<double>(j));
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.total_points(); ++k) {
      const double z = grid.coordinate(k);
      const double mag = std::abs(z) < 1e-12 ? h : std::abs(2.0 * std::sin(0.5 * z * h) / z);
      acc += mag * mag;
    }
    lx.push_back(std::log(h));
    ly.push_back(std::log(std::sqrt(acc * grid.dz())));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  const double oracle_slope = sxy / sxx;
  EXPECT_GE(oracle_slope, 0.75);

  std::vector<gauss::SamplePath> batch;
  for (int i = 0; i < 20; ++i) batch.push_back(gauss::linear_path(0.0, 1.0, 1.0, 4096));
  const auto rep = occupation::holder_exponent(batch, 0.0, grid, windows);
  EXPECT_NEAR(rep.gamma_hat, oracle_slope, 0.02);
}

TEST(Exponent, BrownianBatchInPredictedBand) {
  // theory band: gamma < 1 - (lambda + d/2) zeta at lambda = 0, zeta = 1/2
  gauss::GaussianModel m;
  m.kind = gauss::FbmSpec{0.5};
  std::vector<gauss::SamplePath> batch;
  for (std::size_t i = 0; i < 24; ++i) batch.push_back(gauss::sample(m, 2048, core::split_seed(900, i)));
  core::FrequencyGrid grid(1, 64.0, 257);
  occupation::WindowSet windows{2, 6, 8};
  const auto rep = occupation::holder_exponent(batch, 0.0, grid, windows);
  EXPECT_GT(rep.gamma_hat, 0.6);
  EXPECT_LT(rep.gamma_hat, 0.8);
}

TEST(Exponent, MonotoneInLambda) {
  gauss::GaussianModel m;
  m.kind = gauss::FbmSpec{0.5};
  std::vector<gauss::SamplePath> batch;
  for (std::size_t i = 0; i < 20; ++i) batch.push_back(gauss::sample(m, 2048, core::split_seed(901, i)));
  core::FrequencyGrid grid(1, 64.0, 257);
  occupation::WindowSet windows{2, 6, 8};
  const double g_low = occupation::holder_exponent(batch, -0.4, grid, windows).gamma_hat;
  const double g_mid = occupation::holder_exponent(batch, 0.0, grid, windows).gamma_hat;
  const double g_high = occupation::holder_exponent(batch, 0.4, grid, windows).gamma_hat;
  EXPECT_LE(g_mid, g_low + 0.05);
  EXPECT_LE(g_high, g_mid + 0.05);
}

TEST(Exponent, RoughFbmStaysBelowTheoryBand) {
  // gamma < 1 - (lambda + 1/2) H plus estimator slack
  gauss::GaussianModel m;
  m.kind = gauss::FbmSpec{0.3};
  std::vector<gauss::SamplePath> batch;
  for (std::size_t i = 0; i < 20; ++i) batch.push_back(gauss::sample(m, 2048, core::split_seed(950, i)));
  core::FrequencyGrid grid(1, 64.0, 257);
  occupation::WindowSet windows{2, 6, 8};
  const double lambda = 0.5;
  const auto rep = occupation::holder_exponent(batch, lambda, grid, windows);
  EXPECT_LT(rep.gamma_hat, 1.0 - (lambda + 0.5) * 0.3 + 0.1);
  EXPECT_GT(rep.gamma_hat, 0.3);
}

TEST(Exponent, GuardsDegenerateInput) {
  core::FrequencyGrid grid(1, 16.0, 65);
  std::vector<gauss::SamplePath> one{gauss::linear_path(0.0, 1.0, 1.0, 256)};
  EXPECT_THROW(occupation::holder_exponent(one, 0.0, grid, {}), std::invalid_argument);
  occupation::WindowSet single{3, 3, 4};
  EXPECT_THROW(single.validate(), std::invalid_argument);
}

TEST(Interpolation, BrownianRatioBelowOne) {
  const auto path = brownian(1024, 37);
  core::FrequencyGrid grid(1, 48.0, 193);
  occupation::WindowSet windows{2, 5, 4};
  const auto rep = occupation::interpolation_check(path, 0.2, 0.6, grid, windows);
  EXPECT_LE(rep.ratio, 1.05);
  EXPECT_GT(rep.lhs, 0.0);
}

TEST(Interpolation, SmallGammaDegenerates) {
  const auto path = brownian(512, 38);
  core::FrequencyGrid grid(1, 32.0, 129);
  occupation::WindowSet windows{2, 4, 4};
  const auto rep = occupation::interpolation_check(path, 0.2, 1e-9, grid, windows);
  EXPECT_LE(rep.ratio, 1.0 + 1e-9);
}

TEST(Interpolation, GammaNearOneRejected) {
  const auto path = brownian(256, 39);
  core::FrequencyGrid grid(1, 32.0, 129);
  EXPECT_THROW(occupation::interpolation_check(path, 0.2, 0.999, grid, {}), std::invalid_argument);
}

TEST(LocalTime, TwoDimensionalMassPreserved) {
  gauss::GaussianModel m;
  m.kind = gauss::FbmSpec{0.5};
  m.dimension = 2;
  const auto path = gauss::sample(m, 512, 41);
  core::FrequencyGrid grid(2, 48.0, 129);
  const auto spec = occupation::occupation_spectrum(path, 0.0, 1.0, grid);
  const auto lt = occupation::local_time(spec);
  EXPECT_NEAR(lt.integral(), 1.0, 1e-6);
  EXPECT_LT(lt.imag_residual, 1e-8);
}

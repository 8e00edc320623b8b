#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pathreg/funcspaces/besov.hpp"
#include "pathreg/funcspaces/partition.hpp"
#include "pathreg/occupation/local_time.hpp"

using namespace pathreg;
using core::cplx;

namespace {

core::FrequencyGrid default_grid() { return core::FrequencyGrid(1, 128.0, 513); }

/// Random real field, band-limited below the partition's resolvable radius.
funcspaces::GriddedField random_field(const core::FrequencyGrid& grid, double radius, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> hat(grid.total_points(), cplx(0, 0));
  for (std::size_t k = 0; k < hat.size(); ++k) {
    if (grid.norm_sq(k) >= radius * radius) continue;
    hat[k] = cplx(u(eng), u(eng));
  }
  for (std::size_t k = 0; k < hat.size(); ++k) {
    const std::size_t mk = grid.mirror(k);
    if (mk < k) continue;
    const cplx avg = 0.5 * (hat[k] + std::conj(hat[mk]));
    hat[k] = avg;
    hat[mk] = std::conj(avg);
  }
  funcspaces::GriddedField f;
  f.grid = grid;
  f.values = core::spectral_to_spatial(grid, std::move(hat));
  return f;
}

/// Plane wave cos(z0 x) on the dual box.
funcspaces::GriddedField plane_wave(const core::FrequencyGrid& grid, double z0, double amplitude = 1.0) {
  funcspaces::GriddedField f;
  f.grid = grid;
  const auto box = core::BoxGrid::dual_of(grid);
  f.values.resize(box.total_points());
  for (std::size_t j = 0; j < f.values.size(); ++j)
    f.values[j] = amplitude * std::cos(z0 * box.coordinate(j));
  return f;
}

double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST(Partition, DefaultRadiiSatisfyInvariants) {
  const auto grid = default_grid();
  const auto part = funcspaces::build_partition(grid);
  EXPECT_EQ(part.j_max, 6);
  const double r_res = part.resolvable_radius();
  double residual = 0.0;
  for (std::size_t k = 0; k < grid.total_points(); ++k) {
    const double r = std::sqrt(grid.norm_sq(k));
    if (r >= r_res) continue;
    double sum = part.block(-1)[k];
    for (int j = 0; j <= part.j_max; ++j) sum += part.block(j)[k];
    residual = std::max(residual, std::abs(1.0 - sum));
  }
  EXPECT_LT(residual, 1e-10);
  // support disjointness on the lattice
  for (std::size_t k = 0; k < grid.total_points(); ++k) {
    for (int j = 1; j <= part.j_max; ++j)
      EXPECT_EQ(part.block(-1)[k] * part.block(j)[k], 0.0);
    for (int j = 0; j + 2 <= part.j_max; ++j)
      EXPECT_EQ(part.block(j)[k] * part.block(j + 2)[k], 0.0);
  }
}

TEST(Partition, LowPassIsCompleteNearZero) {
  const auto grid = default_grid();
  const auto part = funcspaces::build_partition(grid);
  for (std::size_t k = 0; k < grid.total_points(); ++k) {
    const double r = std::sqrt(grid.norm_sq(k));
    if (r > 0.7) continue;  // below a, chi == 1 and all rho_j vanish
    EXPECT_DOUBLE_EQ(part.block(-1)[k], 1.0);
    for (int j = 0; j <= part.j_max; ++j) EXPECT_DOUBLE_EQ(part.block(j)[k], 0.0);
  }
}

TEST(Partition, InadmissibleRadiiRejectedConstructively) {
  const auto grid = default_grid();
  try {
    funcspaces::build_partition(grid, 0.75, 1.5, 1.0);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("b = 2c"), std::string::npos);
  }
  EXPECT_THROW(funcspaces::build_partition(grid, 1.0, 2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(funcspaces::build_partition(grid, 0.4, 2.0, 1.0), std::invalid_argument);
}

TEST(Blocks, PlaneWaveLandsInItsBand) {
  const auto grid = default_grid();
  const auto part = funcspaces::build_partition(grid);
  const double z0 = 12.0;  // inside annulus j = 3 ([6, 16] roughly)
  const auto f = plane_wave(grid, z0);
  double sup_in = 0.0;
  const auto in_band = funcspaces::lp_block(f, part, 3);
  for (const auto& v : in_band.values) sup_in = std::max(sup_in, std::abs(v));
  EXPECT_GT(sup_in, 0.5);
  for (int j : {-1, 0, 1, 5, 6}) {
    const auto off = funcspaces::lp_block(f, part, j);
    double sup = 0.0;
    for (const auto& v : off.values) sup = std::max(sup, std::abs(v));
    EXPECT_LT(sup, 1e-10) << "level " << j;
  }
}

TEST(Blocks, ConstantFieldIsPureLowPass) {
  const auto grid = default_grid();
  const auto part = funcspaces::build_partition(grid);
  funcspaces::GriddedField f;
  f.grid = grid;
  f.values.assign(grid.total_points(), cplx(2.5, 0.0));
  const auto low = funcspaces::lp_block(f, part, -1);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) worst = std::max(worst, std::abs(low.values[i] - f.values[i]));
  EXPECT_LT(worst, 1e-10);
  for (int j = 0; j <= part.j_max; ++j) {
    const auto blk = funcspaces::lp_block(f, part, j);
    for (const auto& v : blk.values) EXPECT_LT(std::abs(v), 1e-12);
  }
}

TEST(Blocks, RandomFieldsReconstruct) {
  const auto grid = default_grid();
  const auto part = funcspaces::build_partition(grid);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = random_field(grid, part.resolvable_radius(), 100 + seed);
    std::vector<cplx> sum(f.values.size(), cplx(0, 0));
    for (int j = -1; j <= part.j_max; ++j) {
      const auto blk = funcspaces::lp_block(f, part, j);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += blk.values[i];
    }
    EXPECT_LT(rel_l2(sum, f.values), 1e-8) << "seed " << seed;
  }
}

TEST(Besov, PlaneWaveNormScalesWithLevel) {
  const auto grid = default_grid();
  const auto part = funcspaces::build_partition(grid);
  const double z0 = 12.0, amp = 0.7;
  const auto f = plane_wave(grid, z0, amp);
  for (double alpha : {0.5, 1.0}) {
    const auto rep = funcspaces::holder_norm(f, part, alpha);
    EXPECT_NEAR(rep.total, std::pow(2.0, alpha * 3.0) * amp, 0.05 * rep.total);
  }
}

TEST(Besov, EmbeddingConstantStableAcrossFields) {
  // B^kappa_{1,1} -> C^{kappa - d}: the ratio ||f||_{C^{kappa-d}} /
  // ||f||_{B^kappa_{1,1}} stays bounded across random fields.
  const auto grid = default_grid();
  const auto part = funcspaces::build_partition(grid);
  const double kappa = 0.8;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = random_field(grid, part.resolvable_radius(), 300 + seed);
    const double lhs = funcspaces::holder_norm(f, part, kappa - 1.0).total;
    const double rhs = funcspaces::besov_norm(f, part, kappa, 1.0, 1.0).total;
    worst = std::max(worst, lhs / rhs);
  }
  EXPECT_LT(worst, 1.0);  // measured constant, frozen with headroom
}

TEST(Besov, WeightedEquivalence) {
  const auto grid = default_grid();
  const auto part = funcspaces::build_partition(grid);
  const double kappa = -1.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = random_field(grid, part.resolvable_radius(), 400 + seed);
    const double weighted = funcspaces::besov_norm(f, part, 0.5, INFINITY, INFINITY, kappa).total;
    funcspaces::GriddedField fw = f;
    const auto box = fw.box();
    for (std::size_t i = 0; i < fw.values.size(); ++i) {
      const double x = box.coordinate(i);
      fw.values[i] *= std::pow(1.0 + x * x, 0.5 * kappa);
    }
    const double direct = funcspaces::besov_norm(fw, part, 0.5, INFINITY, INFINITY, 0.0).total;
    const double ratio = weighted / direct;
    EXPECT_GT(ratio, 0.1);
    EXPECT_LT(ratio, 10.0);
  }
}

TEST(Besov, NormMonotoneInAlpha) {
  const auto grid = default_grid();
  const auto part = funcspaces::build_partition(grid);
  const auto f = random_field(grid, part.resolvable_radius(), 55);
  double prev = 0.0;
  for (double alpha : {-0.5, 0.0, 0.5, 1.0}) {
    const double v = funcspaces::besov_norm(f, part, alpha, 2.0, 2.0).total;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Besov, SobolevCrossCheck) {
  // B^alpha_{2,2} block sums against the direct (1+|z|^2)^alpha lattice sum;
  // equivalent norms, constant measured once and frozen as a regression
  // bound (15%).
  const auto grid = default_grid();
  const auto part = funcspaces::build_partition(grid);
  gauss::GaussianModel m;
  m.kind = gauss::FbmSpec{0.5};
  const auto path = gauss::sample(m, 2048, 77);
  const auto spec = occupation::occupation_spectrum(path, 0.0, 1.0, grid);
  const double direct = occupation::sobolev_norm(spec, 0.0);
  funcspaces::GriddedField f;
  f.grid = grid;
  const auto lt = occupation::local_time(spec);
  f.values.assign(lt.values.begin(), lt.values.end());
  const double besov = funcspaces::besov_norm(f, part, 0.0, 2.0, 2.0).total;
  // The H^alpha convention is Fourier-side (no (2pi)^{-d} in front of the
  // inversion), so the spatial-side block norm differs by (2pi)^{d/2}.
  EXPECT_NEAR(besov * std::sqrt(2.0 * std::numbers::pi), direct, 0.15 * direct);
}

TEST(Besov, ReportsDroppedTail) {
  const auto grid = default_grid();
  const auto part = funcspaces::build_partition(grid);
  const auto inside = random_field(grid, part.resolvable_radius(), 60);
  EXPECT_LT(funcspaces::dropped_tail_fraction(inside, part), 1e-12);
  const auto wide = random_field(grid, grid.z_max, 61);
  EXPECT_GT(funcspaces::dropped_tail_fraction(wide, part), 0.05);
}

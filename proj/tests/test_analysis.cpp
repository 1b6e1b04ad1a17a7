#include "tns/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"

namespace tns {
namespace {

using namespace oracle;

FrequencyLattice lat2() { return make_lattice(2, 8, 0.5); }

// even real pair at +-(m0, m1) with unit coefficients
SpectralScalarField mode_pair(const FrequencyLattice& lat, int m0, int m1, double amp = 1.0) {
  SpectralScalarField f(lat);
  f.a[lat.flatten({m0, m1, 0})] = cplx{amp, 0.0};
  f.a[lat.flatten({-m0, -m1, 0})] = cplx{amp, 0.0};
  return f;
}

// ---------------------------------------------------------------------------
// dyadic blocks
// ---------------------------------------------------------------------------

TEST(DyadicBlocks, RangeFrozenValues) {
  const DyadicRange a = dyadic_range(lat2());  // h = 1/2, max |xi| = sqrt(2)*4
  EXPECT_EQ(a.k_min, -1);
  EXPECT_EQ(a.k_max, 3);
  const DyadicRange b = dyadic_range(make_lattice(2, 32, 1.0 / 32.0));
  EXPECT_EQ(b.k_min, -5);
  EXPECT_EQ(b.k_max, 1);
  const DyadicRange c = dyadic_range(make_lattice(3, 8, 0.5));
  EXPECT_EQ(c.k_min, -1);
  EXPECT_EQ(c.k_max, 3);
}

TEST(DyadicBlocks, WeightsArePartitionOfUnityOnLatticeRange) {
  const FrequencyLattice lat = lat2();
  const DyadicRange kr = dyadic_range(lat);
  for_each_point(lat, [&](std::size_t, const std::array<int, 3>& mi) {
    const double r = std::sqrt(lat.freq_norm_sq(mi));
    if (r == 0.0) return;
    double sum = 0.0;
    for (int k = kr.k_min; k <= kr.k_max; ++k) {
      const double w = lp_block_weight(r, k);
      EXPECT_GE(w, 0.0);
      EXPECT_LE(w, 1.0);
      sum += w;
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
  });
}

TEST(DyadicBlocks, AnnulusSupportIsRespected) {
  // block k vanishes outside (2^{k-1}, 2^{k+1})
  for (int k : {-2, 0, 3}) {
    const double lo = std::ldexp(1.0, k - 1), hi = std::ldexp(1.0, k + 1);
    EXPECT_EQ(lp_block_weight(lo, k), 0.0);
    EXPECT_EQ(lp_block_weight(hi, k), 0.0);
    EXPECT_GT(lp_block_weight(std::ldexp(1.0, k), k), 0.0);
  }
}

TEST(DyadicBlocks, SingleUnitModeIsCapturedByItsBlock) {
  const FrequencyLattice lat = lat2();
  const SpectralScalarField f = mode_pair(lat, 2, 0);  // |xi| = 1
  const SpectralScalarField b0 = lp_block(f, 0);
  for (std::size_t i = 0; i < f.a.size(); ++i) EXPECT_EQ(b0.a[i], f.a[i]);
  EXPECT_EQ(max_abs(lp_block(f, -1)), 0.0);
  EXPECT_EQ(max_abs(lp_block(f, 1)), 0.0);
}

TEST(DyadicBlocks, BlocksReconstructTheFieldOnNonzeroModes) {
  const FrequencyLattice lat = lat2();
  std::mt19937_64 rng(77);
  SpectralScalarField f = random_conjugate_symmetric(lat, rng);
  f.a[lat.flatten({0, 0, 0})] = cplx{0.0, 0.0};

  const DyadicRange kr = dyadic_range(lat);
  SpectralScalarField sum(lat);
  for (int k = kr.k_min; k <= kr.k_max; ++k) {
    const SpectralScalarField b = lp_block(f, k);
    for (std::size_t i = 0; i < sum.a.size(); ++i) sum.a[i] += b.a[i];
  }
  const double scale = max_abs(f);
  for (std::size_t i = 0; i < sum.a.size(); ++i)
    EXPECT_LE(std::abs(sum.a[i] - f.a[i]), 1e-12 * scale);
}

TEST(DyadicBlocks, OutOfRangeIndexThrows) {
  const SpectralScalarField f(lat2());
  EXPECT_THROW(lp_block(f, -5), std::invalid_argument);
  EXPECT_THROW(lp_block(f, 9), std::invalid_argument);
}

TEST(DyadicBlocks, ZeroFieldGivesZeroBlocks) {
  const SpectralScalarField f(lat2());
  EXPECT_EQ(max_abs(lp_block(f, 0)), 0.0);
}

// ---------------------------------------------------------------------------
// Besov norms
// ---------------------------------------------------------------------------

TEST(BesovNorm, ZeroFieldIsZero) {
  GridTransform ft(lat2());
  EXPECT_EQ(besov_norm(SpectralScalarField(lat2()), -1.0, ft), 0.0);
  EXPECT_EQ(besov_l1_bound(SpectralScalarField(lat2()), -1.0), 0.0);
}

TEST(BesovNorm, SingleModeFrozenValues) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  // |xi| = 1 pair: block 0 captures with weight exactly 1; physical sup 2 h^2
  const SpectralScalarField f = mode_pair(lat, 2, 0);
  EXPECT_DOUBLE_EQ(besov_l1_bound(f, -1.0), 0.5);
  EXPECT_NEAR(besov_norm(f, -1.0, ft), 0.5, 1e-12);
  // |xi| = 2 pair lands in block k = 1: value 2^{-1} * 2 h^2
  const SpectralScalarField g = mode_pair(lat, 4, 0);
  EXPECT_DOUBLE_EQ(besov_l1_bound(g, -1.0), 0.25);
  EXPECT_NEAR(besov_norm(g, -1.0, ft), 0.25, 1e-12);
  // s = 0 removes the dyadic weight
  EXPECT_DOUBLE_EQ(besov_l1_bound(g, 0.0), 0.5);
}

TEST(BesovNorm, AbsolutelyHomogeneous) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  std::mt19937_64 rng(11);
  const SpectralScalarField f = random_conjugate_symmetric(lat, rng);
  const double base = besov_norm(f, -1.0, ft);
  SpectralScalarField g = f;
  for (cplx& z : g.a) z *= -4.0;  // power-of-two scaling is exact
  EXPECT_DOUBLE_EQ(besov_norm(g, -1.0, ft), 4.0 * base);
  EXPECT_DOUBLE_EQ(besov_l1_bound(g, -1.0), 4.0 * besov_l1_bound(f, -1.0));
}

TEST(BesovNorm, CenterBoundMatchesGridSupForNonnegativeFields) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  std::mt19937_64 rng(23);
  const SpectralScalarField f = random_nonnegative_even(lat, rng);
  for (double s : {-1.0, -0.5, 0.0}) {
    const double l1 = besov_l1_bound(f, s);
    const double grid = besov_norm(f, s, ft);
    EXPECT_NEAR(l1, grid, 1e-11 * std::max(1.0, grid));
    EXPECT_LE(l1, grid * (1.0 + 1e-10));
  }
}

TEST(BesovNorm, VectorNormCombinesComponentsInEuclideanMagnitude) {
  const FrequencyLattice lat = lat2();
  SpectralVectorField u(lat);
  // both components in block 0: magnitude sqrt(0.5^2 + 1.5^2)
  u.comp[0] = mode_pair(lat, 2, 0).a;
  u.comp[1] = mode_pair(lat, 2, 0, 3.0).a;
  EXPECT_DOUBLE_EQ(besov_l1_bound(u, -1.0), std::sqrt(2.5));
  // components in different blocks do not mix
  SpectralVectorField v(lat);
  v.comp[0] = mode_pair(lat, 2, 0).a;       // block 0: 0.5
  v.comp[1] = mode_pair(lat, 4, 0, 3.0).a;  // block 1: 2^{-1} * 1.5 = 0.75
  EXPECT_DOUBLE_EQ(besov_l1_bound(v, -1.0), 0.75);
  GridTransform ft(lat);
  EXPECT_NEAR(besov_norm(u, -1.0, ft), std::sqrt(2.5), 1e-12);
}

// ---------------------------------------------------------------------------
// heat-semigroup norm
// ---------------------------------------------------------------------------

TEST(HeatNorm, ZeroFieldAndGridValidation) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  EXPECT_EQ(heat_besov_minus1_center(SpectralScalarField(lat)), 0.0);
  EXPECT_THROW(heat_besov_minus1_center(SpectralScalarField(lat), {}), std::invalid_argument);
  EXPECT_THROW(heat_besov_minus1_center(SpectralScalarField(lat), {0.5, -1.0}),
               std::invalid_argument);
  EXPECT_THROW(heat_besov_minus1(SpectralScalarField(lat), ft, {}), std::invalid_argument);
}

TEST(HeatNorm, DefaultGridIsGeometric) {
  const std::vector<double> g = default_heat_grid();
  ASSERT_EQ(g.size(), 27u);
  EXPECT_DOUBLE_EQ(g.front(), std::ldexp(1.0, -20));
  EXPECT_DOUBLE_EQ(g.back(), 64.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_DOUBLE_EQ(g[i], 2.0 * g[i - 1]);
}

TEST(HeatNorm, SingleUnitModeFrozenValue) {
  // max_t sqrt(t) e^{-t} attained at t = 1/2 (a grid point): (2e)^{-1/2}
  // times the physical sup 2 h^2 = 1/2.
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  const SpectralScalarField f = mode_pair(lat, 2, 0);
  EXPECT_NEAR(heat_besov_minus1_center(f), 0.21444097124017672, 1e-15);
  EXPECT_NEAR(heat_besov_minus1(f, ft), 0.21444097124017672, 1e-12);
}

TEST(HeatNorm, CenterPathEqualsGridPathForNonnegativeFields) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  std::mt19937_64 rng(5);
  const SpectralVectorField u = random_nonnegative_even_vector(lat, rng);
  const double center = heat_besov_minus1_center(u);
  const double grid = heat_besov_minus1(u, ft);
  EXPECT_NEAR(center, grid, 1e-11 * grid);
}

TEST(HeatNorm, CenterPathIsLowerBoundForGeneralFields) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  std::mt19937_64 rng(6);
  const SpectralScalarField f = random_conjugate_symmetric(lat, rng);
  EXPECT_LE(heat_besov_minus1_center(f), heat_besov_minus1(f, ft) * (1.0 + 1e-12));
}

TEST(HeatNorm, MonotoneUnderCoefficientDomination) {
  const FrequencyLattice lat = lat2();
  std::mt19937_64 rng(7);
  const SpectralVectorField u = random_nonnegative_even_vector(lat, rng);
  SpectralVectorField v = u;
  const SpectralVectorField extra = random_nonnegative_even_vector(lat, rng);
  for (int j = 0; j < v.dim(); ++j)
    for (std::size_t i = 0; i < v.comp[j].size(); ++i) v.comp[j][i] += extra.comp[j][i];
  EXPECT_LE(heat_besov_minus1_center(u), heat_besov_minus1_center(v) * (1.0 + 1e-12));
}

TEST(HeatNorm, OscillatoryFamilyFrozenValue) {
  // eps = 0.1 two-dimensional reduction: support pair at |xi|^2 = 110.5 with
  // canonical mass; grid maximum at t = 2^{-8}.
  const FrequencyLattice lat = make_lattice(2, 25, 0.5);
  OscillatorySpec spec;
  spec.profile_center[0] = 0.5;
  const SpectralVectorField u = make_oscillatory_data_2d(lat, spec);
  const double v = heat_besov_minus1_center(u);
  EXPECT_NEAR(v, 0.45830275436902523, 1e-10);
}

// ---------------------------------------------------------------------------
// energy flux
// ---------------------------------------------------------------------------

TEST(EnergyFlux, ZeroFieldIsZero) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  const MultiplierMatrix M = make_coupling_matrix(lat);
  EXPECT_EQ(energy_flux(SpectralVectorField(lat), M, ft), 0.0);
}

TEST(EnergyFlux, StrictlyPositiveForFatConeBumpData) {
  // The quadratic term lives near +-2 xi* and near 0; it reaches back into
  // the bump support (making the pairing strictly positive) only when the
  // radius exceeds |xi*|/3.  This geometry satisfies that with margin while
  // staying inside the unit ball.
  const FrequencyLattice lat = make_lattice(2, 32, 1.0 / 32.0);
  GridTransform ft(lat);
  const MultiplierMatrix M = make_coupling_matrix(lat);
  BumpSpec spec;
  spec.center = {0.5, -0.5, 0.0};
  spec.radius = 0.28;
  spec.amplitude = 1.0;
  const SpectralVectorField u = make_cone_bump(lat, spec);
  const double flux = energy_flux(u, M, ft);
  EXPECT_GT(flux, 0.0);

  // flux scales cubically in the amplitude (quadratic rhs paired with u)
  spec.amplitude = 2.0;
  const SpectralVectorField v = make_cone_bump(lat, spec);
  EXPECT_NEAR(energy_flux(v, M, ft), 8.0 * flux, 8.0 * flux * 1e-12);
}

TEST(EnergyFlux, VanishesForSupportSeparatedBumps) {
  // Thin bump far from the origin: supp Q(u,u) does not meet supp u, so the
  // pairing is exactly zero up to transform roundoff.
  const FrequencyLattice lat = make_lattice(2, 32, 1.0 / 32.0);
  GridTransform ft(lat);
  const MultiplierMatrix M = make_coupling_matrix(lat);
  BumpSpec spec;
  spec.center = {0.6, -0.6, 0.0};
  spec.radius = 0.05;
  const SpectralVectorField u = make_cone_bump(lat, spec);
  EXPECT_LE(std::abs(energy_flux(u, M, ft)), 1e-13);
}

TEST(EnergyFlux, DivergenceFreeProjectionHasZeroFlux) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralVectorField u = random_divfree(lat, rng);
    const SpectralVectorField r = rhs_ns(u, ft);
    const double flux = inner_product_l2(r, u);
    const double scale = std::sqrt(l2_energy(r)) * std::sqrt(l2_energy(u));
    EXPECT_LE(std::abs(flux), 1e-10 * std::max(scale, 1e-300));
  }
}

// ---------------------------------------------------------------------------
// diagnostics record
// ---------------------------------------------------------------------------

TEST(Record, ZeroFieldGivesZeroRecord) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  const MultiplierMatrix M = make_coupling_matrix(lat);
  const DiagnosticsRecord r = record(SpectralVectorField(lat), M, ft);
  EXPECT_EQ(r.sup_fourier, 0.0);
  EXPECT_EQ(r.min_fourier, 0.0);
  EXPECT_EQ(r.l2_energy, 0.0);
  EXPECT_EQ(r.heat_besov_minus1, 0.0);
  EXPECT_EQ(r.energy_flux, 0.0);
  EXPECT_EQ(r.besov_s_inf_inf.at(-1.0), 0.0);
  EXPECT_TRUE(r.finite());
}

TEST(Record, PositivityClassFieldRecord) {
  const FrequencyLattice lat = make_lattice(2, 32, 1.0 / 32.0);
  GridTransform ft(lat);
  const MultiplierMatrix M = make_coupling_matrix(lat);
  BumpSpec spec;
  spec.center = {0.5, -0.5, 0.0};
  spec.radius = 0.28;
  SpectralVectorField u = make_cone_bump(lat, spec);
  u.time = 0.25;
  const DiagnosticsRecord r = record(u, M, ft);
  EXPECT_EQ(r.t, 0.25);
  EXPECT_GE(r.min_fourier, -1e-12 * r.sup_fourier);
  EXPECT_GT(r.sup_fourier, 0.0);
  EXPECT_GT(r.l2_energy, 0.0);
  EXPECT_GT(r.energy_flux, 0.0);
  EXPECT_GT(r.besov_s_inf_inf.at(-1.0), 0.0);
  EXPECT_LE(r.divergence_residual, 1e-10 * r.sup_fourier);
  EXPECT_TRUE(r.finite());
}

TEST(Record, CenterAndGridPathsAgreeForSignDefiniteFields) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  const MultiplierMatrix M = make_coupling_matrix(lat);
  std::mt19937_64 rng(3);
  const SpectralVectorField u = random_nonnegative_even_vector(lat, rng);
  RecordOptions fast;
  RecordOptions slow;
  slow.force_grid_path = true;
  const DiagnosticsRecord a = record(u, M, ft, fast);
  const DiagnosticsRecord b = record(u, M, ft, slow);
  EXPECT_NEAR(a.heat_besov_minus1, b.heat_besov_minus1, 1e-11 * b.heat_besov_minus1);
  EXPECT_NEAR(a.besov_s_inf_inf.at(-1.0), b.besov_s_inf_inf.at(-1.0),
              1e-11 * b.besov_s_inf_inf.at(-1.0));
  EXPECT_EQ(a.energy_flux, b.energy_flux);
}

TEST(Record, RandomFieldRecordIsFinite) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  const MultiplierMatrix M = make_coupling_matrix(lat);
  std::mt19937_64 rng(9);
  SpectralVectorField u(lat);
  for (int j = 0; j < 2; ++j) u.comp[j] = random_conjugate_symmetric(lat, rng).a;
  const DiagnosticsRecord r = record(u, M, ft);
  EXPECT_TRUE(r.finite());
  EXPECT_GT(r.sup_fourier, 0.0);
}

TEST(Record, VorticityVariantUsesModelPairing) {
  const FrequencyLattice lat = lat2();
  GridTransform ft(lat);
  const SpectralScalarField w = make_vorticity_bump(lat, 5.0);
  const DiagnosticsRecord r = record_vorticity(w, ft);
  EXPECT_EQ(r.divergence_residual, 0.0);
  EXPECT_LT(r.min_fourier, 0.0);
  EXPECT_TRUE(r.finite());
  // <-(w*w), w> with w <= 0: the convolution is nonnegative, so the pairing
  // with the nonpositive w is strictly positive.
  EXPECT_GT(r.energy_flux, 0.0);
}

}  // namespace
}  // namespace tns

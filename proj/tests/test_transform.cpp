#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "tns/transform.hpp"

using namespace tns;

TEST(PaddedSize, FiveSmoothAndBigEnough) {
  EXPECT_EQ(padded_size(4), 18);     // 2 * 3^2
  EXPECT_EQ(padded_size(64), 270);   // 2 * 3^3 * 5
  EXPECT_EQ(padded_size(256), 1080); // 2^3 * 3^3 * 5
  EXPECT_EQ(padded_size(416), 1728); // 2^6 * 3^3
  for (int N : {4, 8, 31, 100}) {
    int P = padded_size(N);
    EXPECT_GE(P, 2 * (2 * N + 1));
    int q = P;
    for (int p : {2, 3, 5})
      while (q % p == 0) q /= p;
    EXPECT_EQ(q, 1);
  }
}

TEST(Transform, RoundTripIdentity) {
  std::mt19937_64 rng(23);
  for (FrequencyLattice lat : {FrequencyLattice{2, 4, 0.5}, FrequencyLattice{3, 3, 0.25}}) {
    GridTransform xf(lat);
    SpectralScalarField f = oracle::random_scalar(lat, rng);
    SpectralScalarField back = xf.to_spectral(xf.to_physical(f));
    EXPECT_LT(oracle::max_rel_diff(f, back), 1e-12);
  }
}

TEST(Transform, ZeroFieldMapsToZero) {
  FrequencyLattice lat{2, 4, 0.5};
  GridTransform xf(lat);
  SpectralScalarField z(lat);
  auto phys = xf.to_physical(z);
  for (const cplx& p : phys) EXPECT_EQ(p, (cplx{0.0, 0.0}));
  EXPECT_DOUBLE_EQ(max_abs(xf.self_convolve(z)), 0.0);
}

TEST(Transform, DeltaConvolutionMatchesHandValue) {
  FrequencyLattice lat{2, 4, 0.5};
  GridTransform xf(lat);
  SpectralScalarField f(lat);
  f.a[lat.flatten({1, -1, 0})] = cplx{1.0, 0.0};
  SpectralScalarField c = xf.self_convolve(f);
  EXPECT_NEAR(c.a[lat.flatten({2, -2, 0})].real(), 0.25, 1e-14);
  // everything else vanishes to rounding
  c.a[lat.flatten({2, -2, 0})] = cplx{0.0, 0.0};
  EXPECT_LT(max_abs(c), 1e-14);
}

TEST(Transform, ConvolveMatchesDirectSumGeneralFields) {
  std::mt19937_64 rng(29);
  for (FrequencyLattice lat : {FrequencyLattice{2, 4, 0.5}, FrequencyLattice{3, 3, 0.7}}) {
    GridTransform xf(lat);
    for (int trial = 0; trial < 5; ++trial) {
      SpectralScalarField f = oracle::random_scalar(lat, rng);
      SpectralScalarField g = oracle::random_scalar(lat, rng);
      SpectralScalarField fast = xf.convolve(f, g);
      SpectralScalarField slow = oracle::direct_convolve(f, g);
      EXPECT_LT(oracle::max_rel_diff(fast, slow), 1e-12);
    }
  }
}

TEST(Transform, ConvolveMatchesDirectSumRealPath) {
  std::mt19937_64 rng(31);
  for (FrequencyLattice lat : {FrequencyLattice{2, 4, 0.5}, FrequencyLattice{3, 3, 0.7}}) {
    GridTransform xf(lat);
    for (int trial = 0; trial < 5; ++trial) {
      SpectralScalarField f = oracle::random_conjugate_symmetric(lat, rng);
      SpectralScalarField g = oracle::random_conjugate_symmetric(lat, rng);
      ASSERT_TRUE(is_conjugate_symmetric(f));
      SpectralScalarField fast = xf.convolve(f, g);
      SpectralScalarField slow = oracle::direct_convolve(f, g);
      EXPECT_LT(oracle::max_rel_diff(fast, slow), 1e-12);
      // the half-spectrum path must hand back an exactly symmetric field
      EXPECT_TRUE(is_conjugate_symmetric(fast));
    }
  }
}

TEST(Transform, SelfConvolvePositivityClass) {
  std::mt19937_64 rng(37);
  FrequencyLattice lat{2, 4, 0.5};
  GridTransform xf(lat);
  for (int trial = 0; trial < 5; ++trial) {
    SpectralScalarField f = oracle::random_nonnegative_even(lat, rng);
    SpectralScalarField c = xf.self_convolve(f);
    EXPECT_LT(oracle::max_rel_diff(c, oracle::direct_convolve(f, f)), 1e-12);
    // nonnegative in, nonnegative out up to rounding noise
    EXPECT_GE(min_real(c), -1e-12 * std::max(1.0, max_abs(c)));
    EXPECT_TRUE(is_conjugate_symmetric(c));
  }
}

TEST(Transform, CommutativityThroughEngine) {
  std::mt19937_64 rng(41);
  FrequencyLattice lat{2, 4, 0.5};
  GridTransform xf(lat);
  SpectralScalarField f = oracle::random_scalar(lat, rng);
  SpectralScalarField g = oracle::random_scalar(lat, rng);
  EXPECT_LT(oracle::max_rel_diff(xf.convolve(f, g), xf.convolve(g, f)), 1e-13);
}

TEST(Transform, PhysicalSupOfCosinePair) {
  // coefficient c at +/-m gives 2 c h^d cos(...), with sup 2 c h^d
  FrequencyLattice lat{2, 4, 0.5};
  GridTransform xf(lat);
  SpectralScalarField f(lat);
  f.a[lat.flatten({2, 1, 0})] = cplx{3.0, 0.0};
  f.a[lat.flatten({-2, -1, 0})] = cplx{3.0, 0.0};
  EXPECT_NEAR(xf.physical_sup(f), 2.0 * 3.0 * 0.25, 1e-12);
}

TEST(Transform, PhysicalSupVectorMagnitude) {
  FrequencyLattice lat{2, 4, 0.5};
  GridTransform xf(lat);
  SpectralVectorField u(lat);
  // both components carry the same cosine: magnitude sqrt(2) * scalar sup
  for (int j = 0; j < 2; ++j) {
    u.comp[j][lat.flatten({1, 1, 0})] = cplx{1.0, 0.0};
    u.comp[j][lat.flatten({-1, -1, 0})] = cplx{1.0, 0.0};
  }
  EXPECT_NEAR(xf.physical_sup(u), std::sqrt(2.0) * 2.0 * 0.25, 1e-12);
}

TEST(Transform, RegistryReturnsSameEngine) {
  FrequencyLattice lat{2, 8, 0.5};
  GridTransform& a = transform_for(lat);
  GridTransform& b = transform_for(lat);
  EXPECT_EQ(&a, &b);
  release_transforms();
}

// Self-checks for the brute-force convolution oracle.  The oracle is the
// reference everything else is measured against, so its own behaviour is
// pinned first with hand-computed values and structural properties.

#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"

using namespace tns;

namespace {
FrequencyLattice tiny2{2, 4, 0.5};
FrequencyLattice tiny3{3, 3, 0.5};
}  // namespace

TEST(ConvolutionOracle, DeltaTimesDeltaLandsAtSumWithHSquared) {
  // unit coefficient at xi = (h, -h) convolved with itself:
  // single coefficient h^2 at (2h, -2h)
  SpectralScalarField f(tiny2);
  f.a[tiny2.flatten({1, -1, 0})] = cplx{1.0, 0.0};
  SpectralScalarField c = oracle::direct_convolve(f, f);
  for_each_point(tiny2, [&](std::size_t idx, const std::array<int, 3>& m) {
    if (m == std::array<int, 3>{2, -2, 0}) {
      EXPECT_DOUBLE_EQ(c.a[idx].real(), 0.25);  // h^2 = 0.25
      EXPECT_DOUBLE_EQ(c.a[idx].imag(), 0.0);
    } else {
      EXPECT_EQ(c.a[idx], (cplx{0.0, 0.0}));
    }
  });
}

TEST(ConvolutionOracle, ThreeDimensionalDelta) {
  SpectralScalarField f(tiny3);
  f.a[tiny3.flatten({1, -1, 1})] = cplx{2.0, 0.0};
  SpectralScalarField c = oracle::direct_convolve(f, f);
  // h^3 * 2 * 2 = 0.5 at (2, -2, 2)
  EXPECT_DOUBLE_EQ(c.a[tiny3.flatten({2, -2, 2})].real(), 0.125 * 4.0);
  EXPECT_DOUBLE_EQ(l1_mass(c), 0.125 * 0.5);
}

TEST(ConvolutionOracle, TruncationDropsOutOfRangeSum) {
  SpectralScalarField f(tiny2);
  f.a[tiny2.flatten({3, 3, 0})] = cplx{1.0, 0.0};
  SpectralScalarField c = oracle::direct_convolve(f, f);
  // sum index (6,6) is outside the box, so everything is truncated away
  EXPECT_DOUBLE_EQ(max_abs(c), 0.0);
}

TEST(ConvolutionOracle, CommutativeAndBilinear) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    SpectralScalarField f = oracle::random_scalar(tiny2, rng);
    SpectralScalarField g = oracle::random_scalar(tiny2, rng);
    SpectralScalarField h = oracle::random_scalar(tiny2, rng);

    SpectralScalarField fg = oracle::direct_convolve(f, g);
    SpectralScalarField gf = oracle::direct_convolve(g, f);
    EXPECT_LT(oracle::max_rel_diff(fg, gf), 1e-13);

    // f*(g + 2h) = f*g + 2 f*h
    SpectralScalarField gh(tiny2);
    for (std::size_t i = 0; i < gh.a.size(); ++i) gh.a[i] = g.a[i] + 2.0 * h.a[i];
    SpectralScalarField lhs = oracle::direct_convolve(f, gh);
    SpectralScalarField fh = oracle::direct_convolve(f, h);
    SpectralScalarField rhs(tiny2);
    for (std::size_t i = 0; i < rhs.a.size(); ++i) rhs.a[i] = fg.a[i] + 2.0 * fh.a[i];
    EXPECT_LT(oracle::max_rel_diff(lhs, rhs), 1e-13);
  }
}

TEST(ConvolutionOracle, NonnegativeInNonnegativeOut) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    SpectralScalarField f = oracle::random_nonnegative_even(tiny2, rng);
    SpectralScalarField g = oracle::random_nonnegative_even(tiny2, rng);
    SpectralScalarField c = oracle::direct_convolve(f, g);
    EXPECT_GE(min_real(c), 0.0);
    for (const cplx& z : c.a) EXPECT_EQ(z.imag(), 0.0);
  }
}

TEST(ConvolutionOracle, PreservesConjugateSymmetry) {
  std::mt19937_64 rng(17);
  SpectralScalarField f = oracle::random_conjugate_symmetric(tiny2, rng);
  SpectralScalarField g = oracle::random_conjugate_symmetric(tiny2, rng);
  ASSERT_TRUE(is_conjugate_symmetric(f));
  SpectralScalarField c = oracle::direct_convolve(f, g);
  // symmetry survives up to rounding; verify with a small tolerance applied
  // to the mirrored-pair mismatch
  double worst = 0.0;
  for (std::size_t i = 0; i < c.a.size(); ++i) {
    const cplx z = c.a[i];
    const cplx w = std::conj(c.a[c.lattice.mirror(i)]);
    worst = std::max(worst, std::abs(z - w));
  }
  EXPECT_LT(worst, 1e-12 * std::max(1.0, max_abs(c)));
}

TEST(ConvolutionOracle, EvenFieldsGiveEvenResult) {
  std::mt19937_64 rng(19);
  SpectralScalarField f = oracle::random_nonnegative_even(tiny3, rng);
  SpectralScalarField c = oracle::direct_convolve(f, f);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.a.size(); ++i)
    worst = std::max(worst, std::abs(c.a[i] - c.a[c.lattice.mirror(i)]));
  EXPECT_LT(worst, 1e-12 * std::max(1.0, max_abs(c)));
}

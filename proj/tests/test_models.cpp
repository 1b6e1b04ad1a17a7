#include "tns/models.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "support/oracles.hpp"
#include "tns/field.hpp"
#include "tns/lattice.hpp"
#include "tns/multipliers.hpp"
#include "tns/transform.hpp"

namespace {

using tns::cplx;
using tns::FrequencyLattice;
using tns::GridTransform;
using tns::SpectralScalarField;
using tns::SpectralVectorField;

// Small lattices keep the direct double-sum oracles affordable.
FrequencyLattice small2() { return FrequencyLattice{2, 4, 0.5}; }
FrequencyLattice small3() { return FrequencyLattice{3, 3, 0.5}; }

TEST(ModelKind, NamesRoundTrip) {
  using tns::ModelKind;
  for (ModelKind k : {ModelKind::navier_stokes, ModelKind::toy, ModelKind::vorticity_toy,
                      ModelKind::toy_hyperviscous})
    EXPECT_EQ(tns::parse_model(tns::model_name(k)), k);
  EXPECT_EQ(tns::model_name(ModelKind::navier_stokes), "ns");
  EXPECT_THROW(tns::parse_model("euler"), std::invalid_argument);
}

TEST(Dissipation, TabulatedValues) {
  auto lat = small2();
  auto sig = tns::make_dissipation(lat, 1.0);
  EXPECT_DOUBLE_EQ(sig[lat.flatten({0, 0, 0})], 0.0);
  EXPECT_DOUBLE_EQ(sig[lat.flatten({2, -2, 0})], 2.0);  // |(1,-1)|^2
  auto sig2 = tns::make_dissipation(lat, 2.0);
  EXPECT_DOUBLE_EQ(sig2[lat.flatten({2, -2, 0})], 4.0);
  EXPECT_THROW(tns::make_dissipation(lat, 0.5), std::invalid_argument);
}

TEST(RhsTns, MatchesDirectOracle) {
  for (const FrequencyLattice& lat : {small2(), small3()}) {
    GridTransform ft(lat);
    auto mm = tns::make_coupling_matrix(lat);
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 3; ++trial) {
      auto u = tns::oracle::random_nonnegative_even_vector(lat, rng);
      auto fast = tns::rhs_tns(u, mm, ft);
      auto slow = tns::oracle::direct_rhs_tns(u);
      EXPECT_LE(tns::oracle::max_rel_diff(fast, slow), 1e-12);
    }
  }
}

TEST(RhsTns, PreservesNonnegativityAndDivergenceFree) {
  auto lat = small3();
  GridTransform ft(lat);
  auto mm = tns::make_coupling_matrix(lat);
  std::mt19937_64 rng(102);
  auto u = tns::oracle::random_nonnegative_even_vector(lat, rng);
  auto rhs = tns::rhs_tns(u, mm, ft);

  const double scale = tns::max_abs(rhs);
  EXPECT_GE(tns::min_real(rhs), -1e-12 * scale);
  for (int j = 0; j < rhs.dim(); ++j)
    for (const cplx& z : rhs.comp[j]) EXPECT_LE(std::abs(z.imag()), 1e-12 * scale);
  EXPECT_LE(tns::divergence_residual(rhs), 1e-10 * scale);
  EXPECT_TRUE(tns::is_conjugate_symmetric(rhs));
}

TEST(RhsTns, DiagonalDominationByComponentSelfTerm) {
  // rhs^j >= row_j (u^j * u^j) coefficientwise for nonnegative states: the
  // cross terms it also contains are nonnegative.
  auto lat = small2();
  GridTransform ft(lat);
  auto mm = tns::make_coupling_matrix(lat);
  std::mt19937_64 rng(103);
  auto u = tns::oracle::random_nonnegative_even_vector(lat, rng);
  auto rhs = tns::rhs_tns(u, mm, ft);
  for (int j = 0; j < 2; ++j) {
    auto self = tns::oracle::direct_convolve(tns::component_view(u, j),
                                             tns::component_view(u, j));
    for (std::size_t idx = 0; idx < lat.point_count(); ++idx) {
      const double lower = mm.rows[j][idx] * self.a[idx].real();
      EXPECT_GE(rhs.comp[j][idx].real(), lower - 1e-12 * (1.0 + std::abs(lower)));
    }
  }
}

TEST(RhsNs, MatchesDirectOracle) {
  for (const FrequencyLattice& lat : {small2(), small3()}) {
    GridTransform ft(lat);
    std::mt19937_64 rng(104);
    for (int trial = 0; trial < 3; ++trial) {
      auto u = tns::oracle::random_divfree(lat, rng);
      auto fast = tns::rhs_ns(u, ft);
      auto slow = tns::oracle::direct_rhs_ns(u);
      EXPECT_LE(tns::oracle::max_rel_diff(fast, slow), 1e-12);
    }
  }
}

TEST(RhsNs, DivergenceFreeZeroFluxZeroMean) {
  auto lat = small2();
  GridTransform ft(lat);
  std::mt19937_64 rng(105);
  auto u = tns::oracle::random_divfree(lat, rng);
  auto rhs = tns::rhs_ns(u, ft);

  EXPECT_TRUE(tns::is_conjugate_symmetric(rhs));
  EXPECT_LE(tns::divergence_residual(rhs), 1e-10 * tns::max_abs(rhs));
  EXPECT_EQ(rhs.comp[0][lat.flatten({0, 0, 0})], cplx(0.0, 0.0));

  // The nonlinear + pressure term conserves energy: Re<rhs, u> = 0 relative to
  // the Cauchy-Schwarz scale.
  double flux = 0.0, scale = 0.0;
  for (int j = 0; j < 2; ++j)
    for (std::size_t idx = 0; idx < lat.point_count(); ++idx) {
      flux += (rhs.comp[j][idx] * std::conj(u.comp[j][idx])).real();
      scale += std::abs(rhs.comp[j][idx]) * std::abs(u.comp[j][idx]);
    }
  EXPECT_LE(std::abs(flux), 1e-10 * (scale + 1e-300));
}

TEST(RhsNs, AsymmetricStatesUseFallbackAndMatchOracle) {
  // Components without conjugate symmetry exercise the generic convolution
  // path; the double-sum oracle covers both paths uniformly.
  auto lat = small2();
  GridTransform ft(lat);
  std::mt19937_64 rng(106);
  SpectralVectorField u(lat);
  for (int j = 0; j < 2; ++j) u.comp[j] = tns::oracle::random_scalar(lat, rng).a;
  ASSERT_FALSE(tns::is_conjugate_symmetric(u));
  auto fast = tns::rhs_ns(u, ft);
  auto slow = tns::oracle::direct_rhs_ns(u);
  EXPECT_LE(tns::oracle::max_rel_diff(fast, slow), 1e-12);
}

TEST(RhsVorticityToy, MatchesOracleAndPreservesSignClass) {
  auto lat = small2();
  GridTransform ft(lat);
  std::mt19937_64 rng(107);
  auto wpos = tns::oracle::random_nonnegative_even(lat, rng);
  SpectralScalarField w = wpos;
  for (cplx& z : w.a) z = -z;  // nonpositive state

  auto fast = tns::rhs_vorticity_toy(w, ft);
  auto slow = tns::oracle::direct_rhs_vorticity_toy(w);
  EXPECT_LE(tns::oracle::max_rel_diff(fast, slow), 1e-12);

  // (w * w) >= 0, so rhs <= 0: the nonpositive class is invariant.
  const double scale = tns::max_abs(fast);
  for (const cplx& z : fast.a) {
    EXPECT_LE(z.real(), 1e-12 * scale);
    EXPECT_LE(std::abs(z.imag()), 1e-12 * scale);
  }
  EXPECT_TRUE(tns::is_conjugate_symmetric(fast));
}

TEST(BiotSavart, SingleModeFrozenValueAndDivergence) {
  FrequencyLattice lat{2, 8, 1.0};
  SpectralScalarField w(lat);
  const cplx amp(0.7, 0.0);
  w.a[lat.flatten({0, 1, 0})] = amp;
  w.a[lat.flatten({0, -1, 0})] = std::conj(amp);

  auto u = tns::velocity_from_vorticity(w);
  // xi = (0, 1): u_hat = i(-1, 0) w = (-i w, 0).
  EXPECT_EQ(u.comp[0][lat.flatten({0, 1, 0})], cplx(0.0, -0.7));
  EXPECT_EQ(u.comp[1][lat.flatten({0, 1, 0})], cplx(0.0, 0.0));
  EXPECT_EQ(u.comp[0][lat.flatten({0, 0, 0})], cplx(0.0, 0.0));
  EXPECT_LE(tns::divergence_residual(u), 1e-14);

  std::mt19937_64 rng(108);
  auto wr = tns::oracle::random_conjugate_symmetric(lat, rng);
  auto ur = tns::velocity_from_vorticity(wr);
  EXPECT_LE(tns::divergence_residual(ur), 1e-13 * (1.0 + tns::max_abs(ur)));
  EXPECT_TRUE(tns::is_conjugate_symmetric(ur));

  // The curl orientation paired with the (-xi2, xi1) stream symbol recovers
  // the vorticity on every nonzero mode: i xi2 u1 - i xi1 u2 = w.
  tns::for_each_point(lat, [&](std::size_t idx, const std::array<int, 3>& mi) {
    if (mi[0] == 0 && mi[1] == 0) return;
    auto xi = lat.frequency(mi);
    const cplx curl = cplx{0.0, xi[1]} * ur.comp[0][idx] - cplx{0.0, xi[0]} * ur.comp[1][idx];
    EXPECT_LE(std::abs(curl - wr.a[idx]), 1e-13 * (1.0 + std::abs(wr.a[idx])));
  });

  SpectralScalarField w3(FrequencyLattice{3, 3, 1.0});
  EXPECT_THROW(tns::velocity_from_vorticity(w3), std::invalid_argument);
}

TEST(BatchedProducts, MatchConvolveBitwise) {
  auto lat = small2();
  GridTransform ft(lat);
  std::mt19937_64 rng(109);
  auto f = tns::oracle::random_conjugate_symmetric(lat, rng);
  auto g = tns::oracle::random_conjugate_symmetric(lat, rng);

  std::vector<double> sf, sg;
  ft.real_samples(f, sf);
  ft.real_samples(g, sg);
  auto batched = ft.product_spectrum(sf, sg);
  auto direct = ft.convolve(f, g);
  for (std::size_t i = 0; i < lat.point_count(); ++i) EXPECT_EQ(batched.a[i], direct.a[i]);
}

}  // namespace

#pragma once

// Nonlinear right-hand sides of the model family, all evaluated spectrally:
//
//   * navier_stokes:   rhs^j = -Leray[ sum_m i xi_m (u^m * u^j) ]      (* = lattice convolution)
//   * toy:             rhs^j = row_j(xi) (sigma * sigma),  sigma = sum_i u^i
//   * toy_hyperviscous: same nonlinearity, stronger dissipation symbol
//   * vorticity_toy:   rhs  = -(w * w)                                  (scalar)
//
// The toy right-hand side factors through the constant-row coupling matrix,
// so divergence-freeness is automatic (the rows annihilate xi) and
// coefficientwise nonnegativity is preserved: every row is >= 0 and the
// self-convolution of a nonnegative field is nonnegative.  Dissipation is
// handled separately by the time stepper (integrating-factor schemes), so
// these functions return only the nonlinear term.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "tns/field.hpp"
#include "tns/lattice.hpp"
#include "tns/multipliers.hpp"
#include "tns/transform.hpp"

namespace tns {

enum class ModelKind { navier_stokes, toy, vorticity_toy, toy_hyperviscous };

inline std::string model_name(ModelKind k) {
  switch (k) {
    case ModelKind::navier_stokes: return "ns";
    case ModelKind::toy: return "toy";
    case ModelKind::vorticity_toy: return "vorticity_toy";
    case ModelKind::toy_hyperviscous: return "toy_hyperviscous";
  }
  return "?";
}

inline ModelKind parse_model(const std::string& s) {
  if (s == "ns") return ModelKind::navier_stokes;
  if (s == "toy") return ModelKind::toy;
  if (s == "vorticity_toy") return ModelKind::vorticity_toy;
  if (s == "toy_hyperviscous") return ModelKind::toy_hyperviscous;
  throw std::invalid_argument("unknown model kind: " + s);
}

struct ModelSpec {
  ModelKind kind = ModelKind::toy;
  int dim = 2;
  double alpha = 1.0;  // dissipation exponent, used by toy_hyperviscous
};

inline void validate_model(const ModelSpec& m) {
  if (m.dim != 2 && m.dim != 3) throw std::invalid_argument("ModelSpec: dim must be 2 or 3");
  if (m.kind == ModelKind::vorticity_toy && m.dim != 2)
    throw std::invalid_argument("ModelSpec: vorticity_toy requires dim = 2");
  if (m.alpha < 1.0) throw std::invalid_argument("ModelSpec: alpha must be >= 1");
}

inline double model_alpha(const ModelSpec& m) {
  return m.kind == ModelKind::toy_hyperviscous ? m.alpha : 1.0;
}

// sigma(xi) = |xi|^(2 alpha), tabulated over the lattice.
inline std::vector<double> make_dissipation(const FrequencyLattice& lat, double alpha = 1.0) {
  std::vector<double> sig(lat.point_count(), 0.0);
  for_each_point(lat, [&](std::size_t idx, const std::array<int, 3>& mi) {
    sig[idx] = dissipation_symbol(lat.frequency(mi), lat.dim, alpha);
  });
  return sig;
}

// Toy nonlinearity: one self-convolution of the component sum, scaled rowwise.
inline SpectralVectorField rhs_tns(const SpectralVectorField& u, const MultiplierMatrix& m,
                                   GridTransform& ft) {
  if (u.lattice != m.lattice) throw std::invalid_argument("rhs_tns: lattice mismatch");
  const SpectralScalarField sigma = component_sum(u);
  const SpectralScalarField conv = ft.self_convolve(sigma);
  SpectralVectorField rhs(u.lattice, u.time);
  const std::size_t n = u.lattice.point_count();
  for (int j = 0; j < u.dim(); ++j) {
    const std::vector<double>& row = m.rows[j];
    for (std::size_t idx = 0; idx < n; ++idx) rhs.comp[j][idx] = row[idx] * conv.a[idx];
  }
  return rhs;
}

// Navier-Stokes nonlinearity with the divergence-free projection applied on
// the fly.  When every component is conjugate-symmetric (the generic case for
// model states), each component is transformed once and the dim*(dim+1)/2
// pairwise products share those samples; otherwise it falls back to one
// generic convolution per pair.
inline SpectralVectorField rhs_ns(const SpectralVectorField& u, GridTransform& ft) {
  const FrequencyLattice& lat = u.lattice;
  const int d = u.dim();
  auto pid = [d](int m, int j) {  // index of unordered pair (m <= j)
    return m * d - m * (m - 1) / 2 + (j - m);
  };

  std::vector<SpectralScalarField> conv;
  conv.reserve(d * (d + 1) / 2);
  bool all_symmetric = true;
  for (int j = 0; j < d; ++j)
    if (!is_conjugate_symmetric(component_view(u, j))) all_symmetric = false;

  if (all_symmetric) {
    std::vector<std::vector<double>> samples(d);
    for (int j = 0; j < d; ++j) ft.real_samples(component_view(u, j), samples[j]);
    for (int m = 0; m < d; ++m)
      for (int j = m; j < d; ++j)
        conv.push_back(ft.product_spectrum(samples[m], samples[j], u.time));
  } else {
    for (int m = 0; m < d; ++m)
      for (int j = m; j < d; ++j) {
        SpectralScalarField a = component_view(u, m);
        SpectralScalarField b = component_view(u, j);
        conv.push_back(ft.convolve(a, b));
      }
  }

  SpectralVectorField rhs(lat, u.time);
  for_each_point(lat, [&](std::size_t idx, const std::array<int, 3>& mi) {
    const std::array<double, 3> xi = lat.frequency(mi);
    double n2 = 0.0;
    for (int a = 0; a < d; ++a) n2 += xi[a] * xi[a];
    std::array<cplx, 3> w{};
    for (int j = 0; j < d; ++j) {
      cplx acc{0.0, 0.0};
      for (int m = 0; m < d; ++m) {
        const SpectralScalarField& c = conv[m <= j ? pid(m, j) : pid(j, m)];
        acc += cplx{0.0, xi[m]} * c.a[idx];
      }
      w[j] = acc;
    }
    if (n2 > 0.0) {
      cplx xw{0.0, 0.0};
      for (int m = 0; m < d; ++m) xw += xi[m] * w[m];
      for (int j = 0; j < d; ++j) rhs.comp[j][idx] = -(w[j] - xi[j] * (xw / n2));
    } else {
      for (int j = 0; j < d; ++j) rhs.comp[j][idx] = -w[j];
    }
  });
  return rhs;
}

// Scalar vorticity surrogate: rhs = -(w * w).  A coefficientwise nonpositive
// state stays nonpositive, since the self-convolution is then nonnegative.
inline SpectralScalarField rhs_vorticity_toy(const SpectralScalarField& w, GridTransform& ft) {
  SpectralScalarField conv = ft.self_convolve(w);
  for (cplx& z : conv.a) z = -z;
  return conv;
}

// Biot-Savart in two dimensions: u_hat = i (-xi2, xi1) w_hat / |xi|^2, zero at
// the origin.  The resulting field is divergence-free exactly.
inline SpectralVectorField velocity_from_vorticity(const SpectralScalarField& w) {
  if (w.lattice.dim != 2)
    throw std::invalid_argument("velocity_from_vorticity: requires a 2-D lattice");
  SpectralVectorField u(w.lattice, w.time);
  for_each_point(w.lattice, [&](std::size_t idx, const std::array<int, 3>& mi) {
    const std::array<double, 3> xi = w.lattice.frequency(mi);
    const double n2 = xi[0] * xi[0] + xi[1] * xi[1];
    if (n2 == 0.0) return;
    const cplx f = cplx{0.0, 1.0} * (w.a[idx] / n2);
    u.comp[0][idx] = -xi[1] * f;
    u.comp[1][idx] = xi[0] * f;
  });
  return u;
}

}  // namespace tns

#pragma once

// Spectral fields: plain value types holding complex Fourier coefficients
// over a FrequencyLattice.  Fields are treated as immutable values by the
// numerical modules; mutation happens only while a routine assembles its
// result.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tns/lattice.hpp"

namespace tns {

using cplx = std::complex<double>;

struct SpectralScalarField {
  FrequencyLattice lattice;
  std::vector<cplx> a;  // coefficient per lattice point
  double time = 0.0;

  SpectralScalarField() = default;
  explicit SpectralScalarField(const FrequencyLattice& lat, double t = 0.0)
      : lattice(lat), a(lat.point_count(), cplx{0.0, 0.0}), time(t) {}
};

struct SpectralVectorField {
  FrequencyLattice lattice;
  std::vector<std::vector<cplx>> comp;  // dim components
  double time = 0.0;

  SpectralVectorField() = default;
  explicit SpectralVectorField(const FrequencyLattice& lat, double t = 0.0)
      : lattice(lat), comp(lat.dim, std::vector<cplx>(lat.point_count(), cplx{0.0, 0.0})),
        time(t) {}

  int dim() const { return lattice.dim; }
};

inline void require_same_lattice(const FrequencyLattice& a, const FrequencyLattice& b,
                                 const char* who) {
  if (a != b) throw std::invalid_argument(std::string(who) + ": lattice mismatch");
}

// ---------------------------------------------------------------------------
// elementary reductions
// ---------------------------------------------------------------------------

inline double max_abs(const SpectralScalarField& f) {
  double m = 0.0;
  for (const cplx& c : f.a) m = std::max(m, std::abs(c));
  return m;
}

inline double max_abs(const SpectralVectorField& u) {
  double m = 0.0;
  for (const auto& c : u.comp)
    for (const cplx& z : c) m = std::max(m, std::abs(z));
  return m;
}

inline double min_real(const SpectralScalarField& f) {
  double m = std::numeric_limits<double>::infinity();
  for (const cplx& c : f.a) m = std::min(m, c.real());
  return m;
}

inline double min_real(const SpectralVectorField& u) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : u.comp)
    for (const cplx& z : c) m = std::min(m, z.real());
  return m;
}

// h^dim * sum |coefficients| — the frequency-side L1 mass.
inline double l1_mass(const SpectralScalarField& f) {
  double s = 0.0;
  for (const cplx& c : f.a) s += std::abs(c);
  return std::pow(f.lattice.h, f.lattice.dim) * s;
}

inline double l1_mass(const SpectralVectorField& u) {
  double s = 0.0;
  for (const auto& c : u.comp)
    for (const cplx& z : c) s += std::abs(z);
  return std::pow(u.lattice.h, u.lattice.dim) * s;
}

// h^dim * sum |coefficients|^2.
inline double l2_energy(const SpectralVectorField& u) {
  double s = 0.0;
  for (const auto& c : u.comp)
    for (const cplx& z : c) s += std::norm(z);
  return std::pow(u.lattice.h, u.lattice.dim) * s;
}

inline double l2_energy(const SpectralScalarField& f) {
  double s = 0.0;
  for (const cplx& z : f.a) s += std::norm(z);
  return std::pow(f.lattice.h, f.lattice.dim) * s;
}

// max_xi | xi . u(xi) | — how far the field is from divergence-free.
inline double divergence_residual(const SpectralVectorField& u) {
  double worst = 0.0;
  for_each_point(u.lattice, [&](std::size_t idx, const std::array<int, 3>& m) {
    cplx d{0.0, 0.0};
    for (int a = 0; a < u.lattice.dim; ++a) d += (u.lattice.h * m[a]) * u.comp[a][idx];
    worst = std::max(worst, std::abs(d));
  });
  return worst;
}

// Exact test used to route real-valued (in physical space) fields through the
// half-spectrum transform path.  Fields built by the generators satisfy the
// conjugate symmetry bit-for-bit, and every operation in the library
// preserves it exactly, so no tolerance is needed.
inline bool is_conjugate_symmetric(const SpectralScalarField& f) {
  const auto& lat = f.lattice;
  for (std::size_t idx = 0; idx < f.a.size(); ++idx) {
    const std::size_t mir = lat.mirror(idx);
    if (mir < idx) continue;  // each pair checked once
    const cplx z = f.a[idx];
    const cplx w = f.a[mir];
    if (z.real() != w.real() || z.imag() != -w.imag()) return false;
  }
  return true;
}

inline bool is_conjugate_symmetric(const SpectralVectorField& u) {
  const auto& lat = u.lattice;
  for (const auto& c : u.comp) {
    for (std::size_t idx = 0; idx < c.size(); ++idx) {
      const std::size_t mir = lat.mirror(idx);
      if (mir < idx) continue;
      const cplx z = c[idx];
      const cplx w = c[mir];
      if (z.real() != w.real() || z.imag() != -w.imag()) return false;
    }
  }
  return true;
}

inline SpectralScalarField component_view(const SpectralVectorField& u, int j) {
  SpectralScalarField f(u.lattice, u.time);
  f.a = u.comp[j];
  return f;
}

// Sum of all components, used by the sign-definite quadratic coupling.
inline SpectralScalarField component_sum(const SpectralVectorField& u) {
  SpectralScalarField f(u.lattice, u.time);
  f.a = u.comp[0];
  for (int j = 1; j < u.dim(); ++j)
    for (std::size_t i = 0; i < f.a.size(); ++i) f.a[i] += u.comp[j][i];
  return f;
}

}  // namespace tns

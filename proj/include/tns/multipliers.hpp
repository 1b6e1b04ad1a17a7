#pragma once

// Fourier symbols: the divergence-free projector, the sign-definite quadratic
// coupling matrix, cone membership, and dissipation symbols.
//
// The coupling matrix has constant rows: entry (i, j) depends only on the row
// index i.  Row i equals |xi| * (proj(xi) * ones)_i on the cone and vanishes
// off it, which makes every entry nonnegative on the cone and annihilates xi
// from the left (the output of the quadratic term is automatically
// divergence-free).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tns/lattice.hpp"

namespace tns {

// Strict sector/cone membership.  2-D: xi1*xi2 < 0.  3-D adds xi1*xi3 < 0
// and |xi2| < min(|xi1|, |xi3|).  Boundary points (and the origin) are out.
inline bool cone_indicator(const std::array<double, 3>& xi, int dim) {
  if (dim == 2) return xi[0] * xi[1] < 0.0;
  return xi[0] * xi[1] < 0.0 && xi[0] * xi[2] < 0.0 &&
         std::abs(xi[1]) < std::min(std::abs(xi[0]), std::abs(xi[2]));
}

// I - xi xi^T / |xi|^2; identity at xi = 0 by convention.
inline std::array<std::array<double, 3>, 3> leray_symbol(const std::array<double, 3>& xi,
                                                         int dim) {
  std::array<std::array<double, 3>, 3> m{};
  double n2 = 0.0;
  for (int a = 0; a < dim; ++a) n2 += xi[a] * xi[a];
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double v = (i == j) ? 1.0 : 0.0;
      if (n2 > 0.0) v -= xi[i] * xi[j] / n2;
      m[i][j] = v;
    }
  return m;
}

// Constant row values of the coupling matrix; zero off the cone.
inline std::array<double, 3> coupling_row_values(const std::array<double, 3>& xi, int dim) {
  std::array<double, 3> r{0.0, 0.0, 0.0};
  if (!cone_indicator(xi, dim)) return r;
  double n2 = 0.0;
  for (int a = 0; a < dim; ++a) n2 += xi[a] * xi[a];
  const double n = std::sqrt(n2);
  if (dim == 2) {
    r[0] = (xi[1] * xi[1] - xi[0] * xi[1]) / n;
    r[1] = (xi[0] * xi[0] - xi[0] * xi[1]) / n;
  } else {
    r[0] = (xi[1] * xi[1] + xi[2] * xi[2] - xi[0] * xi[1] - xi[0] * xi[2]) / n;
    r[1] = (xi[0] * xi[0] + xi[2] * xi[2] - xi[0] * xi[1] - xi[1] * xi[2]) / n;
    r[2] = (xi[0] * xi[0] + xi[1] * xi[1] - xi[0] * xi[2] - xi[1] * xi[2]) / n;
  }
  return r;
}

// Full dim x dim coupling matrix (rows constant across columns).
inline std::array<std::array<double, 3>, 3> toy_matrix(const std::array<double, 3>& xi,
                                                       int dim) {
  const std::array<double, 3> rows = coupling_row_values(xi, dim);
  std::array<std::array<double, 3>, 3> m{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m[i][j] = rows[i];
  return m;
}

// |xi|^(2 alpha); alpha = 1 is the plain Laplacian symbol.
inline double dissipation_symbol(const std::array<double, 3>& xi, int dim, double alpha) {
  if (alpha < 1.0) throw std::invalid_argument("dissipation_symbol: alpha must be >= 1");
  double n2 = 0.0;
  for (int a = 0; a < dim; ++a) n2 += xi[a] * xi[a];
  if (alpha == 1.0) return n2;
  return std::pow(n2, alpha);
}

// ---------------------------------------------------------------------------
// coupling matrix tabulated over a lattice
// ---------------------------------------------------------------------------

struct MultiplierMatrix {
  FrequencyLattice lattice;
  std::vector<std::vector<double>> rows;  // rows[i][flat] = entry (i, j) for every j

  double entry(int i, int /*j*/, std::size_t idx) const { return rows[i][idx]; }
  double diag(int j, std::size_t idx) const { return rows[j][idx]; }
};

inline MultiplierMatrix make_coupling_matrix(const FrequencyLattice& lat) {
  MultiplierMatrix m;
  m.lattice = lat;
  m.rows.assign(lat.dim, std::vector<double>(lat.point_count(), 0.0));
  for_each_point(lat, [&](std::size_t idx, const std::array<int, 3>& mi) {
    const std::array<double, 3> r = coupling_row_values(lat.frequency(mi), lat.dim);
    for (int i = 0; i < lat.dim; ++i) m.rows[i][idx] = r[i];
  });
  return m;
}

// ---------------------------------------------------------------------------
// positivity verification
// ---------------------------------------------------------------------------

struct PositivityViolation {
  std::array<double, 3> xi{};
  int row = 0;
  double value = 0.0;
};

struct PositivityReport {
  int dim = 0;
  std::size_t lattice_points = 0;
  std::size_t cone_lattice_points = 0;
  long long samples = 0;
  double min_entry_on_cone = 0.0;       // over lattice points and samples
  double max_abs_entry_off_cone = 0.0;  // over lattice points (must be exactly 0)
  double max_identity_error = 0.0;      // 3-D factorization identities, relative
  std::vector<PositivityViolation> violations;

  bool ok() const { return violations.empty() && max_abs_entry_off_cone == 0.0; }
};

// Scan every lattice point plus `samples` random points drawn uniformly from
// inside the cone; record the minimum entry on the cone (must be >= 0), the
// largest off-cone entry (must be exactly 0 -- indicator), and, in 3-D, the
// worst relative error of the two algebraic factorizations of rows 2 and 3:
//   r2 |xi| = xi1^2 - xi1 xi2 + xi3 (xi3 - xi2)
//   r3 |xi| = xi1^2 + xi2^2 - xi3 (xi1 + xi2)
inline PositivityReport verify_positivity(const FrequencyLattice& lat, int dim,
                                          long long samples, std::uint64_t seed = 2024) {
  PositivityReport rep;
  rep.dim = dim;
  rep.lattice_points = lat.point_count();
  rep.samples = samples;
  rep.min_entry_on_cone = std::numeric_limits<double>::infinity();

  auto inspect = [&](const std::array<double, 3>& xi) {
    const bool in_cone = cone_indicator(xi, dim);
    const std::array<double, 3> r = coupling_row_values(xi, dim);
    double n2 = 0.0;
    for (int a = 0; a < dim; ++a) n2 += xi[a] * xi[a];
    const double n = std::sqrt(n2);
    for (int i = 0; i < dim; ++i) {
      if (in_cone) {
        rep.min_entry_on_cone = std::min(rep.min_entry_on_cone, r[i]);
        if (r[i] < -1e-14 * n)
          rep.violations.push_back(PositivityViolation{xi, i, r[i]});
      } else {
        rep.max_abs_entry_off_cone = std::max(rep.max_abs_entry_off_cone, std::abs(r[i]));
        if (r[i] != 0.0) rep.violations.push_back(PositivityViolation{xi, i, r[i]});
      }
    }
    if (dim == 3 && in_cone && n > 0.0) {
      const double lhs2 = r[1] * n;
      const double rhs2 = xi[0] * xi[0] - xi[0] * xi[1] + xi[2] * (xi[2] - xi[1]);
      const double lhs3 = r[2] * n;
      const double rhs3 = xi[0] * xi[0] + xi[1] * xi[1] - xi[2] * (xi[0] + xi[1]);
      const double scale = std::max(n2, 1e-300);
      rep.max_identity_error = std::max(
          rep.max_identity_error,
          std::max(std::abs(lhs2 - rhs2), std::abs(lhs3 - rhs3)) / scale);
    }
  };

  for_each_point(lat, [&](std::size_t, const std::array<int, 3>& mi) {
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) xi[a] = lat.h * mi[a];
    if (cone_indicator(xi, dim)) ++rep.cone_lattice_points;
    inspect(xi);
  });

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(1e-3, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution flip(0.5);
  for (long long s = 0; s < samples; ++s) {
    const double sign = flip(rng) ? 1.0 : -1.0;
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    if (dim == 2) {
      xi[0] = sign * mag(rng);
      xi[1] = -sign * mag(rng);
    } else {
      const double a = mag(rng);
      const double c = mag(rng);
      double b = unit(rng) * std::min(a, c);
      if (b == 0.0) b = 0.5 * std::min(a, c);
      xi[0] = sign * a;
      xi[1] = -sign * b;
      xi[2] = -sign * c;
    }
    inspect(xi);
  }
  return rep;
}

}  // namespace tns

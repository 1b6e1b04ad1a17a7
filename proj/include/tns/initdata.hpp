#pragma once

// Initial-data generators.  Every velocity family returns fields in the
// positivity class (real, even, nonnegative Fourier coefficients), built so
// that divergence-freeness holds identically and the support constraints of
// the blow-up machinery can be checked point by point on the realized lattice
// support (not just on the nominal continuum support).
//
// Families:
//   * cone_bump        -- smooth bump pair at +-xi_center, second component
//                         completed for divergence-freeness; 2-D sector or
//                         3-D cone version.  Amplitude parameter = resulting
//                         total L1 mass of the coefficients, exactly.
//   * oscillatory      -- 3-D anisotropic family concentrated near
//                         xi_3 ~ +-1/epsilon, curl-structured, nonnegative.
//   * oscillatory_2d   -- two-dimensional reduction of the same family
//                         (oscillation axis = xi_2), for experiments whose
//                         3-D resolution would be out of reach.
//   * vorticity_bump   -- nonpositive scalar data for the vorticity model.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tns/field.hpp"
#include "tns/lattice.hpp"
#include "tns/multipliers.hpp"

namespace tns {

// ---------------------------------------------------------------------------
// smooth cutoff profile
// ---------------------------------------------------------------------------

// C-infinity cutoff: 1 on (-inf, 1], 0 on [2, inf), strictly decreasing
// between, built from f(x) = exp(-1/x).
inline double smooth_cutoff(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double a = f(2.0 - s);
  const double b = f(s - 1.0);
  return a / (a + b);
}

// Radial bump: plateau 1 for r <= R/2, support exactly {r < R}.
inline double bump_profile(double r, double R) { return smooth_cutoff(2.0 * r / R); }

// ---------------------------------------------------------------------------
// admissibility
// ---------------------------------------------------------------------------

struct AdmissibilityReport {
  bool nonnegative = false;
  bool even = false;
  bool divergence_free = false;
  bool support_in_sector = false;       // open sector {xi1 xi2 < 0}
  bool support_meets_seed_region = false;  // some point with |xi_j| >= 1/2 for all j
  double min_coefficient = 0.0;
  double max_imag = 0.0;
  double max_even_defect = 0.0;
  double divergence = 0.0;
  double scale = 0.0;  // max |u_hat|
  std::size_t support_points = 0;

  bool ok() const {
    return nonnegative && even && divergence_free && support_in_sector &&
           support_meets_seed_region;
  }

  std::string summary() const {
    std::ostringstream os;
    auto line = [&](const char* name, bool pass) {
      os << "  " << name << ": " << (pass ? "pass" : "FAIL") << "\n";
    };
    os << "admissibility " << (ok() ? "PASS" : "FAIL") << "\n";
    line("nonnegative coefficients", nonnegative);
    line("even field", even);
    line("divergence-free", divergence_free);
    line("support in open sector", support_in_sector);
    line("support meets {|xi_j| >= 1/2}", support_meets_seed_region);
    return os.str();
  }
};

inline AdmissibilityReport validate_admissibility(const SpectralVectorField& u) {
  const FrequencyLattice& lat = u.lattice;
  AdmissibilityReport rep;
  rep.scale = max_abs(u);
  const double tol = 1e-12 * rep.scale;

  double min_re = 0.0, max_im = 0.0, even_defect = 0.0;
  bool sector_ok = true, seed_ok = false;
  std::size_t nsupp = 0;
  for_each_point(lat, [&](std::size_t idx, const std::array<int, 3>& mi) {
    const std::size_t mirror = lat.mirror(idx);
    bool in_support = false;
    for (int j = 0; j < u.dim(); ++j) {
      const cplx z = u.comp[j][idx];
      min_re = std::min(min_re, z.real());
      max_im = std::max(max_im, std::abs(z.imag()));
      even_defect = std::max(even_defect, std::abs(z - u.comp[j][mirror]));
      if (std::abs(z) > tol) in_support = true;
    }
    if (!in_support) return;
    ++nsupp;
    const std::array<double, 3> xi = lat.frequency(mi);
    if (!(xi[0] * xi[1] < 0.0)) sector_ok = false;
    bool big = true;
    for (int a = 0; a < lat.dim; ++a)
      if (std::abs(xi[a]) < 0.5 - 1e-12) big = false;
    if (big) seed_ok = true;
  });

  rep.min_coefficient = min_re;
  rep.max_imag = max_im;
  rep.max_even_defect = even_defect;
  rep.divergence = divergence_residual(u);
  rep.support_points = nsupp;
  rep.nonnegative = min_re >= -tol && max_im <= tol;
  rep.even = even_defect <= tol;
  rep.divergence_free = rep.divergence <= 1e-10 * rep.scale;
  rep.support_in_sector = sector_ok && nsupp > 0;
  rep.support_meets_seed_region = seed_ok;
  return rep;
}

// ---------------------------------------------------------------------------
// cone bump family
// ---------------------------------------------------------------------------

struct BumpSpec {
  int dim = 2;
  std::array<double, 3> center{0.6, -0.6, 0.0};  // +- mirror pair added automatically
  double radius = 0.05;
  double amplitude = 1.0;  // resulting total L1 mass, exactly
  int component = 0;       // index of the bump-carrying component
};

inline SpectralVectorField make_cone_bump(const FrequencyLattice& lat, const BumpSpec& spec) {
  if (spec.dim != lat.dim)
    throw std::invalid_argument("cone_bump: spec dimension does not match lattice");
  if (!(spec.radius > 0.0)) throw std::invalid_argument("cone_bump: radius must be positive");
  if (!(spec.amplitude > 0.0))
    throw std::invalid_argument("cone_bump: amplitude must be positive");
  const int jf = spec.component;
  if (lat.dim == 3 && jf != 0)
    throw std::invalid_argument("cone_bump: 3-D construction carries the bump in component 1");
  if (jf < 0 || jf >= lat.dim) throw std::invalid_argument("cone_bump: component out of range");
  const int jo = jf == 0 ? 1 : 0;  // divergence-completing partner

  SpectralVectorField u(lat);
  bool any = false, sector_ok = true, cone_ok = true, seed_ok = true, ball_ok = true;
  bool seed_hit = false;
  for_each_point(lat, [&](std::size_t idx, const std::array<int, 3>& mi) {
    const std::array<double, 3> xi = lat.frequency(mi);
    double rm = 0.0, rp = 0.0, n2 = 0.0;
    for (int a = 0; a < lat.dim; ++a) {
      rm += (xi[a] - spec.center[a]) * (xi[a] - spec.center[a]);
      rp += (xi[a] + spec.center[a]) * (xi[a] + spec.center[a]);
      n2 += xi[a] * xi[a];
    }
    const double p =
        bump_profile(std::sqrt(rm), spec.radius) + bump_profile(std::sqrt(rp), spec.radius);
    if (p == 0.0) return;
    any = true;
    if (!(xi[0] * xi[1] < 0.0)) sector_ok = false;
    if (lat.dim == 3 && !cone_indicator(xi, 3)) cone_ok = false;
    if (n2 > 1.0) ball_ok = false;
    bool big = true;
    for (int a = 0; a < lat.dim; ++a)
      if (std::abs(xi[a]) < 0.5 - 1e-12) big = false;
    if (big) seed_hit = true;
    u.comp[jf][idx] = cplx{p, 0.0};
    u.comp[jo][idx] = cplx{-(xi[jf] / xi[jo]) * p, 0.0};
  });
  seed_ok = seed_hit;

  if (!any) throw std::invalid_argument("cone_bump: realized lattice support is empty");
  if (!sector_ok)
    throw std::invalid_argument(
        "cone_bump: support leaves the open sector {xi1 xi2 < 0}");
  if (!cone_ok)
    throw std::invalid_argument("cone_bump: support leaves the 3-D cone");
  if (!seed_ok)
    throw std::invalid_argument(
        "cone_bump: support misses the seed region {|xi_j| >= 1/2 for all j}");
  if (!ball_ok)
    throw std::invalid_argument("cone_bump: support leaves the unit ball {|xi| <= 1}");

  const double mass = l1_mass(u);
  const double scale = spec.amplitude / mass;
  for (auto& comp : u.comp)
    for (cplx& z : comp) z *= scale;
  return u;
}

// ---------------------------------------------------------------------------
// oscillatory family
// ---------------------------------------------------------------------------

struct OscillatorySpec {
  double epsilon = 0.1;  // in (0, 1); oscillation frequency 1/epsilon
  double alpha = 0.5;    // in (0, 1); anisotropic compression exponent
  std::array<double, 3> profile_center{0.75, -0.75, 0.75};
  double profile_radius = 0.3;
  double mass_scale = 1.0;  // multiplies the canonical amplitude prefactor
};

inline void validate_oscillatory_spec(const OscillatorySpec& s) {
  if (!(s.epsilon > 0.0 && s.epsilon < 1.0))
    throw std::invalid_argument("oscillatory: epsilon must lie strictly in (0, 1)");
  if (!(s.alpha > 0.0 && s.alpha < 1.0))
    throw std::invalid_argument("oscillatory: alpha must lie strictly in (0, 1)");
  if (!(s.profile_radius > 0.0))
    throw std::invalid_argument("oscillatory: profile radius must be positive");
  if (!(s.mass_scale > 0.0))
    throw std::invalid_argument("oscillatory: mass scale must be positive");
}

// Canonical amplitude prefactor (-log eps)^{1/5} / (2 eps^{1-2 alpha}).
inline double oscillatory_prefactor(const OscillatorySpec& s) {
  return std::pow(-std::log(s.epsilon), 0.2) / (2.0 * std::pow(s.epsilon, 1.0 - 2.0 * s.alpha));
}

// 3-D family: u_hat = pref * (-xi1 xi2 Phi, xi1^2 Phi, 0) with
// Phi(xi) = phi_hat(xi1, eps^alpha xi2, xi3 - 1/eps) + (shift by +1/eps),
// phi_hat = smooth bump pair at +-profile_center.
inline SpectralVectorField make_oscillatory_data(const FrequencyLattice& lat,
                                                 const OscillatorySpec& spec) {
  validate_oscillatory_spec(spec);
  if (lat.dim != 3) throw std::invalid_argument("oscillatory: requires a 3-D lattice");
  const double inv_eps = 1.0 / spec.epsilon;
  {
    const double q = inv_eps / lat.h;
    if (std::abs(q - std::round(q)) > 1e-9)
      throw std::invalid_argument("oscillatory: 1/epsilon must be a lattice frequency");
    const double needed = inv_eps + std::abs(spec.profile_center[2]) + spec.profile_radius;
    if (lat.N * lat.h < needed)
      throw std::invalid_argument(
          "oscillatory: lattice too small for the oscillation frequency 1/epsilon");
  }

  const double eps_a = std::pow(spec.epsilon, spec.alpha);
  const double pref = spec.mass_scale * oscillatory_prefactor(spec);
  auto phi_hat = [&](double y1, double y2, double y3) {
    double rm = 0.0, rp = 0.0;
    const double y[3] = {y1, y2, y3};
    for (int a = 0; a < 3; ++a) {
      rm += (y[a] - spec.profile_center[a]) * (y[a] - spec.profile_center[a]);
      rp += (y[a] + spec.profile_center[a]) * (y[a] + spec.profile_center[a]);
    }
    return bump_profile(std::sqrt(rm), spec.profile_radius) +
           bump_profile(std::sqrt(rp), spec.profile_radius);
  };

  SpectralVectorField u(lat);
  bool any = false;
  for_each_point(lat, [&](std::size_t idx, const std::array<int, 3>& mi) {
    const std::array<double, 3> xi = lat.frequency(mi);
    const double phi = phi_hat(xi[0], eps_a * xi[1], xi[2] - inv_eps) +
                       phi_hat(xi[0], eps_a * xi[1], xi[2] + inv_eps);
    if (phi == 0.0) return;
    any = true;
    u.comp[0][idx] = cplx{pref * (-(xi[0] * xi[1]) * phi), 0.0};
    u.comp[1][idx] = cplx{pref * ((xi[0] * xi[0]) * phi), 0.0};
  });
  if (!any)
    throw std::invalid_argument(
        "oscillatory: realized lattice support is empty (profile falls between lattice "
        "points; adjust h or the profile)");
  return u;
}

// 2-D reduction: the oscillation axis becomes xi_2.  Component 1 carries a
// short column of bumps at (xi1_c, -Omega) and its mirror, with Omega the
// smallest lattice frequency above 1/epsilon; component 2 completes the
// divergence.  The total L1 mass is normalized to
// mass_scale * (-log eps)^{1/5} / eps, the canonical amplitude of the family.
inline SpectralVectorField make_oscillatory_data_2d(const FrequencyLattice& lat,
                                                    const OscillatorySpec& spec) {
  validate_oscillatory_spec(spec);
  if (lat.dim != 2) throw std::invalid_argument("oscillatory_2d: requires a 2-D lattice");
  const double inv_eps = 1.0 / spec.epsilon;
  const double omega = (std::floor(inv_eps / lat.h) + 1.0) * lat.h;
  const double w = spec.profile_radius;
  const double xi1_c = std::abs(spec.profile_center[0]);
  if (lat.N * lat.h < omega + w)
    throw std::invalid_argument(
        "oscillatory_2d: lattice too small for the oscillation frequency 1/epsilon");
  if (!(xi1_c >= 0.5))
    throw std::invalid_argument("oscillatory_2d: first-axis center must be >= 1/2");

  SpectralVectorField u(lat);
  bool any = false;
  for_each_point(lat, [&](std::size_t idx, const std::array<int, 3>& mi) {
    const std::array<double, 3> xi = lat.frequency(mi);
    // column bump: tight in xi1, width w along the oscillation axis
    const double p1 = bump_profile(std::abs(xi[0] - xi1_c), 0.75 * lat.h);
    const double p1m = bump_profile(std::abs(xi[0] + xi1_c), 0.75 * lat.h);
    const double q = bump_profile(std::abs(xi[1] + omega), w);
    const double qm = bump_profile(std::abs(xi[1] - omega), w);
    const double p = p1 * q + p1m * qm;  // sector pairing: (+, -Omega) and (-, +Omega)
    if (p == 0.0) return;
    any = true;
    u.comp[0][idx] = cplx{p, 0.0};
    u.comp[1][idx] = cplx{-(xi[0] / xi[1]) * p, 0.0};
  });
  if (!any) throw std::invalid_argument("oscillatory_2d: realized lattice support is empty");

  const double target = spec.mass_scale * std::pow(-std::log(spec.epsilon), 0.2) / spec.epsilon;
  const double scale = target / l1_mass(u);
  for (auto& comp : u.comp)
    for (cplx& z : comp) z *= scale;
  return u;
}

// ---------------------------------------------------------------------------
// vorticity bump
// ---------------------------------------------------------------------------

// Nonpositive scalar data: w_hat = -(even nonnegative bump), normalized so the
// total L1 mass equals `amplitude` exactly (zero amplitude gives the zero
// field).
inline SpectralScalarField make_vorticity_bump(const FrequencyLattice& lat, double amplitude,
                                               std::array<double, 3> center = {0.0, 0.0, 0.0},
                                               double radius = 0.75) {
  if (amplitude < 0.0)
    throw std::invalid_argument("vorticity_bump: amplitude must be nonnegative");
  if (!(radius > 0.0)) throw std::invalid_argument("vorticity_bump: radius must be positive");
  SpectralScalarField w(lat);
  if (amplitude == 0.0) return w;

  for_each_point(lat, [&](std::size_t idx, const std::array<int, 3>& mi) {
    const std::array<double, 3> xi = lat.frequency(mi);
    double rm = 0.0, rp = 0.0;
    for (int a = 0; a < lat.dim; ++a) {
      rm += (xi[a] - center[a]) * (xi[a] - center[a]);
      rp += (xi[a] + center[a]) * (xi[a] + center[a]);
    }
    double p = bump_profile(std::sqrt(rm), radius);
    if (center[0] != 0.0 || center[1] != 0.0 || center[2] != 0.0)
      p += bump_profile(std::sqrt(rp), radius);
    if (p != 0.0) w.a[idx] = cplx{-p, 0.0};
  });
  const double mass = l1_mass(w);
  if (mass == 0.0)
    throw std::invalid_argument("vorticity_bump: realized lattice support is empty");
  const double scale = amplitude / mass;
  for (cplx& z : w.a) z *= scale;
  return w;
}

}  // namespace tns

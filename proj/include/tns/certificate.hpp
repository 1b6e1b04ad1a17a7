#pragma once

// Inductive blow-up machinery, used as an independent oracle against simulated
// trajectories: convolution powers of a seed, the dyadic time schedule, the
// lower envelope, the amplitude threshold, and domination checks.
//
// Deliberately self-contained numerics: convolution powers are computed by
// exact sparse summation over realized supports (no FFT), so the support sets
// are combinatorially exact and the oracle shares no code path with the
// transform engine it is checking.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tns/field.hpp"
#include "tns/initdata.hpp"
#include "tns/lattice.hpp"
#include "tns/multipliers.hpp"
#include "tns/stepper.hpp"

namespace tns {

// ---------------------------------------------------------------------------
// schedule and threshold
// ---------------------------------------------------------------------------

// t_k = (log 2)/3 * (1 - 4^{-k}): increments t_k - t_{k-1} = 4^{-k} log 2,
// strictly increasing towards (log 2)/3.
inline double tk_schedule(int k) {
  if (k < 0) throw std::invalid_argument("tk_schedule: k must be nonnegative");
  return (std::log(2.0) / 3.0) * (1.0 - std::ldexp(1.0, -2 * k));
}

inline double tk_limit() { return std::log(2.0) / 3.0; }

// Critical seed amplitude 16 * 2^{1/3}: above it the envelope's per-level
// growth factor A e^{-t_limit} 2^{-4} exceeds 1 and the lower bounds diverge.
inline double threshold_amplitude() { return 16.0 * std::cbrt(2.0); }

// ---------------------------------------------------------------------------
// seed extraction
// ---------------------------------------------------------------------------

struct SeedData {
  double amplitude = 0.0;       // total frequency-side L1 mass of the data
  int component = 0;            // component the seed was taken from
  SpectralScalarField seed;     // (u0^j / A) restricted to the seed region
  double c_seed = 0.0;          // h^dim * sum of seed coefficients
  bool in_unit_ball = true;     // seed support inside {|xi| <= 1}
};

// Normalized seed: component j of u0, divided by the total mass A, restricted
// to {|xi_i| >= 1/2 for all i} intersected with the half-sector {xi_1 > 0}.
inline SeedData seed_from_data(const SpectralVectorField& u0, int component = 0) {
  if (component < 0 || component >= u0.dim())
    throw std::invalid_argument("seed_from_data: component out of range");
  const double A = l1_mass(u0);
  if (!(A > 0.0)) throw std::invalid_argument("seed_from_data: data has zero mass");

  SeedData s;
  s.amplitude = A;
  s.component = component;
  s.seed = SpectralScalarField(u0.lattice);
  bool any = false;
  double mass = 0.0;
  for_each_point(u0.lattice, [&](std::size_t idx, const std::array<int, 3>& mi) {
    const cplx z = u0.comp[component][idx];
    if (z == cplx{0.0, 0.0}) return;
    const std::array<double, 3> xi = u0.lattice.frequency(mi);
    if (!(xi[0] > 0.0)) return;  // one half of the sector
    double n2 = 0.0;
    for (int a = 0; a < u0.lattice.dim; ++a) {
      if (std::abs(xi[a]) < 0.5 - 1e-12) return;
      n2 += xi[a] * xi[a];
    }
    const double v = z.real() / A;
    s.seed.a[idx] = cplx{v, 0.0};
    mass += v;
    any = true;
    if (n2 > 1.0 + 1e-12) s.in_unit_ball = false;
  });
  if (!any)
    throw std::invalid_argument(
        "seed_from_data: restriction to {|xi_i| >= 1/2} in the half-sector {xi_1 > 0} is "
        "empty; no certificate possible");
  s.c_seed = std::pow(u0.lattice.h, u0.lattice.dim) * mass;
  return s;
}

// ---------------------------------------------------------------------------
// convolution powers
// ---------------------------------------------------------------------------

namespace detail {

struct SparseEntry {
  std::array<int, 3> m;
  double v;
};

inline std::vector<SparseEntry> sparsify(const SpectralScalarField& f) {
  const double scale = max_abs(f);
  std::vector<SparseEntry> out;
  for_each_point(f.lattice, [&](std::size_t idx, const std::array<int, 3>& mi) {
    const cplx z = f.a[idx];
    if (z == cplx{0.0, 0.0}) return;
    if (std::abs(z.imag()) > 1e-12 * scale)
      throw std::invalid_argument("conv_power: seed coefficients must be real");
    out.push_back({mi, z.real()});
  });
  return out;
}

}  // namespace detail

// Largest k such that the 2^k-dilated index hull of the support still fits in
// [-N, N]^dim.  The per-axis extremes of the support are also the extremes of
// its convex hull, so the box test is exact.
inline int support_growth_limit(const SpectralScalarField& seed) {
  int M = 0;
  for_each_point(seed.lattice, [&](std::size_t idx, const std::array<int, 3>& mi) {
    if (seed.a[idx] == cplx{0.0, 0.0}) return;
    for (int a = 0; a < seed.lattice.dim; ++a) M = std::max(M, std::abs(mi[a]));
  });
  if (M == 0)
    throw std::invalid_argument("support_growth_limit: support is empty or only the origin");
  int k = 0;
  while ((static_cast<long long>(M) << (k + 1)) <= seed.lattice.N) ++k;
  return k;
}

// 2^k-fold convolution power by k-fold squaring with exact sparse summation:
// w_k = w_{k-1} * w_{k-1}, (f * g)(xi) = h^dim sum_eta f(eta) g(xi - eta).
// Zero coefficients stay exactly zero, so supports are combinatorially exact.
inline SpectralScalarField conv_power(const SpectralScalarField& seed, int k) {
  if (k < 0) throw std::invalid_argument("conv_power: k must be nonnegative");
  const int k_max = support_growth_limit(seed);
  if (k > k_max)
    throw std::invalid_argument(
        "conv_power: support of the 2^" + std::to_string(k) +
        "-fold power exits the lattice; largest representable level is K_max = " +
        std::to_string(k_max));

  std::vector<detail::SparseEntry> cur = detail::sparsify(seed);
  const double hd = std::pow(seed.lattice.h, seed.lattice.dim);
  const FrequencyLattice& lat = seed.lattice;
  for (int level = 1; level <= k; ++level) {
    std::vector<double> acc(lat.point_count(), 0.0);
    for (const auto& a : cur) {
      for (const auto& b : cur) {
        std::array<int, 3> m{0, 0, 0};
        for (int d = 0; d < lat.dim; ++d) m[d] = a.m[d] + b.m[d];
        acc[lat.flatten(m)] += a.v * b.v;
      }
    }
    std::vector<detail::SparseEntry> next;
    for_each_point(lat, [&](std::size_t idx, const std::array<int, 3>& mi) {
      if (acc[idx] != 0.0) next.push_back({mi, hd * acc[idx]});
    });
    cur = std::move(next);
  }

  SpectralScalarField out(lat, seed.time);
  for (const auto& e : cur) out.a[lat.flatten(e.m)] = cplx{e.v, 0.0};
  return out;
}

// ---------------------------------------------------------------------------
// envelope
// ---------------------------------------------------------------------------

// log of the amplitude factor A^{2^k} e^{-2^k t} 2^{k - 4(2^k - 1)}
inline double envelope_log_factor(double A, int k, double t) {
  const double p = std::ldexp(1.0, k);
  return p * std::log(A) - p * t + (static_cast<double>(k) - 4.0 * (p - 1.0)) * std::log(2.0);
}

// The factor itself; +infinity when it overflows double range.  Small k uses
// direct arithmetic (exact at k = 0, t = 0), larger k the log domain.
inline double envelope_amplitude_factor(double A, int k, double t) {
  if (!(A > 0.0)) throw std::invalid_argument("envelope: amplitude must be positive");
  if (k < 0) throw std::invalid_argument("envelope: k must be nonnegative");
  if (k <= 5) {
    const double p = std::ldexp(1.0, k);
    return std::pow(A, p) * std::exp(-p * t) *
           std::pow(2.0, static_cast<double>(k) - 4.0 * (p - 1.0));
  }
  const double lf = envelope_log_factor(A, k, t);
  if (lf > 709.0) return std::numeric_limits<double>::infinity();
  return std::exp(lf);
}

// Envelope field from a precomputed convolution power w_k: the inductive lower
// bound A^{2^k} e^{-2^k t} 2^{k-4(2^k-1)} 1_{t >= t_k} w_k(xi).  Coefficients
// that overflow are +infinity markers; zeros stay zero (never NaN).
inline SpectralScalarField envelope_from_power(double A, int k, double t,
                                               const SpectralScalarField& w_k) {
  SpectralScalarField env(w_k.lattice, t);
  if (t < tk_schedule(k)) return env;  // indicator 1_{t >= t_k}
  const double factor = envelope_amplitude_factor(A, k, t);
  for (std::size_t i = 0; i < w_k.a.size(); ++i) {
    const double w = w_k.a[i].real();
    if (w != 0.0) env.a[i] = cplx{factor * w, 0.0};
  }
  return env;
}

inline SpectralScalarField envelope(double A, int k, double t,
                                    const SpectralScalarField& seed) {
  return envelope_from_power(A, k, t, conv_power(seed, k));
}

// ---------------------------------------------------------------------------
// certificate
// ---------------------------------------------------------------------------

struct BlowUpCertificate {
  double amplitude = 0.0;        // A, total L1 mass of the data
  int component = 0;             // seed component j
  SpectralScalarField seed;      // w_0^0
  double c_seed = 0.0;           // h^dim * sum of seed coefficients
  std::vector<double> schedule;  // t_0 .. t_{K_max}
  int K_max = 0;                 // largest level before support exits lattice
  double measured_C = 0.0;       // min_k [inf_{supp w_k} q_jj] / 2^k
  bool seed_in_unit_ball = true;

  std::string summary() const {
    std::ostringstream os;
    os << "blow-up certificate: A = " << amplitude << " > " << threshold_amplitude()
       << ", component " << (component + 1) << ", K_max = " << K_max
       << ", measured_C = " << measured_C << ", c_seed = " << c_seed
       << (seed_in_unit_ball ? "" : " [seed outside unit ball]");
    return os.str();
  }
};

struct CertifyResult {
  std::optional<BlowUpCertificate> certificate;
  std::string reason;  // first failing condition when no certificate

  bool ok() const { return certificate.has_value(); }
};

// Admissibility + amplitude gate.  On success the certificate carries the
// seed, the schedule, the support-growth budget K_max, and the lattice-measured
// diagonal coupling constant.
inline CertifyResult certify(const SpectralVectorField& u0, int component = 0) {
  const AdmissibilityReport rep = validate_admissibility(u0);
  if (!rep.ok()) {
    std::string why = "admissibility: ";
    if (!rep.nonnegative) why += "coefficients are not nonnegative";
    else if (!rep.even) why += "field is not even";
    else if (!rep.divergence_free) why += "field is not divergence-free";
    else if (!rep.support_in_sector) why += "support leaves the open sector";
    else why += "support misses the seed region {|xi_i| >= 1/2}";
    return {std::nullopt, why};
  }

  SeedData s;
  try {
    s = seed_from_data(u0, component);
  } catch (const std::invalid_argument& e) {
    return {std::nullopt, e.what()};
  }

  const double astar = threshold_amplitude();
  if (!(s.amplitude > astar)) {
    std::ostringstream os;
    os << "amplitude: A = " << s.amplitude << " does not exceed the threshold " << astar;
    return {std::nullopt, os.str()};
  }

  BlowUpCertificate cert;
  cert.amplitude = s.amplitude;
  cert.component = component;
  cert.seed = s.seed;
  cert.c_seed = s.c_seed;
  cert.seed_in_unit_ball = s.in_unit_ball;
  cert.K_max = support_growth_limit(s.seed);
  for (int k = 0; k <= cert.K_max; ++k) cert.schedule.push_back(tk_schedule(k));

  double measured = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= cert.K_max; ++k) {
    const SpectralScalarField wk = conv_power(s.seed, k);
    double inf_q = std::numeric_limits<double>::infinity();
    for_each_point(wk.lattice, [&](std::size_t idx, const std::array<int, 3>& mi) {
      if (wk.a[idx] == cplx{0.0, 0.0}) return;
      const std::array<double, 3> xi = wk.lattice.frequency(mi);
      inf_q = std::min(inf_q,
                       coupling_row_values(xi, wk.lattice.dim)[component]);
    });
    measured = std::min(measured, inf_q / std::ldexp(1.0, k));
  }
  cert.measured_C = measured;
  return {std::move(cert), ""};
}

// ---------------------------------------------------------------------------
// domination check
// ---------------------------------------------------------------------------

struct DominationEntry {
  int k = 0;           // envelope level checked
  double t = 0.0;      // checkpoint time (some t_{k'} with k' >= k)
  double margin = 0.0; // min over supp w_k of u^j - envelope
  double envelope_scale = 0.0;  // max envelope coefficient on that support
  bool pass = false;
};

struct DominationReport {
  std::vector<DominationEntry> entries;
  double tolerance_rel = 1e-9;
  double integrator_allowance = 0.0;  // added to the relative tolerance
  bool all_pass = true;

  std::string summary() const {
    std::ostringstream os;
    os << "domination " << (all_pass ? "PASS" : "FAIL") << " (tol " << tolerance_rel << " + "
       << integrator_allowance << " integrator allowance)\n";
    for (const auto& e : entries)
      os << "  k=" << e.k << " t=" << e.t << " margin=" << e.margin
         << " scale=" << e.envelope_scale << (e.pass ? " pass" : " FAIL") << "\n";
    return os.str();
  }
};

// At every schedule time t_k of the certificate, check the recorded state
// against the level-k' envelopes for all k' <= k on the exact support of
// w_0^{k'}.  Pass iff margin >= -(tolerance + allowance) * envelope scale.
// The integrator allowance defaults to 10x the largest accepted step, matching
// the first-order accuracy of the positive scheme.
inline DominationReport verify_domination(const Trajectory<SpectralVectorField>& traj,
                                          const BlowUpCertificate& cert,
                                          double integrator_allowance = -1.0) {
  DominationReport rep;
  rep.integrator_allowance =
      integrator_allowance >= 0.0 ? integrator_allowance : 10.0 * traj.dt_max_used;

  std::vector<SpectralScalarField> powers;
  for (int k = 0; k <= cert.K_max; ++k) powers.push_back(conv_power(cert.seed, k));

  auto snapshot_at = [&](double t) -> const SpectralVectorField& {
    for (std::size_t i = 0; i < traj.snapshot_times.size(); ++i)
      if (std::abs(traj.snapshot_times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t)))
        return traj.snapshots[i];
    throw std::runtime_error("verify_domination: trajectory is missing the checkpoint at t = " +
                             std::to_string(t));
  };

  for (int k = 0; k <= cert.K_max; ++k) {
    const double t = cert.schedule[k];
    const SpectralVectorField& u = snapshot_at(t);
    for (int kp = 0; kp <= k; ++kp) {
      const SpectralScalarField env = envelope_from_power(cert.amplitude, kp, t, powers[kp]);
      DominationEntry e;
      e.k = kp;
      e.t = t;
      double margin = std::numeric_limits<double>::infinity();
      double scale = 0.0;
      for (std::size_t i = 0; i < env.a.size(); ++i) {
        const double w = powers[kp].a[i].real();
        if (w == 0.0) continue;
        const double ev = env.a[i].real();
        scale = std::max(scale, ev);
        margin = std::min(margin, u.comp[cert.component][i].real() - ev);
      }
      e.margin = margin;
      e.envelope_scale = scale;
      e.pass = margin >= -(rep.tolerance_rel + rep.integrator_allowance) * scale;
      rep.all_pass = rep.all_pass && e.pass;
      rep.entries.push_back(e);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Besov lower bound
// ---------------------------------------------------------------------------

// (A e^{-t_limit} 2^{-4})^{2^k} * 2^{(s+1)k} * c_seed, log-domain guarded.
inline double besov_lower_bound(const BlowUpCertificate& cert, double s, int k) {
  if (k < 0 || k > cert.K_max)
    throw std::invalid_argument("besov_lower_bound: level outside [0, K_max]");
  const double p = std::ldexp(1.0, k);
  const double lg = p * (std::log(cert.amplitude) - tk_limit() - 4.0 * std::log(2.0)) +
                    (s + 1.0) * k * std::log(2.0) + std::log(cert.c_seed);
  if (lg > 709.0) return std::numeric_limits<double>::infinity();
  return std::exp(lg);
}

}  // namespace tns

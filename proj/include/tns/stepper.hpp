#pragma once

// Time integration of the spectral ODE systems by integrating-factor schemes.
//
// The first-order scheme ("etd1_positive") advances
//     u_{n+1} = exp(-dt sigma) (u_n + dt N(u_n)),
// a composition of nonnegative operations whenever N preserves coefficientwise
// nonnegativity, so the positivity class is invariant step by step.  The
// fourth-order integrating-factor Runge-Kutta scheme ("rk4_if") carries no
// sign guarantee and serves as an accuracy cross-check.
//
// Adaptive mode rejects a trial step and halves dt whenever the monitored sup
// norm grows by more than `growth_factor` (or turns nonfinite), declares
// dt_underflow once dt would fall below dt_min, and regrows dt slowly after
// accepted steps.  Requested snapshot and record times are landed on exactly
// by clamping the step size.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tns/field.hpp"

namespace tns {

enum class SchemeKind { etd1_positive, rk4_if };

inline std::string scheme_name(SchemeKind s) {
  return s == SchemeKind::etd1_positive ? "etd1_positive" : "rk4_if";
}

inline SchemeKind parse_scheme(const std::string& s) {
  if (s == "etd1_positive" || s == "etd1") return SchemeKind::etd1_positive;
  if (s == "rk4_if" || s == "rk4") return SchemeKind::rk4_if;
  throw std::invalid_argument("unknown scheme: " + s);
}

struct StepperConfig {
  double dt = 1e-3;
  SchemeKind scheme = SchemeKind::etd1_positive;
  double t_end = 1.0;
  bool adaptive = false;
  double dt_min = 1e-9;
  double blowup_norm_cap = 1e6;  // absolute cap on sup |u_hat|
  // adaptive-mode tuning
  double dt_max = std::numeric_limits<double>::infinity();
  double growth_factor = 2.0;  // reject when sup grows beyond this per step
  double dt_regrow = 1.3;      // dt multiplier after an accepted step
};

inline void validate_stepper_config(const StepperConfig& c) {
  if (!(c.dt > 0.0)) throw std::invalid_argument("StepperConfig: dt must be positive");
  if (!(c.t_end > 0.0)) throw std::invalid_argument("StepperConfig: t_end must be positive");
  if (!(c.dt_min > 0.0) || !(c.dt_min < c.dt))
    throw std::invalid_argument("StepperConfig: need 0 < dt_min < dt");
  if (!(c.blowup_norm_cap > 0.0))
    throw std::invalid_argument("StepperConfig: blowup_norm_cap must be positive");
  if (!(c.growth_factor > 1.0))
    throw std::invalid_argument("StepperConfig: growth_factor must exceed 1");
  if (!(c.dt_max >= c.dt)) throw std::invalid_argument("StepperConfig: dt_max must be >= dt");
  if (!(c.dt_regrow >= 1.0))
    throw std::invalid_argument("StepperConfig: dt_regrow must be >= 1");
}

enum class Termination { reached_t_end, norm_cap_exceeded, dt_underflow, nonfinite };

inline std::string termination_name(Termination t) {
  switch (t) {
    case Termination::reached_t_end: return "reached_t_end";
    case Termination::norm_cap_exceeded: return "norm_cap_exceeded";
    case Termination::dt_underflow: return "dt_underflow";
    case Termination::nonfinite: return "nonfinite";
  }
  return "?";
}

// Any termination other than a completed horizon flags discrete blow-up.
inline bool is_blowup(Termination t) { return t != Termination::reached_t_end; }

// ---------------------------------------------------------------------------
// elementwise state operations (scalar and vector overloads)
// ---------------------------------------------------------------------------

namespace detail {

inline void mul_exp(SpectralScalarField& f, const std::vector<double>& e) {
  for (std::size_t i = 0; i < f.a.size(); ++i) f.a[i] *= e[i];
}
inline void mul_exp(SpectralVectorField& u, const std::vector<double>& e) {
  for (auto& c : u.comp)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= e[i];
}

inline void axpy(SpectralScalarField& y, double c, const SpectralScalarField& x) {
  for (std::size_t i = 0; i < y.a.size(); ++i) y.a[i] += c * x.a[i];
}
inline void axpy(SpectralVectorField& y, double c, const SpectralVectorField& x) {
  for (int j = 0; j < y.dim(); ++j)
    for (std::size_t i = 0; i < y.comp[j].size(); ++i) y.comp[j][i] += c * x.comp[j][i];
}

inline bool all_finite(const SpectralScalarField& f) {
  for (const cplx& z : f.a)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}
inline bool all_finite(const SpectralVectorField& u) {
  for (const auto& c : u.comp)
    for (const cplx& z : c)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

// Small keyed cache of exp(-dt sigma) tables; adaptive runs revisit only a
// handful of dt values between changes, and large lattices make each table
// several megabytes, so the cache holds four slots with round-robin eviction.
class ExpCache {
 public:
  explicit ExpCache(const std::vector<double>* sigma) : sigma_(sigma) {}

  const std::vector<double>& factors(double dt) {
    for (int s = 0; s < filled_; ++s)
      if (dt_[s] == dt) return table_[s];
    const int s = filled_ < slots ? filled_++ : next_evict_++ % slots;
    dt_[s] = dt;
    table_[s].resize(sigma_->size());
    for (std::size_t i = 0; i < sigma_->size(); ++i)
      table_[s][i] = std::exp(-dt * (*sigma_)[i]);
    return table_[s];
  }

 private:
  static constexpr int slots = 4;
  const std::vector<double>* sigma_;
  int filled_ = 0;
  int next_evict_ = 0;
  std::array<double, slots> dt_{};
  std::array<std::vector<double>, slots> table_{};
};

template <class State>
State etd1_step(const State& s, const State& nl, ExpCache& ec, double dt) {
  State out = s;
  axpy(out, dt, nl);
  mul_exp(out, ec.factors(dt));
  out.time = s.time + dt;
  return out;
}

template <class State, class Rhs>
State rk4_if_step(const State& s, Rhs&& rhs, ExpCache& ec, double dt) {
  const std::vector<double>& e_full = ec.factors(dt);
  const std::vector<double>& e_half = ec.factors(0.5 * dt);

  State k1 = rhs(s);

  State s2 = s;
  axpy(s2, 0.5 * dt, k1);
  mul_exp(s2, e_half);
  s2.time = s.time + 0.5 * dt;
  State k2 = rhs(s2);

  State s3 = s;
  mul_exp(s3, e_half);
  axpy(s3, 0.5 * dt, k2);
  s3.time = s.time + 0.5 * dt;
  State k3 = rhs(s3);

  State s4 = s;
  mul_exp(s4, e_full);
  {
    State k3p = k3;
    mul_exp(k3p, e_half);
    axpy(s4, dt, k3p);
  }
  s4.time = s.time + dt;
  State k4 = rhs(s4);

  State out = s;
  mul_exp(out, e_full);
  {
    State acc = k1;
    mul_exp(acc, e_full);
    axpy(out, dt / 6.0, acc);
  }
  {
    State acc = k2;
    axpy(acc, 1.0, k3);
    mul_exp(acc, e_half);
    axpy(out, dt / 3.0, acc);
  }
  axpy(out, dt / 6.0, k4);
  out.time = s.time + dt;
  return out;
}

}  // namespace detail

// Single step of size cfg.dt (no adaptivity, no termination logic).
template <class State, class Rhs>
State step(const State& s, Rhs&& rhs, const std::vector<double>& sigma,
           const StepperConfig& cfg) {
  detail::ExpCache ec(&sigma);
  if (cfg.scheme == SchemeKind::etd1_positive) {
    State nl = rhs(s);
    return detail::etd1_step(s, nl, ec, cfg.dt);
  }
  return detail::rk4_if_step(s, rhs, ec, cfg.dt);
}

// ---------------------------------------------------------------------------
// full integration loop
// ---------------------------------------------------------------------------

template <class State>
struct Trajectory {
  std::vector<double> snapshot_times;
  std::vector<State> snapshots;
  State final_state;
  Termination termination = Termination::reached_t_end;
  double dt_max_used = 0.0;   // largest accepted step
  double dt_final = 0.0;      // dt in effect at termination
  long long accepted = 0;
  long long rejected = 0;

  bool blowup() const { return is_blowup(termination); }
};

struct NoRecord {
  template <class State>
  void operator()(const State&, double) const {}
};

// Advance u0 to cfg.t_end (or until a termination event), storing full states
// at `snapshot_times` and invoking on_record(state, dt) at t = 0, at every
// multiple of record_interval (every accepted step if the interval is 0), and
// at the final state.  Snapshot and record times are landed on exactly.
template <class State, class Rhs, class Record = NoRecord>
Trajectory<State> integrate(const State& u0, Rhs&& rhs, const std::vector<double>& sigma,
                            const StepperConfig& cfg, std::vector<double> snapshot_times = {},
                            double record_interval = 0.0, Record&& on_record = Record{}) {
  validate_stepper_config(cfg);

  // Merge stop targets: snapshot times and record multiples, all in (t0, t_end].
  const double t0 = u0.time;
  std::sort(snapshot_times.begin(), snapshot_times.end());
  snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()),
                       snapshot_times.end());
  std::vector<double> record_times;
  if (record_interval > 0.0)
    for (double t = std::ceil(t0 / record_interval) * record_interval; t <= cfg.t_end;
         t += record_interval)
      if (t > t0) record_times.push_back(t);
  std::vector<double> targets = snapshot_times;
  targets.insert(targets.end(), record_times.begin(), record_times.end());
  targets.push_back(cfg.t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  auto is_snapshot_time = [&](double t) {
    return std::binary_search(snapshot_times.begin(), snapshot_times.end(), t);
  };
  auto is_record_time = [&](double t) {
    return std::binary_search(record_times.begin(), record_times.end(), t);
  };

  Trajectory<State> traj;
  detail::ExpCache ec(&sigma);
  State cur = u0;
  double t = t0;
  double dt = cfg.dt;
  double sup = max_abs(cur);
  std::size_t target_idx = 0;
  while (target_idx < targets.size() && targets[target_idx] <= t) ++target_idx;

  double last_recorded = t;
  on_record(cur, dt);
  if (is_snapshot_time(t)) {
    traj.snapshot_times.push_back(t);
    traj.snapshots.push_back(cur);
  }

  bool etd1_nl_valid = false;
  State etd1_nl;  // rhs at the current state, reusable across rejected trials

  Termination term = Termination::reached_t_end;
  while (t < cfg.t_end) {
    const double to_target =
        target_idx < targets.size() ? targets[target_idx] - t : cfg.t_end - t;
    const double dt_eff = std::min(dt, to_target);

    State trial;
    if (cfg.scheme == SchemeKind::etd1_positive) {
      if (!etd1_nl_valid) {
        etd1_nl = rhs(cur);
        etd1_nl_valid = true;
      }
      trial = detail::etd1_step(cur, etd1_nl, ec, dt_eff);
    } else {
      trial = detail::rk4_if_step(cur, rhs, ec, dt_eff);
    }

    const bool finite = detail::all_finite(trial);
    const double trial_sup = finite ? max_abs(trial) : 0.0;
    const bool too_fast = finite && cfg.adaptive && trial_sup > cfg.growth_factor * sup;

    if (!finite || too_fast) {
      if (!cfg.adaptive || dt_eff <= cfg.dt_min) {
        term = finite ? Termination::dt_underflow : Termination::nonfinite;
        dt = dt_eff;
        break;
      }
      ++traj.rejected;
      dt = 0.5 * dt_eff;
      continue;
    }

    // accept
    cur = std::move(trial);
    sup = trial_sup;
    ++traj.accepted;
    traj.dt_max_used = std::max(traj.dt_max_used, dt_eff);
    etd1_nl_valid = false;

    const bool on_target = target_idx < targets.size() && dt_eff == to_target;
    t = on_target ? targets[target_idx] : t + dt_eff;
    cur.time = t;
    if (on_target) {
      if (is_snapshot_time(t)) {
        traj.snapshot_times.push_back(t);
        traj.snapshots.push_back(cur);
      }
      if (is_record_time(t) && t < cfg.t_end) {
        on_record(cur, dt_eff);
        last_recorded = t;
      }
      ++target_idx;
    } else if (record_interval == 0.0 && t < cfg.t_end) {
      on_record(cur, dt_eff);
      last_recorded = t;
    }

    if (sup > cfg.blowup_norm_cap) {
      term = Termination::norm_cap_exceeded;
      dt = dt_eff;
      break;
    }
    if (cfg.adaptive) dt = std::min(dt * cfg.dt_regrow, cfg.dt_max);
  }

  traj.termination = term;
  traj.dt_final = dt;
  traj.final_state = std::move(cur);
  if (traj.final_state.time != last_recorded) on_record(traj.final_state, dt);
  return traj;
}

}  // namespace tns

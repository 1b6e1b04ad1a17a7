#pragma once

// Command implementations behind the CLI: simulate, certify, compare, sweep,
// and the coupling-matrix scan.  Each command takes a parsed RunConfig (sweep
// reads its grid from the raw config tree), writes its artifacts under the
// configured output directory, and returns an exit code plus a one-line
// summary.  Scientific terminations -- norm cap, dt underflow, non-finite
// values -- are results, not failures: they exit 0.  Configuration and I/O
// errors surface as exceptions for the CLI to turn into nonzero exits.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tns/analysis.hpp"
#include "tns/certificate.hpp"
#include "tns/checkpoint.hpp"
#include "tns/config.hpp"
#include "tns/csv.hpp"
#include "tns/initdata.hpp"
#include "tns/models.hpp"
#include "tns/multipliers.hpp"
#include "tns/stepper.hpp"
#include "tns/transform.hpp"

namespace tns {

struct CommandResult {
  int exit_code = 0;
  std::string message;  // one line for the terminal
  json details;         // machine-readable outcome (used by sweep aggregation)
};

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

namespace detail {

inline std::filesystem::path prepare_output_dir(const RunConfig& cfg) {
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline RecordOptions record_options(const RunConfig& cfg) {
  RecordOptions opt;
  opt.besov_exponents = cfg.diagnostics.besov_exponents;
  opt.with_energy_flux = cfg.diagnostics.energy_flux;
  opt.force_grid_path = cfg.diagnostics.force_grid_path;
  return opt;
}

inline double resolved_norm_cap(const RunConfig& cfg, double sup0) {
  if (cfg.norm_cap_absolute) return cfg.stepper.blowup_norm_cap;
  // relative cap needs a reference scale; zero data can never trip it
  return sup0 > 0.0 ? cfg.norm_cap_factor * sup0 : std::numeric_limits<double>::max();
}

inline std::vector<double> interval_grid(double t0, double t_end, double interval) {
  std::vector<double> v;
  if (interval > 0.0)
    for (double t = std::ceil(t0 / interval) * interval; t <= t_end; t += interval)
      if (t > t0) v.push_back(t);
  return v;
}

inline void write_text_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  os << text;
}

}  // namespace detail

inline SpectralVectorField initial_vector_state(const RunConfig& cfg,
                                                const FrequencyLattice& lat) {
  switch (cfg.data.kind) {
    case DataKind::cone_bump: {
      BumpSpec b = cfg.data.bump;
      b.dim = cfg.model.dim;
      return make_cone_bump(lat, b);
    }
    case DataKind::oscillatory:
      return cfg.model.dim == 3 ? make_oscillatory_data(lat, cfg.data.oscillatory)
                                : make_oscillatory_data_2d(lat, cfg.data.oscillatory);
    case DataKind::checkpoint_file: {
      const Checkpoint cp = read_checkpoint(cfg.data.checkpoint_path);
      if (!(cp.lattice == lat))
        throw std::runtime_error("checkpoint '" + cfg.data.checkpoint_path +
                                 "' was written on a different lattice");
      return cp.as_vector_field();
    }
    case DataKind::vorticity_bump:
      break;
  }
  throw std::runtime_error("vorticity_bump data drives the scalar model only");
}

inline SpectralScalarField initial_scalar_state(const RunConfig& cfg,
                                                const FrequencyLattice& lat) {
  switch (cfg.data.kind) {
    case DataKind::vorticity_bump:
      return make_vorticity_bump(lat, cfg.data.vorticity_amplitude, cfg.data.vorticity_center,
                                 cfg.data.vorticity_radius);
    case DataKind::checkpoint_file: {
      const Checkpoint cp = read_checkpoint(cfg.data.checkpoint_path);
      if (!(cp.lattice == lat))
        throw std::runtime_error("checkpoint '" + cfg.data.checkpoint_path +
                                 "' was written on a different lattice");
      return cp.as_scalar_field();
    }
    default:
      break;
  }
  throw std::runtime_error("the scalar model needs vorticity_bump or checkpoint data");
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

namespace detail {

struct SimulationOutput {
  Termination termination = Termination::reached_t_end;
  double t_final = 0.0;
  double dt_final = 0.0;
  long long accepted = 0;
  long long rejected = 0;
  double initial_sup = 0.0;
  double final_sup = 0.0;
  double peak_sup = 0.0;        // over recorded rows
  double min_real = 0.0;        // most negative recorded real part
  std::vector<DiagnosticsRow> rows;
  int checkpoints_written = 0;
};

// Advance a state and persist the standard artifact set (diagnostics CSV with
// sidecar, periodic + final checkpoints).  `make_record` maps a state to a
// DiagnosticsRecord; recording honours cfg.diagnostics.interval.
template <class State, class Rhs, class MakeRecord>
SimulationOutput run_and_persist(const State& s0, Rhs&& rhs, const std::vector<double>& sigma,
                                 const RunConfig& cfg, MakeRecord&& make_record,
                                 const std::filesystem::path& dir) {
  StepperConfig st = cfg.stepper;
  st.blowup_norm_cap = resolved_norm_cap(cfg, max_abs(s0));

  SimulationOutput out;
  out.initial_sup = max_abs(s0);
  auto on_record = [&](const State& s, double dt) {
    out.rows.push_back({dt, make_record(s)});
  };
  const std::vector<double> ck_times =
      interval_grid(s0.time, st.t_end, cfg.diagnostics.checkpoint_interval);
  const auto traj =
      integrate(s0, rhs, sigma, st, ck_times, cfg.diagnostics.interval, on_record);

  out.termination = traj.termination;
  out.t_final = traj.final_state.time;
  out.dt_final = traj.dt_final;
  out.accepted = traj.accepted;
  out.rejected = traj.rejected;
  out.final_sup = max_abs(traj.final_state);
  out.peak_sup = out.initial_sup;
  out.min_real = 0.0;
  for (const auto& row : out.rows) {
    out.peak_sup = std::max(out.peak_sup, row.rec.sup_fourier);
    out.min_real = std::min(out.min_real, row.rec.min_fourier);
  }

  const json resolved = resolved_json(cfg);
  {
    std::ofstream os(dir / "diagnostics.csv", std::ios::binary);
    write_diagnostics_csv(os, out.rows, resolved);
  }
  {
    std::ofstream os(dir / "diagnostics.meta", std::ios::binary);
    write_diagnostics_sidecar(os, record_options(cfg), resolved);
  }
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "checkpoint_%03zu.tnsf", i);
    write_checkpoint((dir / name).string(), traj.snapshots[i]);
    ++out.checkpoints_written;
  }
  write_checkpoint((dir / "final.tnsf").string(), traj.final_state);
  return out;
}

inline std::string simulation_summary_text(const RunConfig& cfg, const SimulationOutput& o) {
  std::ostringstream os;
  os << "command = simulate\n"
     << "model = " << model_name(cfg.model.kind) << "\n"
     << "termination = " << termination_name(o.termination) << "\n"
     << "blowup = " << (is_blowup(o.termination) ? "true" : "false") << "\n"
     << "t_final = " << fmt_g17(o.t_final) << "\n"
     << "dt_final = " << fmt_g17(o.dt_final) << "\n"
     << "accepted_steps = " << o.accepted << "\n"
     << "rejected_steps = " << o.rejected << "\n"
     << "initial_sup_fourier = " << fmt_g17(o.initial_sup) << "\n"
     << "peak_sup_fourier = " << fmt_g17(o.peak_sup) << "\n"
     << "final_sup_fourier = " << fmt_g17(o.final_sup) << "\n"
     << "min_real_recorded = " << fmt_g17(o.min_real) << "\n"
     << "records = " << o.rows.size() << "\n"
     << "checkpoints = " << o.checkpoints_written << "\n";
  return os.str();
}

inline json simulation_details(const SimulationOutput& o) {
  json d;
  d["termination"] = termination_name(o.termination);
  d["blowup"] = is_blowup(o.termination);
  d["t_final"] = o.t_final;
  d["peak_sup"] = o.peak_sup;
  d["initial_sup"] = o.initial_sup;
  d["heat_besov_minus1_initial"] =
      o.rows.empty() ? 0.0 : o.rows.front().rec.heat_besov_minus1;
  d["heat_besov_minus1_final"] =
      o.rows.empty() ? 0.0 : o.rows.back().rec.heat_besov_minus1;
  return d;
}

}  // namespace detail

inline CommandResult cmd_simulate(const RunConfig& cfg) {
  const FrequencyLattice lat = cfg.lattice();
  const auto dir = detail::prepare_output_dir(cfg);
  GridTransform ft(lat);
  const RecordOptions opts = detail::record_options(cfg);

  detail::SimulationOutput out;
  if (cfg.model.kind == ModelKind::vorticity_toy) {
    const SpectralScalarField w0 = initial_scalar_state(cfg, lat);
    auto rhs = [&ft](const SpectralScalarField& w) { return rhs_vorticity_toy(w, ft); };
    auto rec = [&](const SpectralScalarField& w) { return record_vorticity(w, ft, opts); };
    out = detail::run_and_persist(w0, rhs, make_dissipation(lat, 1.0), cfg, rec, dir);
  } else {
    const SpectralVectorField u0 = initial_vector_state(cfg, lat);
    const MultiplierMatrix M = make_coupling_matrix(lat);
    const auto sigma = make_dissipation(lat, model_alpha(cfg.model));
    auto rec = [&](const SpectralVectorField& u) { return record(u, M, ft, opts); };
    if (cfg.model.kind == ModelKind::navier_stokes) {
      auto rhs = [&ft](const SpectralVectorField& u) { return rhs_ns(u, ft); };
      out = detail::run_and_persist(u0, rhs, sigma, cfg, rec, dir);
    } else {
      auto rhs = [&](const SpectralVectorField& u) { return rhs_tns(u, M, ft); };
      out = detail::run_and_persist(u0, rhs, sigma, cfg, rec, dir);
    }
  }

  std::ostringstream summary;
  {
    std::ostringstream head;
    write_config_comment(head, resolved_json(cfg));
    summary << head.str() << detail::simulation_summary_text(cfg, out);
  }
  detail::write_text_file(dir / "summary.txt", summary.str());

  CommandResult r;
  r.message = "simulate: " + termination_name(out.termination) +
              " at t = " + fmt_g17(out.t_final) + ", peak sup = " + fmt_g17(out.peak_sup);
  r.details = detail::simulation_details(out);
  return r;
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

inline CommandResult cmd_certify(const RunConfig& cfg) {
  if (cfg.model.kind == ModelKind::navier_stokes ||
      cfg.model.kind == ModelKind::vorticity_toy)
    throw std::runtime_error("certify applies to the toy momentum models");

  const FrequencyLattice lat = cfg.lattice();
  const auto dir = detail::prepare_output_dir(cfg);
  const json resolved = resolved_json(cfg);
  const SpectralVectorField u0 = initial_vector_state(cfg, lat);
  const int component = cfg.data.kind == DataKind::cone_bump ? cfg.data.bump.component : 0;

  const CertifyResult cr = certify(u0, component);
  std::ostringstream cert_text;
  write_config_comment(cert_text, resolved);
  CommandResult r;
  if (!cr.ok()) {
    cert_text << "certificate = insufficient\nreason = " << cr.reason << "\n";
    detail::write_text_file(dir / "certificate.txt", cert_text.str());
    r.message = "certify: insufficient — " + cr.reason;
    r.details["certificate"] = "insufficient";
    r.details["reason"] = cr.reason;
    return r;
  }

  const BlowUpCertificate& cert = *cr.certificate;
  cert_text << cert.summary();
  cert_text << "note = lattice room limits the induction depth to K_max = " << cert.K_max
            << "\n";
  detail::write_text_file(dir / "certificate.txt", cert_text.str());
  {
    std::ofstream os(dir / "certificate.csv", std::ios::binary);
    write_config_comment(os, resolved);
    write_certificate_csv(os, cert);
  }
  r.details["certificate"] = "issued";
  r.details["K_max"] = cert.K_max;
  r.details["measured_C"] = cert.measured_C;

  // Follow-up run with snapshots at every scheduled checkpoint inside [0, t_end].
  StepperConfig st = cfg.stepper;
  st.blowup_norm_cap = detail::resolved_norm_cap(cfg, max_abs(u0));
  GridTransform ft(lat);
  const MultiplierMatrix M = make_coupling_matrix(lat);
  const auto sigma = make_dissipation(lat, model_alpha(cfg.model));
  std::vector<double> snaps;
  for (int k = 0; k <= cert.K_max; ++k) {
    const double tk = cert.schedule[static_cast<std::size_t>(k)];
    if (tk <= st.t_end * (1.0 + 1e-12)) snaps.push_back(tk);
  }
  auto rhs = [&](const SpectralVectorField& u) { return rhs_tns(u, M, ft); };
  const auto traj = integrate(u0, rhs, sigma, st, snaps);

  // Deepest level whose checkpoint the trajectory actually reached.
  int depth = -1;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const double tk = snaps[k];
    bool found = false;
    for (double t : traj.snapshot_times)
      found = found || std::abs(t - tk) <= 1e-12 * std::max(1.0, std::abs(tk));
    if (!found) break;
    depth = static_cast<int>(k);
  }

  std::ostringstream dom_text;
  write_config_comment(dom_text, resolved);
  dom_text << "termination = " << termination_name(traj.termination) << "\n"
           << "t_final = " << fmt_g17(traj.final_state.time) << "\n";
  if (depth >= 0) {
    BlowUpCertificate trimmed = cert;
    trimmed.K_max = depth;
    trimmed.schedule.resize(static_cast<std::size_t>(depth) + 1);
    const DominationReport rep = verify_domination(traj, trimmed);
    {
      std::ofstream os(dir / "domination.csv", std::ios::binary);
      write_config_comment(os, resolved);
      write_domination_csv(os, rep);
    }
    dom_text << rep.summary();
    r.details["domination_levels"] = depth;
    r.details["domination_all_pass"] = rep.all_pass;
    r.message = "certify: certificate issued (K_max = " + std::to_string(cert.K_max) +
                "), domination through level " + std::to_string(depth) +
                (rep.all_pass ? " holds" : " FAILS") + ", run " +
                termination_name(traj.termination) + " at t = " +
                fmt_g17(traj.final_state.time);
  } else {
    dom_text << "domination = not evaluated (no scheduled checkpoint reached)\n";
    r.details["domination_levels"] = -1;
    r.message = "certify: certificate issued (K_max = " + std::to_string(cert.K_max) +
                "), no scheduled checkpoint reached before " +
                termination_name(traj.termination);
  }
  if (depth < cert.K_max) {
    const std::size_t next = static_cast<std::size_t>(depth + 1);
    if (next < snaps.size())
      dom_text << "missing_checkpoints_from = " << fmt_g17(snaps[next])
               << " (trajectory terminated: " << termination_name(traj.termination)
               << " at t = " << fmt_g17(traj.final_state.time) << ")\n";
    else
      dom_text << "unscheduled_checkpoints_from_level = " << next
               << " (beyond t_end = " << fmt_g17(st.t_end) << ")\n";
  }
  detail::write_text_file(dir / "domination.txt", dom_text.str());
  r.details["termination"] = termination_name(traj.termination);
  r.details["t_final"] = traj.final_state.time;
  return r;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

inline CommandResult cmd_compare(const RunConfig& cfg) {
  if (cfg.model.kind == ModelKind::vorticity_toy)
    throw std::runtime_error("compare runs the momentum models");

  const FrequencyLattice lat = cfg.lattice();
  const auto dir = detail::prepare_output_dir(cfg);
  const json resolved = resolved_json(cfg);
  const SpectralVectorField u0 = initial_vector_state(cfg, lat);

  // The toy side keeps the configured kind; a plain NS config compares NS
  // against the standard toy model at the same viscosity exponent.
  ModelSpec toy_spec = cfg.model;
  if (toy_spec.kind == ModelKind::navier_stokes) toy_spec.kind = ModelKind::toy;

  // Shared comparison grid, bounded so held snapshots stay affordable.
  const double t_end = cfg.stepper.t_end;
  double interval = cfg.diagnostics.interval > 0.0 ? cfg.diagnostics.interval : t_end / 50.0;
  interval = std::max(interval, t_end / 200.0);
  const std::vector<double> grid = detail::interval_grid(0.0, t_end, interval);

  GridTransform ft(lat);
  const MultiplierMatrix M = make_coupling_matrix(lat);
  const RecordOptions opts = detail::record_options(cfg);
  StepperConfig st = cfg.stepper;
  st.blowup_norm_cap = detail::resolved_norm_cap(cfg, max_abs(u0));

  struct Side {
    Trajectory<SpectralVectorField> traj;
    std::vector<DiagnosticsRow> rows;
  };
  auto run_side = [&](const ModelSpec& m) {
    Side side;
    auto rec = [&](const SpectralVectorField& u, double dt) {
      side.rows.push_back({dt, record(u, M, ft, opts)});
    };
    const auto sigma = make_dissipation(lat, model_alpha(m));
    if (m.kind == ModelKind::navier_stokes) {
      auto rhs = [&ft](const SpectralVectorField& u) { return rhs_ns(u, ft); };
      side.traj = integrate(u0, rhs, sigma, st, grid, interval, rec);
    } else {
      auto rhs = [&](const SpectralVectorField& u) { return rhs_tns(u, M, ft); };
      side.traj = integrate(u0, rhs, sigma, st, grid, interval, rec);
    }
    return side;
  };
  const Side ns = run_side(ModelSpec{ModelKind::navier_stokes, cfg.model.dim, 1.0});
  const Side toy = run_side(toy_spec);

  // Index rows and snapshots by the nearest grid multiple.
  auto slot = [&](double t) { return static_cast<long long>(std::llround(t / interval)); };
  auto on_grid = [&](double t) {
    return std::abs(t - static_cast<double>(slot(t)) * interval) <=
           1e-9 * std::max(1.0, std::abs(t));
  };
  std::map<long long, const DiagnosticsRecord*> ns_rows, toy_rows;
  for (const auto& row : ns.rows)
    if (on_grid(row.rec.t)) ns_rows[slot(row.rec.t)] = &row.rec;
  for (const auto& row : toy.rows)
    if (on_grid(row.rec.t)) toy_rows[slot(row.rec.t)] = &row.rec;
  std::map<long long, const SpectralVectorField*> ns_snap, toy_snap;
  for (const auto& s : ns.traj.snapshots) ns_snap[slot(s.time)] = &s;
  for (const auto& s : toy.traj.snapshots) toy_snap[slot(s.time)] = &s;
  ns_snap[0] = &u0;  // both sides share the initial state
  toy_snap[0] = &u0;
  if (!ns.rows.empty()) ns_rows[0] = &ns.rows.front().rec;
  if (!toy.rows.empty()) toy_rows[0] = &toy.rows.front().rec;

  double divergence_t = -1.0;
  const double divergence_rtol = 1e-3;
  std::ostringstream csv;
  write_config_comment(csv, resolved);
  csv << "t,ns_sup,ns_l2,ns_heat_besov_minus1,toy_sup,toy_l2,toy_heat_besov_minus1,"
         "diff_sup\n";
  for (long long i = 0; static_cast<double>(i) * interval <= t_end * (1.0 + 1e-12); ++i) {
    const auto nr = ns_rows.find(i);
    const auto tr = toy_rows.find(i);
    if (nr == ns_rows.end() && tr == toy_rows.end()) continue;
    csv << fmt_g17(static_cast<double>(i) * interval);
    auto put = [&](const DiagnosticsRecord* rec) {
      if (rec)
        csv << "," << fmt_g17(rec->sup_fourier) << "," << fmt_g17(rec->l2_energy) << ","
            << fmt_g17(rec->heat_besov_minus1);
      else
        csv << ",,,";
    };
    put(nr == ns_rows.end() ? nullptr : nr->second);
    put(tr == toy_rows.end() ? nullptr : tr->second);
    const auto a = ns_snap.find(i);
    const auto b = toy_snap.find(i);
    if (a != ns_snap.end() && b != toy_snap.end()) {
      SpectralVectorField diff = *a->second;
      for (int c = 0; c < diff.dim(); ++c)
        for (std::size_t p = 0; p < diff.comp[c].size(); ++p)
          diff.comp[c][p] -= b->second->comp[c][p];
      const double d = max_abs(diff);
      csv << "," << fmt_g17(d);
      const double scale = std::max(max_abs(*a->second), max_abs(*b->second));
      if (divergence_t < 0.0 && scale > 0.0 && d > divergence_rtol * scale)
        divergence_t = static_cast<double>(i) * interval;
    } else {
      csv << ",";
    }
    csv << "\n";
  }
  detail::write_text_file(dir / "compare.csv", csv.str());

  std::ostringstream sum;
  write_config_comment(sum, resolved);
  sum << "command = compare\n"
      << "ns_termination = " << termination_name(ns.traj.termination) << "\n"
      << "ns_t_final = " << fmt_g17(ns.traj.final_state.time) << "\n"
      << "toy_model = " << model_name(toy_spec.kind) << "\n"
      << "toy_termination = " << termination_name(toy.traj.termination) << "\n"
      << "toy_t_final = " << fmt_g17(toy.traj.final_state.time) << "\n"
      << "comparison_interval = " << fmt_g17(interval) << "\n";
  if (divergence_t >= 0.0)
    sum << "divergence_time = " << fmt_g17(divergence_t) << "  # first grid time with "
        << "relative sup difference above " << fmt_g17(divergence_rtol) << "\n";
  else
    sum << "divergence_time = none\n";
  detail::write_text_file(dir / "summary.txt", sum.str());

  CommandResult r;
  r.message = "compare: ns " + termination_name(ns.traj.termination) + " at t = " +
              fmt_g17(ns.traj.final_state.time) + "; " + model_name(toy_spec.kind) + " " +
              termination_name(toy.traj.termination) + " at t = " +
              fmt_g17(toy.traj.final_state.time) +
              (divergence_t >= 0.0 ? "; diverged at t = " + fmt_g17(divergence_t)
                                   : "; no divergence on the grid");
  r.details["ns_termination"] = termination_name(ns.traj.termination);
  r.details["toy_termination"] = termination_name(toy.traj.termination);
  r.details["toy_blowup"] = toy.traj.blowup();
  r.details["divergence_time"] = divergence_t;
  return r;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

namespace detail {

struct SweepCell {
  std::optional<double> epsilon, alpha, amplitude, dt;
  std::optional<int> N;
  std::string label;
};

inline std::vector<double> sweep_axis(const json& sweep, const char* key) {
  if (!sweep.contains(key)) return {};
  const json& v = sweep[key];
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number())
        throw ConfigError(std::string("sweep: ") + key + " must contain numbers");
      out.push_back(x.get<double>());
    }
  } else {
    throw ConfigError(std::string("sweep: ") + key + " must be a number or array");
  }
  return out;
}

}  // namespace detail

// The grid lives in a top-level "sweep" section of the raw config tree:
// numeric axes epsilon / alpha / amplitude / N / dt (scalar or list) and
// mode = simulate | certify.  Cells run over the cartesian product; each cell
// writes its artifacts to <output>/<cell label>/ and one row of sweep.csv.
inline CommandResult cmd_sweep(json tree, int threads = 1) {
  json sweep = json::object();
  if (tree.contains("sweep")) {
    sweep = tree["sweep"];
    tree.erase("sweep");
  }
  detail::require_keys(sweep, "sweep", {"epsilon", "alpha", "amplitude", "N", "dt", "mode"});
  const std::string mode = detail::get_str(sweep, "sweep", "mode", "simulate");
  if (mode != "simulate" && mode != "certify")
    throw ConfigError("sweep: mode must be simulate or certify");

  const RunConfig base = parse_run_config(tree);  // validates the template config
  const auto base_dir = detail::prepare_output_dir(base);

  const auto eps_v = detail::sweep_axis(sweep, "epsilon");
  const auto alpha_v = detail::sweep_axis(sweep, "alpha");
  const auto amp_v = detail::sweep_axis(sweep, "amplitude");
  const auto n_raw = detail::sweep_axis(sweep, "N");
  const auto dt_v = detail::sweep_axis(sweep, "dt");

  std::vector<detail::SweepCell> cells;
  const std::size_t ne = std::max<std::size_t>(eps_v.size(), 1);
  const std::size_t na = std::max<std::size_t>(alpha_v.size(), 1);
  const std::size_t nm = std::max<std::size_t>(amp_v.size(), 1);
  const std::size_t nn = std::max<std::size_t>(n_raw.size(), 1);
  const std::size_t nd = std::max<std::size_t>(dt_v.size(), 1);
  const bool empty_grid =
      eps_v.empty() && alpha_v.empty() && amp_v.empty() && n_raw.empty() && dt_v.empty();
  if (!empty_grid) {
    for (std::size_t ie = 0; ie < ne; ++ie)
      for (std::size_t ia = 0; ia < na; ++ia)
        for (std::size_t im = 0; im < nm; ++im)
          for (std::size_t in = 0; in < nn; ++in)
            for (std::size_t id = 0; id < nd; ++id) {
              detail::SweepCell c;
              if (!eps_v.empty()) c.epsilon = eps_v[ie];
              if (!alpha_v.empty()) c.alpha = alpha_v[ia];
              if (!amp_v.empty()) c.amplitude = amp_v[im];
              if (!n_raw.empty()) c.N = static_cast<int>(n_raw[in]);
              if (!dt_v.empty()) c.dt = dt_v[id];
              char buf[64];
              std::snprintf(buf, sizeof buf, "cell_%04zu",
                            cells.size());
              c.label = buf;
              cells.push_back(std::move(c));
            }
  }

  struct CellRow {
    detail::SweepCell cell;
    std::string status = "ok";
    std::string error;
    json details;
  };
  std::vector<CellRow> rows(cells.size());

  auto run_cell = [&](std::size_t i) {
    CellRow& row = rows[i];
    row.cell = cells[i];
    try {
      json t2 = tree;
      const detail::SweepCell& c = cells[i];
      if (c.epsilon) t2["data"]["epsilon"] = *c.epsilon;
      if (c.alpha) t2["model"]["alpha"] = *c.alpha;
      if (c.amplitude) {
        // route to the active data family's amplitude-like knob
        if (base.data.kind == DataKind::oscillatory)
          t2["data"]["mass_scale"] = *c.amplitude;
        else
          t2["data"]["amplitude"] = *c.amplitude;
      }
      if (c.N) t2["lattice"]["N"] = *c.N;
      if (c.dt) t2["stepper"]["dt"] = *c.dt;
      t2["output"] = (base_dir / c.label).string();
      const RunConfig cell_cfg = parse_run_config(t2);
      const CommandResult res =
          mode == "certify" ? cmd_certify(cell_cfg) : cmd_simulate(cell_cfg);
      row.details = res.details;
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || cells.size() <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(threads), cells.size());
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
          run_cell(i);
      });
    for (auto& th : pool) th.join();
  }

  std::ostringstream csv;
  {
    json embedded = tree;
    embedded["sweep"] = sweep;
    write_config_comment(csv, embedded);
  }
  csv << "cell,epsilon,alpha,amplitude,N,dt,status,termination,blowup,t_final,peak_sup,"
         "heat_besov_minus1_initial,certificate,error\n";
  auto opt_num = [&](const std::optional<double>& v) { return v ? fmt_g17(*v) : ""; };
  long long failures = 0;
  for (const auto& row : rows) {
    if (row.status != "ok") ++failures;
    auto detail_str = [&](const char* key) -> std::string {
      if (!row.details.contains(key)) return "";
      const json& v = row.details[key];
      if (v.is_number()) return fmt_g17(v.get<double>());
      if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
      return v.get<std::string>();
    };
    csv << row.cell.label << "," << opt_num(row.cell.epsilon) << ","
        << opt_num(row.cell.alpha) << "," << opt_num(row.cell.amplitude) << ","
        << (row.cell.N ? std::to_string(*row.cell.N) : "") << "," << opt_num(row.cell.dt)
        << "," << row.status << "," << detail_str("termination") << ","
        << detail_str("blowup") << "," << detail_str("t_final") << ","
        << detail_str("peak_sup") << "," << detail_str("heat_besov_minus1_initial") << ","
        << detail_str("certificate") << ",";
    for (char ch : row.error) csv << (ch == ',' || ch == '\n' ? ';' : ch);
    csv << "\n";
  }
  detail::write_text_file(base_dir / "sweep.csv", csv.str());

  CommandResult r;
  if (cells.empty()) {
    r.message = "sweep: empty grid (no cells to run)";
  } else {
    r.message = "sweep: " + std::to_string(cells.size()) + " cells, " +
                std::to_string(cells.size() - static_cast<std::size_t>(failures)) +
                " ok, " + std::to_string(failures) + " failed";
  }
  r.details["cells"] = cells.size();
  r.details["failures"] = failures;
  return r;
}

// ---------------------------------------------------------------------------
// coupling-matrix scan
// ---------------------------------------------------------------------------

inline CommandResult cmd_verify_multipliers(const RunConfig& cfg) {
  const FrequencyLattice lat = cfg.lattice();
  const auto dir = detail::prepare_output_dir(cfg);
  const PositivityReport rep = verify_positivity(lat, cfg.model.dim, cfg.samples, cfg.seed);
  {
    std::ostringstream os;
    write_config_comment(os, resolved_json(cfg));
    write_positivity_text(os, rep);
    detail::write_text_file(dir / "positivity.txt", os.str());
  }
  {
    std::ofstream os(dir / "positivity.csv", std::ios::binary);
    write_positivity_csv(os, rep);
  }
  CommandResult r;
  r.exit_code = rep.ok() ? 0 : 1;
  r.message = std::string("verify-multipliers: ") + (rep.ok() ? "PASS" : "FAIL") +
              " (min on active set = " + fmt_g17(rep.min_entry_on_cone) +
              ", off-set max = " + fmt_g17(rep.max_abs_entry_off_cone) + ")";
  r.details["ok"] = rep.ok();
  r.details["min_entry_on_cone"] = rep.min_entry_on_cone;
  return r;
}

}  // namespace tns

#pragma once

// Deterministic text output: diagnostics CSV, norm-metadata sidecars, and the
// margin / violation tables.  Every number is printed with "%.17g" so a double
// survives a write/parse round trip and identical runs produce byte-identical
// files.  Writers emit '\n' line endings only and embed the resolved run
// configuration in '#' comment lines so each artifact is self-describing.

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tns/analysis.hpp"
#include "tns/certificate.hpp"
#include "tns/multipliers.hpp"

namespace tns {

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "# config: {...}" — compact JSON, keys sorted by the library, one line
inline void write_config_comment(std::ostream& os, const nlohmann::json& resolved) {
  os << "# config: " << resolved.dump() << "\n";
}

// ---------------------------------------------------------------------------
// diagnostics
// ---------------------------------------------------------------------------

struct DiagnosticsRow {
  double dt = 0.0;
  DiagnosticsRecord rec;
};

inline std::vector<std::string> diagnostics_columns(const DiagnosticsRecord& rec) {
  std::vector<std::string> cols{"t", "dt", "sup_fourier", "min_fourier", "l2_energy"};
  for (const auto& [s, _] : rec.besov_s_inf_inf) cols.push_back("besov[" + fmt_g17(s) + "]");
  cols.push_back("heat_besov_minus1");
  cols.push_back("divergence_residual");
  cols.push_back("energy_flux");
  return cols;
}

inline void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows,
                                  const nlohmann::json& resolved) {
  write_config_comment(os, resolved);
  const DiagnosticsRecord probe = rows.empty() ? DiagnosticsRecord{} : rows.front().rec;
  const auto cols = diagnostics_columns(probe);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& row : rows) {
    if (row.rec.besov_s_inf_inf.size() != probe.besov_s_inf_inf.size())
      throw std::runtime_error("write_diagnostics_csv: inconsistent norm columns");
    os << fmt_g17(row.rec.t) << "," << fmt_g17(row.dt) << "," << fmt_g17(row.rec.sup_fourier)
       << "," << fmt_g17(row.rec.min_fourier) << "," << fmt_g17(row.rec.l2_energy);
    for (const auto& [s, v] : row.rec.besov_s_inf_inf) os << "," << fmt_g17(v);
    os << "," << fmt_g17(row.rec.heat_besov_minus1) << ","
       << fmt_g17(row.rec.divergence_residual) << "," << fmt_g17(row.rec.energy_flux) << "\n";
  }
}

// How each recorded norm was evaluated: smoothing-kernel time grid for the
// heat-flow norm, frequency-shell exponents for the sup-based norms.
inline void write_diagnostics_sidecar(std::ostream& os, const RecordOptions& opt,
                                      const nlohmann::json& resolved) {
  write_config_comment(os, resolved);
  os << "# heat-flow norm: sup over kernel times of t^{1/2} * sup_x |e^{tL} u|\n";
  os << "heat_grid =";
  for (double t : opt.heat_grid) os << " " << fmt_g17(t);
  os << "\n";
  os << "besov_exponents =";
  for (double s : opt.besov_exponents) os << " " << fmt_g17(s);
  os << "\n";
  os << "energy_flux = " << (opt.with_energy_flux ? "true" : "false") << "\n";
  os << "center_path = " << (opt.force_grid_path ? "grid" : "auto") << "\n";
}

// ---------------------------------------------------------------------------
// coupling-matrix scan
// ---------------------------------------------------------------------------

inline void write_positivity_text(std::ostream& os, const PositivityReport& r) {
  os << "coupling-matrix scan (dim " << r.dim << ")\n"
     << "  lattice points:         " << r.lattice_points << "\n"
     << "  on active set:          " << r.cone_lattice_points << "\n"
     << "  random samples:         " << r.samples << "\n"
     << "  min entry on set:       " << fmt_g17(r.min_entry_on_cone) << "\n"
     << "  max |entry| off set:    " << fmt_g17(r.max_abs_entry_off_cone) << "\n"
     << "  max identity error:     " << fmt_g17(r.max_identity_error) << "\n"
     << "  violations:             " << r.violations.size() << "\n"
     << "  verdict:                " << (r.ok() ? "PASS" : "FAIL") << "\n";
}

inline void write_positivity_csv(std::ostream& os, const PositivityReport& r) {
  os << "xi1,xi2,xi3,row,value\n";
  for (const auto& v : r.violations)
    os << fmt_g17(v.xi[0]) << "," << fmt_g17(v.xi[1]) << "," << fmt_g17(v.xi[2]) << ","
       << v.row << "," << fmt_g17(v.value) << "\n";
}

// ---------------------------------------------------------------------------
// certificate and domination
// ---------------------------------------------------------------------------

inline void write_certificate_csv(std::ostream& os, const BlowUpCertificate& cert) {
  os << "k,t_k,besov_minus1_lower_bound\n";
  for (int k = 0; k <= cert.K_max; ++k)
    os << k << "," << fmt_g17(cert.schedule[static_cast<std::size_t>(k)]) << ","
       << fmt_g17(besov_lower_bound(cert, -1.0, k)) << "\n";
}

inline void write_domination_csv(std::ostream& os, const DominationReport& r) {
  os << "k,t,margin,envelope_scale,pass\n";
  for (const auto& e : r.entries)
    os << e.k << "," << fmt_g17(e.t) << "," << fmt_g17(e.margin) << ","
       << fmt_g17(e.envelope_scale) << "," << (e.pass ? 1 : 0) << "\n";
}

}  // namespace tns

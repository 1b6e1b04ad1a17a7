#pragma once

// Run configuration.  Two on-disk formats parse to the same RunConfig:
//   * JSON (file starts with '{')
//   * flat key = value text with [section] headers, '#'/';' comments, and
//     whitespace- or comma-separated lists
// Dotted --override paths (e.g. data.amplitude=40.5) are applied to the parsed
// tree before validation.  resolved_json() materializes every default so that
// output files can embed the exact configuration that produced them.

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tns/initdata.hpp"
#include "tns/lattice.hpp"
#include "tns/models.hpp"
#include "tns/stepper.hpp"

namespace tns {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DataKind { cone_bump, oscillatory, vorticity_bump, checkpoint_file };

inline std::string data_kind_name(DataKind k) {
  switch (k) {
    case DataKind::cone_bump: return "cone_bump";
    case DataKind::oscillatory: return "oscillatory";
    case DataKind::vorticity_bump: return "vorticity_bump";
    case DataKind::checkpoint_file: return "checkpoint";
  }
  return "?";
}

inline DataKind parse_data_kind(const std::string& s) {
  if (s == "cone_bump" || s == "ms_bump" || s == "bump") return DataKind::cone_bump;
  if (s == "oscillatory" || s == "cg_data") return DataKind::oscillatory;
  if (s == "vorticity_bump") return DataKind::vorticity_bump;
  if (s == "checkpoint") return DataKind::checkpoint_file;
  throw ConfigError("unknown data kind: " + s);
}

struct DataSpec {
  DataKind kind = DataKind::cone_bump;
  BumpSpec bump;
  OscillatorySpec oscillatory;
  double vorticity_amplitude = 1.0;
  std::array<double, 3> vorticity_center{0.0, 0.0, 0.0};
  double vorticity_radius = 0.75;
  std::string checkpoint_path;
};

struct DiagnosticsConfig {
  double interval = 0.0;             // 0: record every accepted step
  double checkpoint_interval = 0.0;  // 0: final checkpoint only
  bool energy_flux = false;
  bool force_grid_path = false;
  std::vector<double> besov_exponents{-1.0};
};

struct RunConfig {
  ModelSpec model;
  int lattice_N = 32;
  double lattice_h = 1.0 / 32.0;
  StepperConfig stepper;
  double norm_cap_factor = 1e6;  // cap = factor * sup|u0|; 0 with absolute cap
  bool norm_cap_absolute = false;
  DataSpec data;
  DiagnosticsConfig diagnostics;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  long long samples = 1000000;  // random probe count for the multiplier scan

  FrequencyLattice lattice() const { return make_lattice(model.dim, lattice_N, lattice_h); }
};

// ---------------------------------------------------------------------------
// json -> RunConfig
// ---------------------------------------------------------------------------

namespace detail {

[[noreturn]] inline void config_fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

inline void require_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) config_fail(where, "unknown key '" + key + "'");
  }
}

inline double get_num(const json& obj, const std::string& where, const char* key,
                      double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) config_fail(where, std::string(key) + " must be a number");
  return obj[key].get<double>();
}

inline int get_int(const json& obj, const std::string& where, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) config_fail(where, std::string(key) + " must be an integer");
  return obj[key].get<int>();
}

inline bool get_bool(const json& obj, const std::string& where, const char* key,
                     bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) config_fail(where, std::string(key) + " must be a boolean");
  return obj[key].get<bool>();
}

inline std::string get_str(const json& obj, const std::string& where, const char* key,
                           const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) config_fail(where, std::string(key) + " must be a string");
  return obj[key].get<std::string>();
}

inline std::array<double, 3> get_point(const json& obj, const std::string& where,
                                       const char* key, std::array<double, 3> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (!v.is_array() || v.size() < 2 || v.size() > 3)
    config_fail(where, std::string(key) + " must be an array of 2 or 3 numbers");
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) config_fail(where, std::string(key) + " must contain numbers");
    p[i] = v[i].get<double>();
  }
  return p;
}

}  // namespace detail

inline RunConfig parse_run_config(const json& root) {
  using namespace detail;
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  require_keys(root, "top level",
               {"model", "lattice", "stepper", "data", "diagnostics", "output", "seed",
                "samples"});

  RunConfig cfg;

  if (root.contains("lattice")) {
    const json& l = root["lattice"];
    require_keys(l, "lattice", {"dim", "N", "h"});
    cfg.model.dim = get_int(l, "lattice", "dim", cfg.model.dim);
    cfg.lattice_N = get_int(l, "lattice", "N", cfg.lattice_N);
    cfg.lattice_h = get_num(l, "lattice", "h", cfg.lattice_h);
  }

  if (root.contains("model")) {
    const json& m = root["model"];
    require_keys(m, "model", {"kind", "alpha"});
    cfg.model.kind = parse_model(get_str(m, "model", "kind", model_name(cfg.model.kind)));
    cfg.model.alpha = get_num(m, "model", "alpha", cfg.model.alpha);
  }

  if (root.contains("stepper")) {
    const json& s = root["stepper"];
    require_keys(s, "stepper",
                 {"scheme", "dt", "t_end", "adaptive", "dt_min", "dt_max", "growth_factor",
                  "dt_regrow", "norm_cap", "norm_cap_factor"});
    cfg.stepper.scheme = parse_scheme(get_str(s, "stepper", "scheme", "etd1"));
    cfg.stepper.dt = get_num(s, "stepper", "dt", cfg.stepper.dt);
    cfg.stepper.t_end = get_num(s, "stepper", "t_end", cfg.stepper.t_end);
    cfg.stepper.adaptive = get_bool(s, "stepper", "adaptive", cfg.stepper.adaptive);
    cfg.stepper.dt_min = get_num(s, "stepper", "dt_min", cfg.stepper.dt_min);
    cfg.stepper.dt_max = get_num(s, "stepper", "dt_max", cfg.stepper.dt_max);
    cfg.stepper.growth_factor = get_num(s, "stepper", "growth_factor", cfg.stepper.growth_factor);
    cfg.stepper.dt_regrow = get_num(s, "stepper", "dt_regrow", cfg.stepper.dt_regrow);
    if (s.contains("norm_cap") && s.contains("norm_cap_factor"))
      config_fail("stepper", "norm_cap and norm_cap_factor are mutually exclusive");
    if (s.contains("norm_cap")) {
      cfg.stepper.blowup_norm_cap = get_num(s, "stepper", "norm_cap", 0.0);
      cfg.norm_cap_absolute = true;
      cfg.norm_cap_factor = 0.0;
    } else {
      cfg.norm_cap_factor = get_num(s, "stepper", "norm_cap_factor", cfg.norm_cap_factor);
      if (!(cfg.norm_cap_factor > 0.0))
        config_fail("stepper", "norm_cap_factor must be positive");
    }
  }

  if (root.contains("data")) {
    const json& d = root["data"];
    const std::string kind_str = get_str(d, "data", "kind", "cone_bump");
    cfg.data.kind = parse_data_kind(kind_str);
    switch (cfg.data.kind) {
      case DataKind::cone_bump:
        require_keys(d, "data", {"kind", "center", "radius", "amplitude", "component"});
        cfg.data.bump.dim = cfg.model.dim;
        cfg.data.bump.center = get_point(d, "data", "center", cfg.data.bump.center);
        cfg.data.bump.radius = get_num(d, "data", "radius", cfg.data.bump.radius);
        cfg.data.bump.amplitude = get_num(d, "data", "amplitude", cfg.data.bump.amplitude);
        cfg.data.bump.component = get_int(d, "data", "component", cfg.data.bump.component);
        break;
      case DataKind::oscillatory:
        require_keys(d, "data",
                     {"kind", "epsilon", "alpha", "center", "radius", "mass_scale"});
        cfg.data.oscillatory.epsilon =
            get_num(d, "data", "epsilon", cfg.data.oscillatory.epsilon);
        cfg.data.oscillatory.alpha = get_num(d, "data", "alpha", cfg.data.oscillatory.alpha);
        cfg.data.oscillatory.profile_center =
            get_point(d, "data", "center", cfg.data.oscillatory.profile_center);
        cfg.data.oscillatory.profile_radius =
            get_num(d, "data", "radius", cfg.data.oscillatory.profile_radius);
        cfg.data.oscillatory.mass_scale =
            get_num(d, "data", "mass_scale", cfg.data.oscillatory.mass_scale);
        break;
      case DataKind::vorticity_bump:
        require_keys(d, "data", {"kind", "center", "radius", "amplitude"});
        cfg.data.vorticity_center = get_point(d, "data", "center", cfg.data.vorticity_center);
        cfg.data.vorticity_radius = get_num(d, "data", "radius", cfg.data.vorticity_radius);
        cfg.data.vorticity_amplitude =
            get_num(d, "data", "amplitude", cfg.data.vorticity_amplitude);
        break;
      case DataKind::checkpoint_file:
        require_keys(d, "data", {"kind", "path"});
        cfg.data.checkpoint_path = get_str(d, "data", "path", "");
        if (cfg.data.checkpoint_path.empty())
          config_fail("data", "checkpoint data requires a path");
        break;
    }
  }

  if (root.contains("diagnostics")) {
    const json& g = root["diagnostics"];
    require_keys(g, "diagnostics",
                 {"interval", "checkpoint_interval", "energy_flux", "force_grid_path",
                  "besov_exponents"});
    cfg.diagnostics.interval = get_num(g, "diagnostics", "interval", 0.0);
    if (cfg.diagnostics.interval < 0.0)
      config_fail("diagnostics", "interval must be nonnegative");
    cfg.diagnostics.checkpoint_interval = get_num(g, "diagnostics", "checkpoint_interval", 0.0);
    if (cfg.diagnostics.checkpoint_interval < 0.0)
      config_fail("diagnostics", "checkpoint_interval must be nonnegative");
    cfg.diagnostics.energy_flux = get_bool(g, "diagnostics", "energy_flux", false);
    cfg.diagnostics.force_grid_path = get_bool(g, "diagnostics", "force_grid_path", false);
    if (g.contains("besov_exponents")) {
      const json& b = g["besov_exponents"];
      if (!b.is_array()) config_fail("diagnostics", "besov_exponents must be an array");
      cfg.diagnostics.besov_exponents.clear();
      for (const auto& v : b) {
        if (!v.is_number()) config_fail("diagnostics", "besov_exponents must contain numbers");
        cfg.diagnostics.besov_exponents.push_back(v.get<double>());
      }
    }
  }

  if (root.contains("output")) {
    if (!root["output"].is_string()) throw ConfigError("config: output must be a string");
    cfg.output_dir = root["output"].get<std::string>();
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer())
      throw ConfigError("config: seed must be an integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("samples")) {
    if (!root["samples"].is_number_integer() && !root["samples"].is_number_unsigned())
      throw ConfigError("config: samples must be an integer");
    cfg.samples = root["samples"].get<long long>();
    if (cfg.samples < 0) throw ConfigError("config: samples must be nonnegative");
  }

  // structural validation through the module constructors
  validate_model(cfg.model);
  (void)cfg.lattice();
  validate_stepper_config(cfg.stepper);
  if (cfg.model.kind == ModelKind::vorticity_toy) {
    if (cfg.data.kind != DataKind::vorticity_bump && cfg.data.kind != DataKind::checkpoint_file)
      throw ConfigError("config: vorticity_toy requires vorticity_bump or checkpoint data");
  } else if (cfg.data.kind == DataKind::vorticity_bump) {
    throw ConfigError("config: vorticity_bump data requires the vorticity_toy model");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// RunConfig -> json (all defaults materialized)
// ---------------------------------------------------------------------------

inline json resolved_json(const RunConfig& cfg) {
  json root;
  root["model"] = {{"kind", model_name(cfg.model.kind)}, {"alpha", cfg.model.alpha}};
  root["lattice"] = {{"dim", cfg.model.dim}, {"N", cfg.lattice_N}, {"h", cfg.lattice_h}};
  json s = {{"scheme", scheme_name(cfg.stepper.scheme)},
            {"dt", cfg.stepper.dt},
            {"t_end", cfg.stepper.t_end},
            {"adaptive", cfg.stepper.adaptive},
            {"dt_min", cfg.stepper.dt_min},
            {"growth_factor", cfg.stepper.growth_factor},
            {"dt_regrow", cfg.stepper.dt_regrow}};
  // JSON has no literal for infinity; an absent dt_max means "uncapped"
  if (std::isfinite(cfg.stepper.dt_max)) s["dt_max"] = cfg.stepper.dt_max;
  if (cfg.norm_cap_absolute)
    s["norm_cap"] = cfg.stepper.blowup_norm_cap;
  else
    s["norm_cap_factor"] = cfg.norm_cap_factor;
  root["stepper"] = std::move(s);

  json d;
  d["kind"] = data_kind_name(cfg.data.kind);
  auto point = [&](const std::array<double, 3>& p) {
    json a = json::array();
    for (int i = 0; i < cfg.model.dim; ++i) a.push_back(p[i]);
    return a;
  };
  switch (cfg.data.kind) {
    case DataKind::cone_bump:
      d["center"] = point(cfg.data.bump.center);
      d["radius"] = cfg.data.bump.radius;
      d["amplitude"] = cfg.data.bump.amplitude;
      d["component"] = cfg.data.bump.component;
      break;
    case DataKind::oscillatory:
      d["epsilon"] = cfg.data.oscillatory.epsilon;
      d["alpha"] = cfg.data.oscillatory.alpha;
      d["center"] = point(cfg.data.oscillatory.profile_center);
      d["radius"] = cfg.data.oscillatory.profile_radius;
      d["mass_scale"] = cfg.data.oscillatory.mass_scale;
      break;
    case DataKind::vorticity_bump:
      d["center"] = point(cfg.data.vorticity_center);
      d["radius"] = cfg.data.vorticity_radius;
      d["amplitude"] = cfg.data.vorticity_amplitude;
      break;
    case DataKind::checkpoint_file:
      d["path"] = cfg.data.checkpoint_path;
      break;
  }
  root["data"] = std::move(d);

  root["diagnostics"] = {{"interval", cfg.diagnostics.interval},
                         {"checkpoint_interval", cfg.diagnostics.checkpoint_interval},
                         {"energy_flux", cfg.diagnostics.energy_flux},
                         {"force_grid_path", cfg.diagnostics.force_grid_path},
                         {"besov_exponents", cfg.diagnostics.besov_exponents}};
  root["output"] = cfg.output_dir;
  root["seed"] = cfg.seed;
  root["samples"] = cfg.samples;
  return root;
}

// ---------------------------------------------------------------------------
// flat key = value text -> json
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// number, boolean, or bare string
inline json scalar_from_token(const std::string& tok) {
  if (tok == "true") return json(true);
  if (tok == "false") return json(false);
  try {
    std::size_t used = 0;
    const double d = std::stod(tok, &used);
    if (used == tok.size()) {
      if (std::isfinite(d) && tok.find_first_of(".eE") == std::string::npos &&
          d == static_cast<double>(static_cast<long long>(d)))
        return json(static_cast<long long>(d));
      return json(d);
    }
  } catch (...) {
  }
  return json(tok);
}

inline json value_from_text(const std::string& text) {
  std::string norm = text;
  for (char& c : norm)
    if (c == ',') c = ' ';
  std::istringstream is(norm);
  std::vector<std::string> toks;
  std::string t;
  while (is >> t) toks.push_back(t);
  if (toks.empty()) return json("");
  if (toks.size() == 1) return scalar_from_token(toks[0]);
  json arr = json::array();
  for (const auto& tok : toks) arr.push_back(scalar_from_token(tok));
  return arr;
}

}  // namespace detail

inline json flat_text_to_json(const std::string& text) {
  json root = json::object();
  json* section = &root;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.resize(cut);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      const std::string name = detail::trim(line.substr(1, line.size() - 2));
      if (name.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
      section = &root[name];
      if (section->is_null()) *section = json::object();
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    (*section)[key] = detail::value_from_text(line.substr(eq + 1));
  }
  return root;
}

// ---------------------------------------------------------------------------
// overrides and file loading
// ---------------------------------------------------------------------------

// "a.b.c=value": value parsed like a flat-file value (number/bool/list/string)
inline void apply_override(json& root, const std::string& spec) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + spec + "' is not of the form key=value");
  std::string path = spec.substr(0, eq);
  json* node = &root;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = path.find('.', pos);
    const std::string part = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (part.empty()) throw ConfigError("override '" + spec + "' has an empty path segment");
    if (dot == std::string::npos) {
      (*node)[part] = detail::value_from_text(spec.substr(eq + 1));
      break;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    if (!node->is_object())
      throw ConfigError("override '" + spec + "' descends into a non-object");
    pos = dot + 1;
  }
}

inline json load_config_tree(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const std::string lead = detail::trim(text);
  if (!lead.empty() && lead.front() == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("config '" + path + "': " + e.what());
    }
  }
  return flat_text_to_json(text);
}

inline RunConfig load_run_config(const std::string& path,
                                 const std::vector<std::string>& overrides = {}) {
  json tree = load_config_tree(path);
  for (const auto& o : overrides) apply_override(tree, o);
  return parse_run_config(tree);
}

}  // namespace tns

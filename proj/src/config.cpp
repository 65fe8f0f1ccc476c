#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "units.hpp"

namespace eeopt {

namespace {

using nlohmann::ordered_json;

struct ParamEntry {
  const char* key;
  double (*get)(const ModelConfig&);
  void (*set)(ModelConfig&, double);
};

long long checked_round(double v, const char* key) {
  if (!std::isfinite(v)) throw ConfigError(std::string(key) + ": value must be finite");
  return std::llround(v);
}

// One row per scalar field, in canonical output order.
const ParamEntry kParams[] = {
    {"propagation.alpha", [](const ModelConfig& c) { return c.propagation.alpha; },
     [](ModelConfig& c, double v) { c.propagation.alpha = v; }},
    {"propagation.omega", [](const ModelConfig& c) { return c.propagation.omega; },
     [](ModelConfig& c, double v) { c.propagation.omega = v; }},
    {"propagation.noise_var",
     [](const ModelConfig& c) { return c.propagation.noise_var; },
     [](ModelConfig& c, double v) { c.propagation.noise_var = v; }},
    {"propagation.coherence_symbols",
     [](const ModelConfig& c) { return c.propagation.coherence_symbols; },
     [](ModelConfig& c, double v) { c.propagation.coherence_symbols = v; }},
    {"propagation.symbol_time",
     [](const ModelConfig& c) { return c.propagation.symbol_time; },
     [](ModelConfig& c, double v) { c.propagation.symbol_time = v; }},
    {"hardware.pa_efficiency",
     [](const ModelConfig& c) { return c.hardware.pa_efficiency; },
     [](ModelConfig& c, double v) { c.hardware.pa_efficiency = v; }},
    {"hardware.impairment_level",
     [](const ModelConfig& c) { return c.hardware.impairment_level; },
     [](ModelConfig& c, double v) { c.hardware.impairment_level = v; }},
    {"hardware.coding_cost",
     [](const ModelConfig& c) { return c.hardware.coding_cost; },
     [](ModelConfig& c, double v) { c.hardware.coding_cost = v; }},
    {"hardware.static_power",
     [](const ModelConfig& c) { return c.hardware.static_power; },
     [](ModelConfig& c, double v) { c.hardware.static_power = v; }},
    {"hardware.per_ue_power",
     [](const ModelConfig& c) { return c.hardware.per_ue_power; },
     [](ModelConfig& c, double v) { c.hardware.per_ue_power = v; }},
    {"hardware.per_antenna_power",
     [](const ModelConfig& c) { return c.hardware.per_antenna_power; },
     [](ModelConfig& c, double v) { c.hardware.per_antenna_power = v; }},
    {"hardware.per_antenna_ue_power",
     [](const ModelConfig& c) { return c.hardware.per_antenna_ue_power; },
     [](ModelConfig& c, double v) { c.hardware.per_antenna_ue_power = v; }},
    {"solver.tol", [](const ModelConfig& c) { return c.solver.tol; },
     [](ModelConfig& c, double v) { c.solver.tol = v; }},
    {"solver.max_iter",
     [](const ModelConfig& c) { return double(c.solver.max_iter); },
     [](ModelConfig& c, double v) {
       c.solver.max_iter = int(checked_round(v, "solver.max_iter"));
     }},
    {"solver.radius", [](const ModelConfig& c) { return double(c.solver.radius); },
     [](ModelConfig& c, double v) {
       c.solver.radius = int(checked_round(v, "solver.radius"));
     }},
    {"solver.inv_snr_lo", [](const ModelConfig& c) { return c.solver.inv_snr_lo; },
     [](ModelConfig& c, double v) { c.solver.inv_snr_lo = v; }},
    {"solver.inv_snr_hi", [](const ModelConfig& c) { return c.solver.inv_snr_hi; },
     [](ModelConfig& c, double v) { c.solver.inv_snr_hi = v; }},
    {"solver.m_cap", [](const ModelConfig& c) { return double(c.solver.m_cap); },
     [](ModelConfig& c, double v) {
       c.solver.m_cap = int(checked_round(v, "solver.m_cap"));
     }},
    {"solver.k_cap", [](const ModelConfig& c) { return double(c.solver.k_cap); },
     [](ModelConfig& c, double v) {
       c.solver.k_cap = int(checked_round(v, "solver.k_cap"));
     }},
    {"solver.golden_iters",
     [](const ModelConfig& c) { return double(c.solver.golden_iters); },
     [](ModelConfig& c, double v) {
       c.solver.golden_iters = int(checked_round(v, "solver.golden_iters"));
     }},
    {"montecarlo.trials",
     [](const ModelConfig& c) { return double(c.montecarlo.trials); },
     [](ModelConfig& c, double v) {
       c.montecarlo.trials = long(checked_round(v, "montecarlo.trials"));
     }},
    {"montecarlo.max_interferers",
     [](const ModelConfig& c) { return double(c.montecarlo.max_interferers); },
     [](ModelConfig& c, double v) {
       c.montecarlo.max_interferers =
           int(checked_round(v, "montecarlo.max_interferers"));
     }},
    {"montecarlo.disk_radius_factor",
     [](const ModelConfig& c) { return c.montecarlo.disk_radius_factor; },
     [](ModelConfig& c, double v) { c.montecarlo.disk_radius_factor = v; }},
    {"montecarlo.seed",
     [](const ModelConfig& c) { return double(c.montecarlo.seed); },
     [](ModelConfig& c, double v) {
       const long long s = checked_round(v, "montecarlo.seed");
       if (s < 0) throw ConfigError("montecarlo.seed: must be nonnegative");
       c.montecarlo.seed = uint64_t(s);
     }},
    {"montecarlo.ue_rejection_cap",
     [](const ModelConfig& c) { return double(c.montecarlo.ue_rejection_cap); },
     [](ModelConfig& c, double v) {
       c.montecarlo.ue_rejection_cap =
           int(checked_round(v, "montecarlo.ue_rejection_cap"));
     }},
};

double number_at(const ordered_json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

void apply_key(ModelConfig& cfg, const std::string& dotted, double v) {
  for (const auto& p : kParams) {
    if (dotted == p.key) {
      p.set(cfg, v);
      return;
    }
  }
  throw ConfigError("unknown parameter key: " + dotted);
}

// Validate the loaded parameter sections with a minimal valid design point so
// only propagation/hardware violations can fire.
void check_sections(const ModelConfig& cfg) {
  DesignPoint pt;
  pt.beta = 1.0;
  pt.M = 1;
  pt.K = 1;
  pt.rho = 1e-19;
  pt.density = BsDensity::finite(1.0);
  const auto issues = validate_design(pt, cfg.propagation, cfg.hardware);
  if (issues.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& i : issues) msg += " [" + i.field + "] " + i.message;
  throw ConfigError(msg);
}

}  // namespace

ModelConfig config_from_json_text(const std::string& text) {
  ordered_json root = ordered_json::parse(text, nullptr, false);
  if (root.is_discarded()) throw ConfigError("config is not valid JSON");
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");

  ModelConfig cfg;
  static const char* kSections[] = {"propagation", "hardware", "solver",
                                    "montecarlo"};
  for (const auto& [section, body] : root.items()) {
    bool known = false;
    for (const char* s : kSections) known = known || section == s;
    if (!known) throw ConfigError("unknown config section: " + section);
    if (!body.is_object())
      throw ConfigError("config section " + section + " must be an object");
  }

  // Propagation first: the watt-based hardware conveniences need symbol_time.
  if (root.contains("propagation")) {
    const auto& sec = root["propagation"];
    if (sec.contains("omega") && sec.contains("omega_db"))
      throw ConfigError("propagation: give omega or omega_db, not both");
    for (const auto& [key, val] : sec.items()) {
      if (key == "omega_db") {
        cfg.propagation.omega = db_to_linear(number_at(val, "propagation.omega_db"));
      } else {
        apply_key(cfg, "propagation." + key, number_at(val, "propagation." + key));
      }
    }
  }
  for (const char* section : {"hardware", "solver", "montecarlo"}) {
    if (!root.contains(section)) continue;
    const auto& sec = root[section];
    for (const auto& [key, val] : sec.items()) {
      std::string dotted = std::string(section) + "." + key;
      const auto pos = key.rfind("_watts");
      const bool watt_key =
          section == std::string("hardware") && pos != std::string::npos &&
          pos == key.size() - 6 &&
          (key == "static_power_watts" || key == "per_ue_power_watts" ||
           key == "per_antenna_power_watts" || key == "per_antenna_ue_power_watts");
      if (watt_key) {
        const std::string base = key.substr(0, pos);
        if (sec.contains(base))
          throw ConfigError("hardware: give " + base + " or " + key + ", not both");
        apply_key(cfg, "hardware." + base,
                  watts_to_energy_per_symbol(number_at(val, dotted),
                                             cfg.propagation.symbol_time));
      } else {
        apply_key(cfg, dotted, number_at(val, dotted));
      }
    }
  }
  check_sections(cfg);
  return cfg;
}

ModelConfig config_from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading config file: " + path);
  return config_from_json_text(buf.str());
}

std::string config_to_json(const ModelConfig& cfg) {
  ordered_json root;
  for (const auto& p : kParams) {
    const std::string dotted = p.key;
    const auto dot = dotted.find('.');
    const std::string section = dotted.substr(0, dot);
    const std::string key = dotted.substr(dot + 1);
    const double v = p.get(cfg);
    // Integer-valued knobs print as integers so the canonical form re-parses
    // to the same config byte for byte.
    if (key == "max_iter" || key == "radius" || key == "m_cap" || key == "k_cap" ||
        key == "golden_iters" || key == "trials" || key == "max_interferers" ||
        key == "seed" || key == "ue_rejection_cap") {
      root[section][key] = static_cast<long long>(std::llround(v));
    } else {
      root[section][key] = v;
    }
  }
  return root.dump();
}

void set_param(ModelConfig& cfg, const std::string& key, double value) {
  apply_key(cfg, key, value);
}

double get_param(const ModelConfig& cfg, const std::string& key) {
  for (const auto& p : kParams)
    if (key == p.key) return p.get(cfg);
  throw ConfigError("unknown parameter key: " + key);
}

std::vector<std::string> param_keys() {
  std::vector<std::string> out;
  for (const auto& p : kParams) out.emplace_back(p.key);
  return out;
}

}  // namespace eeopt

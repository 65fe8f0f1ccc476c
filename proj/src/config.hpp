#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "optimizer.hpp"
#include "params.hpp"

namespace eeopt {

// Malformed or out-of-range configuration input (CLI exit code 3).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure while reading or writing (CLI exit code 4).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  PropagationParams propagation;
  HardwareParams hardware;
  SolverOptions solver;
  MonteCarloConfig montecarlo;
};

// Strict JSON load: sections `propagation`, `hardware`, `solver`,
// `montecarlo`, keys named exactly as the struct fields; unknown sections or
// keys are rejected. Convenience keys `propagation.omega_db` and
// `hardware.*_watts` convert at load (propagation is resolved first so the
// watt conversions see the configured symbol time); giving both a plain key
// and its convenience twin is an error.
ModelConfig config_from_json_text(const std::string& text);
ModelConfig config_from_file(const std::string& path);

// Canonical resolved form: fixed section and key order, converted units only.
std::string config_to_json(const ModelConfig& cfg);

// Dotted-key access ("hardware.impairment_level"); integer-valued fields are
// rounded from the double. Unknown keys raise ConfigError.
void set_param(ModelConfig& cfg, const std::string& key, double value);
double get_param(const ModelConfig& cfg, const std::string& key);
std::vector<std::string> param_keys();

}  // namespace eeopt

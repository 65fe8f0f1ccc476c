#include "params.hpp"

#include <cmath>
#include <sstream>

namespace eeopt {

namespace {

bool finite_ok(double v) { return std::isfinite(v); }

}  // namespace

std::vector<ValidationIssue> validate_design(const DesignPoint& pt,
                                             const PropagationParams& prop,
                                             const HardwareParams& hw) {
  std::vector<ValidationIssue> out;
  auto bad = [&out](const char* field, const std::string& msg) {
    out.push_back({field, msg});
  };

  if (!finite_ok(prop.alpha) || prop.alpha <= 2.0)
    bad("propagation.alpha", "pathloss exponent must be > 2 for the interference moments to exist");
  if (!finite_ok(prop.omega) || prop.omega <= 0.0)
    bad("propagation.omega", "pathloss coefficient must be positive");
  if (!finite_ok(prop.noise_var) || prop.noise_var < 0.0)
    bad("propagation.noise_var", "noise energy per symbol must be >= 0");
  if (!finite_ok(prop.coherence_symbols) || prop.coherence_symbols < 1.0)
    bad("propagation.coherence_symbols", "coherence block must hold at least one symbol");
  if (!finite_ok(prop.symbol_time) || prop.symbol_time <= 0.0)
    bad("propagation.symbol_time", "symbol time must be positive");

  if (!finite_ok(hw.pa_efficiency) || hw.pa_efficiency <= 0.0 || hw.pa_efficiency > 1.0)
    bad("hardware.pa_efficiency", "amplifier efficiency must lie in (0, 1]");
  if (!finite_ok(hw.impairment_level) || hw.impairment_level < 0.0 || hw.impairment_level >= 1.0)
    bad("hardware.impairment_level", "impairment level must lie in [0, 1)");
  if (!finite_ok(hw.coding_cost) || hw.coding_cost < 0.0)
    bad("hardware.coding_cost", "coding cost must be >= 0");
  if (!finite_ok(hw.static_power) || hw.static_power < 0.0)
    bad("hardware.static_power", "static energy per symbol must be >= 0");
  if (!finite_ok(hw.per_ue_power) || hw.per_ue_power < 0.0)
    bad("hardware.per_ue_power", "per-UE energy must be >= 0");
  if (!finite_ok(hw.per_antenna_power) || hw.per_antenna_power < 0.0)
    bad("hardware.per_antenna_power", "per-antenna energy must be >= 0");
  if (!finite_ok(hw.per_antenna_ue_power) || hw.per_antenna_ue_power < 0.0)
    bad("hardware.per_antenna_ue_power", "per-antenna-UE energy must be >= 0");

  if (pt.M < 1) bad("point.M", "need at least one antenna");
  if (pt.K < 1) bad("point.K", "need at least one UE per cell");
  if (!finite_ok(pt.beta) || pt.beta < 1.0)
    bad("point.beta", "pilot reuse must be >= 1");
  else if (pt.K >= 1 && pt.beta * pt.K > prop.coherence_symbols)
    bad("point.beta", "pilot overhead beta*K exceeds the coherence block");
  if (!pt.density.is_asymptotic()) {
    // rho = 0 is allowed: it is the noise-dominated limit (SINR 0).
    if (!finite_ok(pt.rho) || pt.rho < 0.0)
      bad("point.rho", "received energy target must be >= 0 at finite density");
  }
  return out;
}

void require_valid(const DesignPoint& pt, const PropagationParams& prop,
                   const HardwareParams& hw) {
  auto issues = validate_design(pt, prop, hw);
  if (issues.empty()) return;
  std::ostringstream os;
  os << "invalid design point:";
  for (const auto& i : issues) os << " [" << i.field << "] " << i.message << ";";
  throw std::invalid_argument(os.str());
}

}  // namespace eeopt

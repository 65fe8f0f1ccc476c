#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace eeopt {

// Propagation environment and frame structure. Defaults reproduce the
// reference urban macro setup used by all examples and tests.
struct PropagationParams {
  double alpha = 3.76;             // pathloss exponent, must satisfy alpha > 2
  double omega = 1e13;             // linear pathloss coefficient at 1 km
  double noise_var = 1e-20;        // noise energy per symbol (J)
  double coherence_symbols = 400;  // symbols per coherence block (S)
  double symbol_time = 5e-8;       // seconds per symbol, used for W <-> J/symbol
};

// Transceiver quality and circuit-power accounting. All energies are per
// symbol; `impairment_level` is the EVM-style distortion level of the RF chains.
struct HardwareParams {
  double pa_efficiency = 0.39;             // eta in (0, 1]
  double impairment_level = 0.05;                // epsilon in [0, 1)
  double coding_cost = 1.15e-9;            // J per bit: coding, decoding, backhaul
  double static_power = 5e-7;              // J/symbol per BS
  double per_ue_power = 5e-9;              // J/symbol per served UE
  double per_antenna_power = 1e-8;         // J/symbol per antenna
  double per_antenna_ue_power = 1.56e-10;  // J/symbol per antenna-UE product
};

// BS density: either a finite value in BS/km^2 or the infinite-density
// limit, in which noise and radiated power drop out of the model.
class BsDensity {
 public:
  BsDensity() = default;
  static BsDensity finite(double per_km2) {
    if (!(per_km2 > 0)) throw std::invalid_argument("BsDensity: need per_km2 > 0");
    return BsDensity(per_km2, false);
  }
  static BsDensity asymptotic() { return BsDensity(0.0, true); }
  bool is_asymptotic() const { return asymptotic_; }
  double per_km2() const {
    if (asymptotic_) throw std::logic_error("BsDensity: asymptotic variant has no finite value");
    return value_;
  }

 private:
  BsDensity(double v, bool a) : value_(v), asymptotic_(a) {}
  double value_ = 10.0;
  bool asymptotic_ = false;
};

// One candidate operating point of the network.
struct DesignPoint {
  double beta = 1.0;   // pilot reuse factor; feasible when 1 <= beta and beta*K <= S
  double rho = 1e-19;  // target received data energy per symbol (J); power
                       // control inverts pathloss, so transmit energy is rho*omega*d^alpha
  BsDensity density = BsDensity::finite(10.0);
  int M = 64;  // BS antennas
  int K = 8;   // UEs served per cell on distinct pilots
};

struct ValidationIssue {
  std::string field;
  std::string message;
};

// Checks every model constraint independently and reports all violations,
// so a config error message can list everything that is wrong at once.
std::vector<ValidationIssue> validate_design(const DesignPoint& pt,
                                             const PropagationParams& prop,
                                             const HardwareParams& hw);

// Throws std::invalid_argument with the joined issue list if invalid.
void require_valid(const DesignPoint& pt, const PropagationParams& prop,
                   const HardwareParams& hw);

}  // namespace eeopt

#pragma once

#include <string>
#include <vector>

#include "params.hpp"
#include "se_bound.hpp"

namespace eeopt {

// Mean transmit energy per data symbol of one UE under pathloss-inverting
// power control, averaged over the serving-distance distribution at density
// lambda. Pure radiated energy: no amplifier loss, no pilot amortization.
double avg_tx_power_per_ue(double rho, double omega, double alpha, double lambda);

// Radiated share of one UE's energy budget per symbol: pilots plus payload
// amortized over the coherence block, divided by the amplifier efficiency.
double radiated_power_per_ue(double rho, double omega, double alpha, double lambda,
                             double beta, double K, double coherence_symbols,
                             double eta);

// Area spectral efficiency, bit per symbol per km^2 (= bit/s/Hz/km^2).
double ase(double lambda, double K, double se);

// Area power consumption split by source. Components are J/symbol/km^2 when
// produced by apc() and J/symbol per cell when produced by ee_asymptotic(),
// where the radiated share has vanished; the relative shares are identical
// either way.
struct EEBreakdown {
  double radiated = 0.0;
  double static_bs = 0.0;
  double per_ue = 0.0;
  double per_antenna = 0.0;
  double per_antenna_ue = 0.0;
  double coding = 0.0;
  double area_se = 0.0;  // bit/symbol/km^2 (or per cell in the density limit)
  double ee = 0.0;       // bit/J
  double total() const {
    return radiated + static_bs + per_ue + per_antenna + per_antenna_ue + coding;
  }
};

// Power components in declaration order, normalized to the total.
std::vector<std::pair<std::string, double>> apc_shares(const EEBreakdown& b);

// Area power consumption at a finite-density point; the asymptotic variant
// is rejected (use ee_asymptotic, which carries the limit form).
EEBreakdown apc(const DesignPoint& pt, const PropagationParams& prop,
                const HardwareParams& hw);

// Energy efficiency at the point exactly as given (beta from the point).
double ee(const DesignPoint& pt, const PropagationParams& prop,
          const HardwareParams& hw);

// Energy efficiency with the pilot reuse replaced by the smallest one meeting
// the SINR target gamma at the point's density and power. error != none
// means no reuse works there; ee is 0 in that case.
struct TargetEe {
  double ee = 0.0;
  double beta = 0.0;
  double se = 0.0;  // per UE, bit/symbol
  EEBreakdown breakdown;
  BetaError error = BetaError::none;
};
TargetEe ee_at_target(const DesignPoint& pt, double gamma,
                      const PropagationParams& prop, const HardwareParams& hw);

// Energy efficiency in the infinite-density limit at SINR target gamma.
// M and K are real-valued so the optimizer can relax them; noise and
// radiated power are structurally absent.
TargetEe ee_asymptotic(double M, double K, double gamma,
                       const PropagationParams& prop, const HardwareParams& hw);

}  // namespace eeopt

#include "power.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eeopt {

namespace {

constexpr double kPi = std::numbers::pi;

// E{d^alpha} under the nearest-BS (Rayleigh) serving-distance law.
double mean_pathloss_distance_power(double alpha, double lambda) {
  return std::tgamma(alpha / 2.0 + 1.0) / std::pow(kPi * lambda, alpha / 2.0);
}

}  // namespace

double avg_tx_power_per_ue(double rho, double omega, double alpha, double lambda) {
  if (!(rho >= 0.0)) throw std::invalid_argument("avg_tx_power_per_ue: need rho >= 0");
  if (!(omega > 0.0)) throw std::invalid_argument("avg_tx_power_per_ue: need omega > 0");
  // The distance moment exists for any alpha > -2; the stricter alpha > 2 of
  // the interference model is checked where interference is involved.
  if (!(alpha > -2.0)) throw std::invalid_argument("avg_tx_power_per_ue: need alpha > -2");
  if (!(lambda > 0.0)) throw std::invalid_argument("avg_tx_power_per_ue: need lambda > 0");
  return rho * omega * mean_pathloss_distance_power(alpha, lambda);
}

double radiated_power_per_ue(double rho, double omega, double alpha, double lambda,
                             double beta, double K, double coherence_symbols,
                             double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("radiated_power_per_ue: need eta in (0, 1]");
  if (!(beta * K <= coherence_symbols + 1.0))
    throw std::invalid_argument("radiated_power_per_ue: beta*K exceeds the coherence block");
  const double s = coherence_symbols;
  // beta*K pilot symbols radiate at the payload power; one extra symbol per
  // block accounts for the payload sent in the pilot slot of the home cell,
  // hence the 1 + 1/S - beta*K/S amortization.
  const double amortize = 1.0 + 1.0 / s - beta * K / s;
  return amortize * (rho * omega / eta) * mean_pathloss_distance_power(alpha, lambda);
}

double ase(double lambda, double K, double se) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("ase: need lambda >= 0");
  if (!(K >= 1.0)) throw std::invalid_argument("ase: need K >= 1");
  return lambda * K * se;
}

std::vector<std::pair<std::string, double>> apc_shares(const EEBreakdown& b) {
  const double t = b.total();
  if (!(t > 0.0)) throw std::invalid_argument("apc_shares: breakdown total must be positive");
  return {{"radiated", b.radiated / t},
          {"static", b.static_bs / t},
          {"per_ue", b.per_ue / t},
          {"per_antenna", b.per_antenna / t},
          {"per_antenna_ue", b.per_antenna_ue / t},
          {"coding", b.coding / t}};
}

namespace {

// Shared finite-density assembly: per-cell energies, scaled to per km^2 in
// the returned breakdown. `se` is the per-UE spectral efficiency in
// bit/symbol that the caller stands behind for this point.
EEBreakdown finite_breakdown(const DesignPoint& pt, const PropagationParams& prop,
                             const HardwareParams& hw, double se) {
  const double lambda = pt.density.per_km2();
  const double K = pt.K;
  const double M = pt.M;
  const double rad = radiated_power_per_ue(pt.rho, prop.omega, prop.alpha, lambda,
                                           pt.beta, K, prop.coherence_symbols,
                                           hw.pa_efficiency) * K;
  EEBreakdown b;
  b.radiated = lambda * rad;
  b.static_bs = lambda * hw.static_power;
  b.per_ue = lambda * hw.per_ue_power * K;
  b.per_antenna = lambda * hw.per_antenna_power * M;
  b.per_antenna_ue = lambda * hw.per_antenna_ue_power * M * K;
  b.coding = lambda * hw.coding_cost * K * se;
  b.area_se = lambda * K * se;
  // Per-cell form of the same ratio; lambda cancels exactly.
  const double circ = hw.static_power + hw.per_ue_power * K
                    + hw.per_antenna_power * M + hw.per_antenna_ue_power * M * K;
  const double den = rad + circ + hw.coding_cost * K * se;
  b.ee = K * se / den;
  return b;
}

}  // namespace

EEBreakdown apc(const DesignPoint& pt, const PropagationParams& prop,
                const HardwareParams& hw) {
  if (pt.density.is_asymptotic())
    throw std::invalid_argument("apc: area power diverges in the infinite-density limit; "
                                "use ee_asymptotic for the limit form");
  require_valid(pt, prop, hw);
  const double se = se_lower_bound(pt, prop, hw.impairment_level);
  return finite_breakdown(pt, prop, hw, se);
}

double ee(const DesignPoint& pt, const PropagationParams& prop,
          const HardwareParams& hw) {
  if (pt.density.is_asymptotic()) {
    const double se = se_lower_bound(pt.M, pt.K, pt.beta, 0.0, prop.alpha,
                                     hw.impairment_level, prop.coherence_symbols);
    const double circ = hw.static_power + hw.per_ue_power * pt.K
                      + hw.per_antenna_power * pt.M
                      + hw.per_antenna_ue_power * pt.M * pt.K;
    const double den = circ + hw.coding_cost * pt.K * se;
    return pt.K * se / den;
  }
  return apc(pt, prop, hw).ee;
}

TargetEe ee_at_target(const DesignPoint& pt, double gamma,
                      const PropagationParams& prop, const HardwareParams& hw) {
  if (pt.density.is_asymptotic()) return ee_asymptotic(pt.M, pt.K, gamma, prop, hw);
  const double x = inverse_snr(pt, prop);
  TargetEe r;
  const BetaResult br = optimal_beta(pt.M, pt.K, x, gamma, prop.alpha,
                                     hw.impairment_level, prop.coherence_symbols);
  r.error = br.error;
  r.beta = br.beta;
  if (!br) return r;
  const double pre = 1.0 - br.beta * pt.K / prop.coherence_symbols;
  r.se = pre * std::log2(1.0 + gamma);
  DesignPoint at = pt;
  at.beta = br.beta;
  r.breakdown = finite_breakdown(at, prop, hw, r.se);
  r.ee = r.breakdown.ee;
  return r;
}

TargetEe ee_asymptotic(double M, double K, double gamma,
                       const PropagationParams& prop, const HardwareParams& hw) {
  if (!(M >= 1.0 && K >= 1.0))
    throw std::invalid_argument("ee_asymptotic: need M >= 1 and K >= 1");
  TargetEe r;
  const BetaResult br = optimal_beta(M, K, 0.0, gamma, prop.alpha, hw.impairment_level,
                                     prop.coherence_symbols);
  r.error = br.error;
  r.beta = br.beta;
  if (!br) return r;
  const double pre = 1.0 - br.beta * K / prop.coherence_symbols;
  const double se = pre * std::log2(1.0 + gamma);
  const double den = hw.static_power + hw.per_ue_power * K + hw.per_antenna_power * M
                   + hw.per_antenna_ue_power * M * K + hw.coding_cost * K * se;
  r.se = se;
  r.ee = K * se / den;
  EEBreakdown& b = r.breakdown;
  b.radiated = 0.0;
  b.static_bs = hw.static_power;
  b.per_ue = hw.per_ue_power * K;
  b.per_antenna = hw.per_antenna_power * M;
  b.per_antenna_ue = hw.per_antenna_ue_power * M * K;
  b.coding = hw.coding_cost * K * se;
  b.area_se = K * se;
  b.ee = r.ee;
  return r;
}

}  // namespace eeopt

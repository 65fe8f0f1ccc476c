#include "se_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eeopt {

namespace {

void check_scalar_args(double M, double K, double beta, double inv_snr,
                       double alpha, double impairment) {
  if (!(M >= 1.0)) throw std::invalid_argument("sinr bound: need M >= 1");
  if (!(K >= 1.0)) throw std::invalid_argument("sinr bound: need K >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("sinr bound: need beta > 0");
  if (!(inv_snr >= 0.0)) throw std::invalid_argument("sinr bound: need inv_snr >= 0");
  if (!(alpha > 2.0)) throw std::invalid_argument("sinr bound: need alpha > 2");
  if (!(impairment >= 0.0 && impairment < 1.0))
    throw std::invalid_argument("sinr bound: need impairment in [0, 1)");
}

}  // namespace

double inverse_snr(const DesignPoint& pt, const PropagationParams& prop) {
  if (pt.density.is_asymptotic()) return 0.0;
  if (!(pt.rho >= 0.0)) throw std::invalid_argument("inverse_snr: need rho >= 0");
  // rho = 0 at finite density is the noise-dominated limit, not an error.
  if (pt.rho == 0.0) return std::numeric_limits<double>::infinity();
  return prop.noise_var / pt.rho;
}

double sinr_lower_bound(double M, double K, double beta, double inv_snr,
                        double alpha, double impairment) {
  check_scalar_args(M, K, beta, inv_snr, alpha, impairment);
  const double e2 = impairment * impairment;
  const double x = inv_snr;
  const double am2 = alpha - 2.0;
  const double am1 = alpha - 1.0;
  const double num = M * (1.0 - e2) * (1.0 - e2);
  const double den = (K + x) * (1.0 + 2.0 / (beta * am2) + x)
                   + (2.0 * K / am2) * (1.0 + x)
                   + (K / beta) * (4.0 / (am2 * am2) + 1.0 / am1)
                   + M * (1.0 - e2) * (1.0 / (beta * am1) + e2);
  return num / den;
}

double sinr_lower_bound(const DesignPoint& pt, const PropagationParams& prop,
                        double impairment) {
  return sinr_lower_bound(pt.M, pt.K, pt.beta, inverse_snr(pt, prop),
                          prop.alpha, impairment);
}

double pilot_prelog(double beta, double K, double coherence_symbols) {
  if (!(beta * K <= coherence_symbols))
    throw std::invalid_argument("pilot_prelog: beta*K exceeds the coherence block");
  return 1.0 - beta * K / coherence_symbols;
}

double se_lower_bound(double M, double K, double beta, double inv_snr,
                      double alpha, double impairment, double coherence_symbols) {
  const double sinr = sinr_lower_bound(M, K, beta, inv_snr, alpha, impairment);
  return pilot_prelog(beta, K, coherence_symbols) * std::log2(1.0 + sinr);
}

double se_lower_bound(const DesignPoint& pt, const PropagationParams& prop,
                      double impairment) {
  return se_lower_bound(pt.M, pt.K, pt.beta, inverse_snr(pt, prop), prop.alpha,
                        impairment, prop.coherence_symbols);
}

double asymptotic_sinr(double beta, double alpha, double impairment) {
  if (!(beta > 0.0)) throw std::invalid_argument("asymptotic_sinr: need beta > 0");
  if (!(alpha > 2.0)) throw std::invalid_argument("asymptotic_sinr: need alpha > 2");
  const double e2 = impairment * impairment;
  return (1.0 - e2) * (1.0 - e2)
       / ((1.0 - e2) * (1.0 / (beta * (alpha - 1.0)) + e2));
}

double feasibility_limit(double coherence_symbols, double alpha, double impairment) {
  if (!(coherence_symbols >= 1.0))
    throw std::invalid_argument("feasibility_limit: need coherence_symbols >= 1");
  if (!(alpha > 2.0)) throw std::invalid_argument("feasibility_limit: need alpha > 2");
  const double e2 = impairment * impairment;
  const double s = coherence_symbols;
  return s * (alpha - 1.0) * (1.0 - e2) / (1.0 + e2 * s * (alpha - 1.0));
}

const char* to_string(BetaError e) {
  switch (e) {
    case BetaError::none: return "none";
    case BetaError::denominator_nonpositive: return "denominator_nonpositive";
    case BetaError::target_exceeded_at_unit_reuse: return "target_exceeded_at_unit_reuse";
    case BetaError::overhead_exceeded: return "overhead_exceeded";
  }
  return "unknown";
}

ReuseCoefficients reuse_coefficients(double M, double K, double inv_snr,
                                     double alpha, double impairment) {
  const double e2 = impairment * impairment;
  const double x = inv_snr;
  const double am2 = alpha - 2.0;
  const double am1 = alpha - 1.0;
  ReuseCoefficients c;
  c.b1 = 4.0 * K / (am2 * am2) + (K + M * (1.0 - e2)) / am1 + 2.0 * (K + x) / am2;
  c.b2 = (K + x + 2.0 * K / am2) * (1.0 + x) + (1.0 - e2) * e2 * M;
  return c;
}

BetaResult optimal_beta(double M, double K, double inv_snr, double gamma,
                        double alpha, double impairment, double coherence_symbols) {
  check_scalar_args(M, K, 1.0, inv_snr, alpha, impairment);
  if (!(gamma > 0.0)) throw std::invalid_argument("optimal_beta: need gamma > 0");
  const double e2 = impairment * impairment;
  const auto c = reuse_coefficients(M, K, inv_snr, alpha, impairment);
  const double den = M * (1.0 - e2) * (1.0 - e2) - c.b2 * gamma;
  if (!(den > 0.0)) return {0.0, BetaError::denominator_nonpositive};
  const double beta = c.b1 * gamma / den;
  if (beta < 1.0) return {beta, BetaError::target_exceeded_at_unit_reuse};
  if (beta * K > coherence_symbols) return {beta, BetaError::overhead_exceeded};
  return {beta, BetaError::none};
}

double effective_sinr_given_geometry(const GeometryRealization& g, double M,
                                     double K, double beta, double inv_snr,
                                     double alpha, double impairment) {
  check_scalar_args(M, K, beta, inv_snr, alpha, impairment);
  const double e2 = impairment * impairment;
  // Terms are nonnegative and summed in long double, so the result does not
  // depend on the magnitude spread across near and far cells.
  long double a_acc = 0.0L, c1_acc = 0.0L, c2_acc = 0.0L;
  for (const auto& cell : g.cells) {
    for (size_t i = 0; i < cell.ue.size(); ++i) {
      const auto& ue = cell.ue[i];
      if (!(ue.own_bs > 0.0) || !(ue.typical_bs > 0.0))
        throw std::invalid_argument("effective_sinr_given_geometry: distances must be positive");
      const double ratio = std::pow(ue.own_bs / ue.typical_bs, alpha);
      a_acc += ratio;
      if (i == 0) {
        c1_acc += ratio;
        c2_acc += static_cast<long double>(ratio) * ratio;
      }
    }
  }
  const double a_sum = static_cast<double>(a_acc);
  const double c1 = static_cast<double>(c1_acc);
  const double c2 = static_cast<double>(c2_acc);
  const double x = inv_snr;
  const double den = (K + a_sum + x) * (1.0 + c1 / beta + x)
                   + M * (1.0 - e2) * (c2 / beta + e2);
  return M * (1.0 - e2) * (1.0 - e2) / den;
}

}  // namespace eeopt

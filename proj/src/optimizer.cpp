#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eeopt {

namespace {

struct RatioCoeffs {
  double a0, a1, a2, a3, a4, a5;
};

// Coefficients of the density-limit EE objective in (cbar, K): a0..a3 shape
// the overhead w = beta*K/S = (a0*cbar + a1)/(a2*cbar - a3), a4 + a5*cbar is
// the circuit energy per cell divided by K.
RatioCoeffs ratio_coeffs(double K, double gamma, const PropagationParams& p,
                         const HardwareParams& h) {
  const double e2 = h.impairment_level * h.impairment_level;
  const double am2 = p.alpha - 2.0;
  const double am1 = p.alpha - 1.0;
  const double s = p.coherence_symbols;
  RatioCoeffs c;
  c.a0 = gamma * K * (1.0 - e2) / (s * am1);
  c.a1 = (K / s) * (4.0 * gamma / (am2 * am2) + gamma / am1 + 2.0 * gamma / am2);
  c.a2 = (1.0 - e2) * (1.0 - (1.0 + gamma) * e2);
  c.a3 = (1.0 + 2.0 / am2) * gamma;
  c.a4 = h.static_power + h.per_ue_power * K;
  c.a5 = h.per_antenna_power * K + h.per_antenna_ue_power * K * K;
  return c;
}

// Antenna-per-UE ratio on the unit-reuse boundary: with beta pinned at 1 the
// target fixes cbar outright.
double unit_reuse_cbar(double gamma, const PropagationParams& p, const HardwareParams& h) {
  const double e2 = h.impairment_level * h.impairment_level;
  const double am2 = p.alpha - 2.0;
  const double am1 = p.alpha - 1.0;
  const double num = gamma * (1.0 + 4.0 / (am2 * am2) + 1.0 / am1 + 4.0 / am2);
  const double den = (1.0 - e2) * (1.0 - (1.0 + gamma) * e2) - gamma * (1.0 - e2) / am1;
  if (!(den > 0.0))
    throw std::domain_error("optimal_cbar_given_k: target infeasible even at unit reuse");
  return num / den;
}

void check_target(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("optimizer: need gamma > 0");
}

}  // namespace

double reuse_overhead_slope(double cbar, double gamma,
                            const PropagationParams& p, const HardwareParams& h) {
  check_target(gamma);
  if (!(cbar > 0.0)) throw std::invalid_argument("reuse_overhead_slope: need cbar > 0");
  const double e2 = h.impairment_level * h.impairment_level;
  const double am2 = p.alpha - 2.0;
  const double am1 = p.alpha - 1.0;
  const double num = (4.0 * gamma / (am2 * am2) + gamma / am1 + 2.0 * gamma / am2)
                   + gamma * (1.0 - e2) * cbar / am1;
  const double den = (1.0 - e2) * (1.0 - (1.0 + gamma) * e2) * cbar
                   - (1.0 + 2.0 / am2) * gamma;
  if (!(den > 0.0))
    throw std::domain_error("reuse_overhead_slope: ratio too small for the target");
  return num / (p.coherence_symbols * den);
}

double optimal_k_given_cbar(double cbar, double gamma,
                            const PropagationParams& p, const HardwareParams& h) {
  const double g = reuse_overhead_slope(cbar, gamma, p, h);
  const double c0 = h.static_power;
  const double c1 = h.per_ue_power;
  const double d0 = h.per_antenna_power;
  const double d1 = h.per_antenna_ue_power;
  const double den = d1 * cbar + g * (c1 + d0 * cbar);
  if (!(den > 0.0))
    throw std::domain_error("optimal_k_given_cbar: degenerate circuit model");
  return (std::sqrt((g * c0) * (g * c0) + c0 * d1 * cbar + c0 * g * (c1 + d0 * cbar))
          - g * c0) / den;
}

double optimal_cbar_given_k(double K, double gamma,
                            const PropagationParams& p, const HardwareParams& h) {
  check_target(gamma);
  if (!(K >= 1.0)) throw std::invalid_argument("optimal_cbar_given_k: need K >= 1");
  const RatioCoeffs a = ratio_coeffs(K, gamma, p, h);
  if (a.a2 <= a.a0) return unit_reuse_cbar(gamma, p, h);
  const double r = a.a1 * a.a3 + a.a1 * a.a1 + a.a1 * a.a2 * a.a4 / a.a5
                 + a.a0 * a.a3 * a.a4 / a.a5 - a.a0 * a.a1 * a.a4 / a.a5
                 - a.a0 * a.a0 * a.a3 * a.a4 / (a.a2 * a.a5)
                 + a.a0 * a.a1 * a.a3 / a.a2 + a.a0 * a.a3 * a.a3 / a.a2;
  const double cbar = (a.a1 + a.a3 + std::sqrt(r)) / (a.a2 - a.a0);
  // Stationary point only counts if the reuse it implies is a real reuse
  // (>= 1); otherwise the optimum sits on the unit-reuse boundary.
  const double w = (a.a0 * cbar + a.a1) / (a.a2 * cbar - a.a3);
  if (w * p.coherence_symbols / K < 1.0) return unit_reuse_cbar(gamma, p, h);
  return cbar;
}

RealOptimum alternate_optimize(double M0, double K0, double gamma,
                               const PropagationParams& prop, const HardwareParams& hw,
                               double tol, int max_iter) {
  check_target(gamma);
  if (!(M0 >= 1.0 && K0 >= 1.0))
    throw std::invalid_argument("alternate_optimize: need M0 >= 1 and K0 >= 1");
  RealOptimum out;
  double M = M0, K = K0;
  const TargetEe start = ee_asymptotic(M, K, gamma, prop, hw);
  double ee_prev = start.error == BetaError::none ? start.ee : 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const double cbar = M / K;
    K = optimal_k_given_cbar(cbar, gamma, prop, hw);
    M = cbar * K;
    const double cbar_new = optimal_cbar_given_k(K, gamma, prop, hw);
    M = cbar_new * K;
    const TargetEe cur = ee_asymptotic(M, K, gamma, prop, hw);
    out.trace.push_back({it, M, K, cur.ee});
    if (std::fabs(cur.ee - ee_prev) <= tol * std::fabs(cur.ee)) {
      out.converged = true;
      ee_prev = cur.ee;
      break;
    }
    ee_prev = cur.ee;
  }
  out.M = M;
  out.K = K;
  out.ee = ee_prev;
  return out;
}

IntegerOptimum integer_refine(double M_real, double K_real, double gamma,
                              const PropagationParams& prop, const HardwareParams& hw,
                              int radius) {
  check_target(gamma);
  if (radius < 1) throw std::invalid_argument("integer_refine: need radius >= 1");
  int mc = std::max(1, static_cast<int>(std::lround(M_real)));
  int kc = std::max(1, static_cast<int>(std::lround(K_real)));
  IntegerOptimum best;
  for (int pass = 0; pass < 64; ++pass) {
    const int m_lo = std::max(1, mc - radius), m_hi = mc + radius;
    const int k_lo = std::max(1, kc - radius), k_hi = kc + radius;
    const IntegerOptimum cand = brute_force_ee_max(m_lo, m_hi, k_lo, k_hi, gamma, prop, hw);
    if (cand.ee > best.ee) best = cand;
    const bool interior = best.M > m_lo && best.M < m_hi && best.K > k_lo && best.K < k_hi;
    if (best.ee == 0.0 || interior || (best.M == mc && best.K == kc)) break;
    mc = best.M;
    kc = best.K;
  }
  return best;
}

IntegerOptimum brute_force_ee_max(int M_lo, int M_hi, int K_lo, int K_hi,
                                  double gamma, const PropagationParams& prop,
                                  const HardwareParams& hw) {
  check_target(gamma);
  if (M_lo < 1 || K_lo < 1 || M_hi < M_lo || K_hi < K_lo)
    throw std::invalid_argument("brute_force_ee_max: bad rectangle");
  IntegerOptimum best;
  // K outer, M inner with strict improvement: ties resolve to the smallest
  // K, then the smallest M.
  for (int k = K_lo; k <= K_hi; ++k) {
    for (int m = M_lo; m <= M_hi; ++m) {
      const TargetEe r = ee_asymptotic(m, k, gamma, prop, hw);
      if (r.error != BetaError::none) continue;
      if (r.ee > best.ee) best = {m, k, r.beta, r.se, r.ee};
    }
  }
  return best;
}

AsymptoticOptimum optimize_asymptotic(double gamma, const PropagationParams& prop,
                                      const HardwareParams& hw, const SolverOptions& opt) {
  AsymptoticOptimum out;
  out.real = alternate_optimize(20.0, 1.0, gamma, prop, hw, opt.tol, opt.max_iter);
  out.integer = integer_refine(out.real.M, out.real.K, gamma, prop, hw, opt.radius);
  return out;
}

namespace {

// Fast finite-density EE evaluator with everything independent of (M, K, x)
// hoisted out. Mirrors ee_at_target exactly in evaluation order.
struct DensityObjective {
  double gamma, alpha, e2, s, sig2, rate;
  double omega_over_eta, moment, lambda;
  double c0, c1, d0, d1, a_cost;

  DensityObjective(double lam, double gam, const PropagationParams& p,
                   const HardwareParams& h)
      : gamma(gam), alpha(p.alpha), e2(h.impairment_level * h.impairment_level),
        s(p.coherence_symbols), sig2(p.noise_var), rate(std::log2(1.0 + gam)),
        omega_over_eta(p.omega / h.pa_efficiency),
        moment(std::tgamma(p.alpha / 2.0 + 1.0)
               / std::pow(3.14159265358979323846 * lam, p.alpha / 2.0)),
        lambda(lam), c0(h.static_power), c1(h.per_ue_power),
        d0(h.per_antenna_power), d1(h.per_antenna_ue_power), a_cost(h.coding_cost) {}

  // beta meeting the target at (M, K, x); quiet NaN when infeasible.
  double beta_at(double M, double K, double x) const {
    const double am2 = alpha - 2.0;
    const double am1 = alpha - 1.0;
    const double b1 = 4.0 * K / (am2 * am2) + (K + M * (1.0 - e2)) / am1
                    + 2.0 * (K + x) / am2;
    const double b2 = (K + x + 2.0 * K / am2) * (1.0 + x) + (1.0 - e2) * e2 * M;
    const double den = M * (1.0 - e2) * (1.0 - e2) - b2 * gamma;
    if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double beta = b1 * gamma / den;
    if (beta < 1.0 || beta * K > s) return std::numeric_limits<double>::quiet_NaN();
    return beta;
  }

  // EE at (M, K, x) with target-optimal reuse; -1 when infeasible.
  double operator()(double M, double K, double x) const {
    const double beta = beta_at(M, K, x);
    if (!(beta > 0.0)) return -1.0;
    const double pre = 1.0 - beta * K / s;
    const double se = pre * rate;
    const double rho = sig2 / x;
    const double rad = (1.0 + 1.0 / s - beta * K / s)
                     * (K * rho * omega_over_eta) * moment;
    const double circ = c0 + c1 * K + d0 * M + d1 * M * K;
    return K * se / (rad + circ + a_cost * K * se);
  }

  // Feasible inverse-SNR band at (M, K): beta(x) rises monotonically with x,
  // so the band is where it passes [1, S/K]. Returns false when empty.
  bool band(double M, double K, double& lo, double& hi) const {
    const double am2 = alpha - 2.0;
    const double am1 = alpha - 1.0;
    const double p0 = 4.0 * K / (am2 * am2) + (K + M * (1.0 - e2)) / am1 + 2.0 * K / am2;
    const double p1 = 2.0 / am2;
    const double q0 = K + 2.0 * K / am2;
    const double q1 = (1.0 - e2) * e2 * M;
    const double m_eff = M * (1.0 - e2) * (1.0 - e2);
    // beta(0) checks: denominator must be positive and overhead satisfiable.
    const double den0 = m_eff - (q0 + q1) * gamma;
    if (!(den0 > 0.0)) return false;
    const double beta0 = p0 * gamma / den0;
    if (beta0 * K > s) return false;
    // x where beta(x) = t: t*gamma*x^2 + (t*gamma*(q0+1) + gamma*p1)*x
    //                      + gamma*p0 + t*gamma*(q0+q1) - t*m_eff = 0.
    const auto root = [&](double t) {
      const double a = t * gamma;
      const double b = t * gamma * (q0 + 1.0) + gamma * p1;
      const double c = gamma * p0 + t * gamma * (q0 + q1) - t * m_eff;
      if (c >= 0.0) return 0.0;  // beta(0) already >= t
      return (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
    };
    lo = beta0 >= 1.0 ? 0.0 : root(1.0);
    hi = root(s / K);
    return hi > lo;
  }

  // Golden-section maximum over log(x) within the feasible band.
  double best_over_x(double M, double K, double x_lo_cfg, double x_hi_cfg,
                     int iters, double& x_best) const {
    double lo, hi;
    if (!band(M, K, lo, hi)) return -1.0;
    lo = std::max(lo, x_lo_cfg);
    hi = std::min(hi, x_hi_cfg);
    if (!(hi > lo)) return -1.0;
    double t_lo = std::log(lo), t_hi = std::log(hi);
    const double inv_phi = 0.6180339887498949;
    double t1 = t_hi - inv_phi * (t_hi - t_lo);
    double t2 = t_lo + inv_phi * (t_hi - t_lo);
    double f1 = (*this)(M, K, std::exp(t1));
    double f2 = (*this)(M, K, std::exp(t2));
    for (int i = 0; i < iters; ++i) {
      if (f1 < f2) {
        t_lo = t1;
        t1 = t2;
        f1 = f2;
        t2 = t_lo + inv_phi * (t_hi - t_lo);
        f2 = (*this)(M, K, std::exp(t2));
      } else {
        t_hi = t2;
        t2 = t1;
        f2 = f1;
        t1 = t_hi - inv_phi * (t_hi - t_lo);
        f1 = (*this)(M, K, std::exp(t1));
      }
    }
    x_best = std::exp(0.5 * (t_lo + t_hi));
    const double f_mid = (*this)(M, K, x_best);
    return f_mid;
  }
};

DensityOptimum finish_density_point(double lambda, int M, int K, double x,
                                    double gamma, const PropagationParams& prop,
                                    const HardwareParams& hw) {
  DensityOptimum out;
  DesignPoint pt;
  pt.M = M;
  pt.K = K;
  pt.density = BsDensity::finite(lambda);
  pt.rho = prop.noise_var > 0.0 ? prop.noise_var / x : 1e-18;
  const TargetEe r = ee_at_target(pt, gamma, prop, hw);
  if (r.error != BetaError::none) return out;
  pt.beta = r.beta;
  out.point = pt;
  out.inv_snr = inverse_snr(pt, prop);
  out.se = r.se;
  out.ee = r.ee;
  out.ok = true;
  return out;
}

}  // namespace

DensityOptimum optimize_at_density(double lambda, double gamma,
                                   const PropagationParams& prop, const HardwareParams& hw,
                                   const SolverOptions& opt) {
  check_target(gamma);
  if (!(lambda > 0.0)) throw std::invalid_argument("optimize_at_density: need lambda > 0");
  const DensityObjective f(lambda, gamma, prop, hw);
  double best_ee = 0.0, best_x = 0.0;
  int best_m = 0, best_k = 0;
  for (int k = 1; k <= opt.k_cap; ++k) {
    for (int m = 1; m <= opt.m_cap; ++m) {
      double x = 0.0;
      const double v = f.best_over_x(m, k, opt.inv_snr_lo, opt.inv_snr_hi,
                                     opt.golden_iters, x);
      if (v > best_ee) {
        best_ee = v;
        best_x = x;
        best_m = m;
        best_k = k;
      }
    }
  }
  if (best_m == 0) return {};
  return finish_density_point(lambda, best_m, best_k, best_x, gamma, prop, hw);
}

DensityOptimum optimize_fixed_ue_density(double mu, double gamma,
                                         const PropagationParams& prop,
                                         const HardwareParams& hw,
                                         const SolverOptions& opt) {
  check_target(gamma);
  if (!(mu > 0.0)) throw std::invalid_argument("optimize_fixed_ue_density: need mu > 0");
  double best_ee = 0.0, best_x = 0.0;
  int best_m = 0, best_k = 0;
  for (int k = 1; k <= opt.k_cap; ++k) {
    const DensityObjective f(mu / k, gamma, prop, hw);
    for (int m = 1; m <= opt.m_cap; ++m) {
      double x = 0.0;
      const double v = f.best_over_x(m, k, opt.inv_snr_lo, opt.inv_snr_hi,
                                     opt.golden_iters, x);
      if (v > best_ee) {
        best_ee = v;
        best_x = x;
        best_m = m;
        best_k = k;
      }
    }
  }
  if (best_m == 0) return {};
  return finish_density_point(mu / best_k, best_m, best_k, best_x, gamma, prop, hw);
}

DensityOptimum optimize_reference_at_ue_density(double mu, int M, int K, double gamma,
                                                const PropagationParams& prop,
                                                const HardwareParams& hw,
                                                const SolverOptions& opt) {
  check_target(gamma);
  if (!(mu > 0.0) || M < 1 || K < 1)
    throw std::invalid_argument("optimize_reference_at_ue_density: bad arguments");
  const double lambda = mu / K;
  const DensityObjective f(lambda, gamma, prop, hw);
  double x = 0.0;
  const double v = f.best_over_x(M, K, opt.inv_snr_lo, opt.inv_snr_hi,
                                 opt.golden_iters, x);
  if (!(v > 0.0)) return {};
  return finish_density_point(lambda, M, K, x, gamma, prop, hw);
}

}  // namespace eeopt

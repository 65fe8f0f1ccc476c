#pragma once

#include <vector>

#include "params.hpp"
#include "power.hpp"
#include "se_bound.hpp"

namespace eeopt {

struct SolverOptions {
  double tol = 1e-9;        // relative EE change that stops the alternation
  int max_iter = 100;       // alternation cap
  int radius = 3;           // integer refinement box half-width
  double inv_snr_lo = 1e-9; // smallest sigma^2/rho the power search considers
  double inv_snr_hi = 1e9;  // largest sigma^2/rho the power search considers
  int m_cap = 2048;         // antenna search ceiling
  int k_cap = 40;           // per-cell UE search ceiling
  int golden_iters = 96;    // log-domain golden-section iterations
};

// Pilot overhead added per extra UE, beta*K/S = slope * K, when the reuse is
// kept target-optimal at a fixed antenna-per-UE ratio cbar = M/K in the
// infinite-density regime. Throws std::domain_error when the ratio cannot
// support the target at all.
double reuse_overhead_slope(double cbar, double gamma,
                            const PropagationParams& prop, const HardwareParams& hw);

// EE-optimal real-valued UE count at fixed cbar = M/K (density limit).
double optimal_k_given_cbar(double cbar, double gamma,
                            const PropagationParams& prop, const HardwareParams& hw);

// EE-optimal real-valued antenna-per-UE ratio at fixed K (density limit).
// Falls back to the unit-reuse boundary expression when the unconstrained
// stationary point would push the pilot reuse below one; throws
// std::domain_error when no ratio is feasible.
double optimal_cbar_given_k(double K, double gamma,
                            const PropagationParams& prop, const HardwareParams& hw);

struct IterationPoint {
  int iter = 0;
  double M = 0.0;
  double K = 0.0;
  double ee = 0.0;
};

struct RealOptimum {
  double M = 0.0;
  double K = 0.0;
  double ee = 0.0;
  bool converged = false;
  std::vector<IterationPoint> trace;
};

// Coordinate ascent on (K, cbar) over the real-valued relaxation in the
// density limit. Monotone in EE; stops on relative change <= tol.
RealOptimum alternate_optimize(double M0, double K0, double gamma,
                               const PropagationParams& prop, const HardwareParams& hw,
                               double tol = 1e-9, int max_iter = 100);

struct IntegerOptimum {
  int M = 0;
  int K = 0;
  double beta = 0.0;
  double se = 0.0;  // per UE, bit/symbol
  double ee = 0.0;
};

// Best integer (M, K) near a real-valued optimum of the density-limit EE:
// exhausts a box of half-width `radius`, recentering while the argmax sits on
// the box boundary. Infeasible points are skipped, never clamped. Ties break
// toward smaller K, then smaller M.
IntegerOptimum integer_refine(double M_real, double K_real, double gamma,
                              const PropagationParams& prop, const HardwareParams& hw,
                              int radius = 3);

// Exhaustive density-limit EE maximization over an integer rectangle.
IntegerOptimum brute_force_ee_max(int M_lo, int M_hi, int K_lo, int K_hi,
                                  double gamma, const PropagationParams& prop,
                                  const HardwareParams& hw);

// Real-relaxation alternation from the fixed interior start (20, 1) followed
// by integer refinement.
struct AsymptoticOptimum {
  RealOptimum real;
  IntegerOptimum integer;
};
AsymptoticOptimum optimize_asymptotic(double gamma, const PropagationParams& prop,
                                      const HardwareParams& hw,
                                      const SolverOptions& opt = {});

struct DensityOptimum {
  DesignPoint point;      // beta, rho, density, M, K all resolved
  double inv_snr = 0.0;   // sigma^2/rho at the optimum
  double se = 0.0;        // per UE, bit/symbol
  double ee = 0.0;        // bit/J; 0 with ok == false when nothing is feasible
  bool ok = false;
};

// Joint EE maximization at a fixed finite density: exhaustive over integer
// (M, K) up to the caps, exact feasible-band bracketing plus golden section
// over the transmit power for each point.
DensityOptimum optimize_at_density(double lambda, double gamma,
                                   const PropagationParams& prop, const HardwareParams& hw,
                                   const SolverOptions& opt = {});

// Same, but at fixed UE density mu (UE/km^2): serving K UEs per cell pins the
// BS density to mu/K, which couples the cell size to the load.
DensityOptimum optimize_fixed_ue_density(double mu, double gamma,
                                         const PropagationParams& prop,
                                         const HardwareParams& hw,
                                         const SolverOptions& opt = {});

// Reference variant with (M, K) pinned: only reuse and power are optimized,
// density again mu/K.
DensityOptimum optimize_reference_at_ue_density(double mu, int M, int K, double gamma,
                                                const PropagationParams& prop,
                                                const HardwareParams& hw,
                                                const SolverOptions& opt = {});

}  // namespace eeopt

#pragma once

#include <vector>

#include "params.hpp"

namespace eeopt {

// sigma^2/rho for a point; identically zero in the infinite-density regime,
// where the received SNR grows without bound.
double inverse_snr(const DesignPoint& pt, const PropagationParams& prop);

// Average uplink SINR lower bound for MRC reception under pilot reuse beta,
// pathloss-inverting power control and hardware impairment level eps.
// Scalar core: all arguments real-valued so optimizers can relax M and K.
double sinr_lower_bound(double M, double K, double beta, double inv_snr,
                        double alpha, double impairment);
double sinr_lower_bound(const DesignPoint& pt, const PropagationParams& prop,
                        double impairment);

// Fraction of the coherence block left for payload after beta*K pilots.
double pilot_prelog(double beta, double K, double coherence_symbols);

// Per-UE spectral efficiency lower bound, bit/symbol: prelog * log2(1 + SINR).
double se_lower_bound(double M, double K, double beta, double inv_snr,
                      double alpha, double impairment, double coherence_symbols);
double se_lower_bound(const DesignPoint& pt, const PropagationParams& prop,
                      double impairment);

// SINR in the regime where both the antenna count and the interference terms
// are dominated by pilot contamination and distortion (M -> infinity at fixed
// reuse beta). Increasing in beta; its beta -> infinity limit is capped by
// the impairment floor alone.
double asymptotic_sinr(double beta, double alpha, double impairment);

// Largest SINR target that any pilot reuse satisfying beta*K <= S can reach,
// i.e. asymptotic_sinr at the whole-block overhead boundary. Targets at or
// above this value are infeasible for every (M, K).
double feasibility_limit(double coherence_symbols, double alpha, double impairment);

// Why no pilot reuse can reach a requested SINR target.
enum class BetaError {
  none = 0,
  denominator_nonpositive,     // target at/above what infinite reuse could give
  target_exceeded_at_unit_reuse,  // closed form lands below beta = 1
  overhead_exceeded,           // required reuse does not fit: beta*K > S
};

const char* to_string(BetaError e);

struct BetaResult {
  double beta = 0.0;
  BetaError error = BetaError::none;
  explicit operator bool() const { return error == BetaError::none; }
};

// Coefficients of the linear-in-1/beta form of the SINR bound: the bound
// equals the target gamma exactly when beta = B1*gamma / (M(1-eps^2)^2 - B2*gamma).
struct ReuseCoefficients {
  double b1 = 0.0;
  double b2 = 0.0;
};
ReuseCoefficients reuse_coefficients(double M, double K, double inv_snr,
                                     double alpha, double impairment);

// Smallest (hence EE-optimal) pilot reuse meeting the SINR target, with the
// exact infeasibility kind when there is none. inv_snr = 0 gives the
// infinite-density form.
BetaResult optimal_beta(double M, double K, double inv_snr, double gamma,
                        double alpha, double impairment, double coherence_symbols);

// Geometry snapshot for conditional SINR evaluation, distances in km. For
// every interfering cell, ue[i] holds one UE's distance to its own serving BS
// and to the typical UE's serving BS; ue[0] is the UE sharing the typical
// UE's pilot slot.
struct UePlacement {
  double own_bs = 0.0;
  double typical_bs = 0.0;
};

struct InterferingCell {
  double bs_x = 0.0;
  double bs_y = 0.0;  // relative to the typical UE at the origin
  std::vector<UePlacement> ue;
};

struct GeometryRealization {
  double serving_distance = 0.0;  // typical UE to its serving BS
  std::vector<InterferingCell> cells;
  int resamples = 0;  // whole-geometry retries forced by the placement rejection cap
};

// Effective SINR conditioned on one geometry draw, with the pilot-collision
// indicators averaged analytically (each interfering cell reuses the typical
// pilot with probability 1/beta). Interference sums are accumulated in
// extended precision; the terms are nonnegative, so the magnitude spread
// between near and far cells costs no accuracy.
double effective_sinr_given_geometry(const GeometryRealization& g, double M,
                                     double K, double beta, double inv_snr,
                                     double alpha, double impairment);

}  // namespace eeopt

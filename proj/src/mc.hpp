#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "params.hpp"
#include "se_bound.hpp"

namespace eeopt {

struct McEstimate {
  double mean = 0.0;
  double sem = 0.0;  // standard error of the mean
  long trials = 0;
};

// Pairwise (tree) reduction: deterministic and order-insensitive up to
// permutation of equal-size blocks, immune to the accuracy loss of a long
// running sum.
double pairwise_sum(const double* v, size_t n);
McEstimate summarize(const std::vector<double>& per_trial);

struct TrialRecord {
  long index = 0;
  double serving_distance = 0.0;
  int interferers = 0;
  int resamples = 0;
  double sinr = 0.0;
  double se = 0.0;
};

// Mean spectral efficiency over random geometries at the given operating
// point: per trial, the conditional effective SINR with pilot indicators
// averaged analytically, then (1 - beta*K/S) log2(1 + SINR). Finite density
// only. Estimates an upper bound on the true average (the closed-form bound
// must sit below mean + 2 SEM). Optional per-trial dump for offline analysis.
McEstimate mc_average_se(const DesignPoint& pt, const PropagationParams& prop,
                         double epsilon, const MonteCarloConfig& cfg,
                         std::vector<TrialRecord>* dump = nullptr);

// Interference distance-ratio moment E[sum_j (d_jjk / d_0jk)^{kappa*alpha}]
// under the radial far-field model the closed form integrates: interferer
// distances to the typical cell follow the nearest-BS-excluded PPP law and
// own-BS distances are Rayleigh conditioned to be closer. Converges to
// 2/(kappa*alpha - 2) per UE; with K > 1 the sum over a cell's UEs (kappa=1)
// converges to 2K/(alpha - 2). The far tail beyond the truncation radius is
// completed analytically.
McEstimate mc_distance_moment(double lambda, double alpha, int kappa,
                              const MonteCarloConfig& cfg, int K = 1);

// Cross moments of the same ratios over UE pairs: the distinct-(cell, UE)
// product term, converging to K*(2/(alpha-2))^2, and the same-cell product
// term, for which the closed form K/(alpha-1) is only an upper bound.
struct CrossMoments {
  McEstimate distinct_pair;
  McEstimate same_cell;
};
CrossMoments mc_cross_moment(double lambda, double alpha, int K,
                             const MonteCarloConfig& cfg);

// Channel-level validation of the conditional SINR: samples channels,
// distortion, noise and the pilot-collision indicators explicitly for a
// small fixed geometry, estimates every power term of the SINR expression,
// and assembles the empirical SINR for comparison with the closed form.
// Works in received-power units (rho = 1, serving distance folded out).
struct TermCheck {
  std::string name;
  double closed_form = 0.0;
  double estimate = 0.0;
  double sem = 0.0;  // achieved statistical error; caller judges tolerance
};

struct SinrTermReport {
  std::vector<TermCheck> terms;
  double sinr_closed_form = 0.0;
  double sinr_estimate = 0.0;
  long samples = 0;
};

SinrTermReport validate_effective_sinr_terms(const GeometryRealization& g, int M,
                                             int K, double beta, double inv_snr,
                                             double epsilon, double alpha,
                                             long samples, uint64_t seed = 0);

}  // namespace eeopt

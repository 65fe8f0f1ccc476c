/* eeopt: closed-form uplink spectral-efficiency bounds, energy-efficiency
 * optimization, and stochastic-geometry Monte Carlo validation for
 * Poisson-deployed multi-antenna cellular networks.
 *
 * All functions are thread-safe on distinct models; a model is immutable
 * while shared. Errors return a nonzero status; eeopt_last_error() gives a
 * thread-local human-readable message for the most recent failure.
 *
 * Units: distances km, densities per km^2, energies J/symbol, spectral
 * efficiency bit/symbol (= bit/s/Hz), energy efficiency bit/J.
 */
#ifndef EEOPT_H
#define EEOPT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct eeopt_model eeopt_model;

typedef enum eeopt_status {
  EEOPT_OK = 0,
  EEOPT_INFEASIBLE = 2, /* no design meets the request (e.g. SINR target too high) */
  EEOPT_INVALID = 3,    /* bad arguments or configuration */
  EEOPT_IO = 4,         /* filesystem failure */
  EEOPT_INTERNAL = 5,
} eeopt_status;

const char* eeopt_last_error(void);

/* Model lifecycle. eeopt_create() starts from the built-in defaults
 * (Table-style macro-cell parameters); the JSON variants load the config
 * sections propagation/hardware/solver/montecarlo with strict unknown-key
 * rejection. NULL return means failure (see eeopt_last_error). */
eeopt_model* eeopt_create(void);
eeopt_model* eeopt_create_from_json(const char* path);
eeopt_model* eeopt_create_from_json_text(const char* text);
void eeopt_destroy(eeopt_model* m);

/* Dotted-key parameter access, e.g. "hardware.impairment_level". */
eeopt_status eeopt_set(eeopt_model* m, const char* key, double value);
eeopt_status eeopt_get(const eeopt_model* m, const char* key, double* out);

/* Canonical resolved config as JSON; free with eeopt_free_text. */
char* eeopt_config_json(const eeopt_model* m);
void eeopt_free_text(char* text);

/* One operating point. lambda is ignored when asymptotic != 0 (the
 * infinite-density limit, where transmit power vanishes). */
typedef struct eeopt_point {
  double beta;   /* pilot reuse factor, >= 1 */
  double rho;    /* power-control coefficient, J/symbol */
  double lambda; /* BS/km^2 */
  int asymptotic;
  int m; /* antennas per BS */
  int k; /* UEs per cell */
} eeopt_point;

typedef struct eeopt_eval {
  double sinr;   /* effective-SINR lower bound */
  double prelog; /* 1 - beta*K/S */
  double se;     /* per-UE spectral efficiency, bit/symbol */
  double beta;   /* reuse actually used (resolved in target mode) */
  double ase;    /* bit/symbol/km^2; per cell in the asymptotic limit */
  double apc;    /* J/symbol/km^2; per cell in the asymptotic limit */
  double ee;     /* bit/J */
} eeopt_eval;

/* Evaluate at the point exactly as given (finite density only). */
eeopt_status eeopt_evaluate(const eeopt_model* m, const eeopt_point* pt,
                            eeopt_eval* out);

/* Evaluate with the smallest pilot reuse meeting the SINR target gamma;
 * handles both finite and asymptotic density. EEOPT_INFEASIBLE carries the
 * coherence-block feasibility limit in the error message. */
eeopt_status eeopt_evaluate_target(const eeopt_model* m, const eeopt_point* pt,
                                   double gamma, eeopt_eval* out);

/* Area power split. Units follow eeopt_eval.apc. */
typedef struct eeopt_breakdown {
  double radiated;
  double static_bs;
  double per_ue;
  double per_antenna;
  double per_antenna_ue;
  double coding;
  double area_se;
  double ee;
} eeopt_breakdown;

eeopt_status eeopt_apc(const eeopt_model* m, const eeopt_point* pt,
                       eeopt_breakdown* out);
eeopt_status eeopt_apc_target(const eeopt_model* m, const eeopt_point* pt,
                              double gamma, eeopt_breakdown* out);

/* Smallest pilot reuse achieving SINR target gamma at antenna count M, UE
 * count K, inverse SNR sigma^2/rho (0 for the asymptotic limit). */
eeopt_status eeopt_optimal_beta(const eeopt_model* m, int M, int K,
                                double inv_snr, double gamma, double* beta_out);

/* Largest achievable SINR target for the configured coherence block,
 * pathloss exponent, and impairment level. */
eeopt_status eeopt_feasibility_limit(const eeopt_model* m, double* limit_out);

/* Density-limit energy efficiency at SINR target gamma for real-valued
 * M and K (the optimizer's relaxation). */
eeopt_status eeopt_ee_asymptotic(const eeopt_model* m, double M, double K,
                                 double gamma, double* ee_out, double* beta_out,
                                 double* se_out);

typedef struct eeopt_optimum {
  double m_real; /* real-relaxation fixed point (asymptotic mode; else = m) */
  double k_real;
  int m;
  int k;
  double beta;
  double rho;     /* 0 in the asymptotic limit */
  double lambda;  /* HUGE_VAL in the asymptotic limit; mu/K in fixed-mu mode */
  double inv_snr; /* sigma^2/rho at the optimum */
  double se;      /* per UE, bit/symbol */
  double ee;      /* bit/J */
  int iterations; /* alternation steps (asymptotic mode; else 0) */
  int converged;
} eeopt_optimum;

/* Joint (beta, M, K) maximization in the infinite-density limit:
 * alternating real-valued coordinate ascent plus integer refinement. */
eeopt_status eeopt_optimize_asymptotic(const eeopt_model* m, double gamma,
                                       eeopt_optimum* out);

/* Same, also copying the alternation trace into caller arrays of capacity
 * cap; *n_out gets the full trace length (copy is truncated to cap). */
eeopt_status eeopt_optimize_asymptotic_trace(const eeopt_model* m, double gamma,
                                             double* m_trace, double* k_trace,
                                             double* ee_trace, int cap, int* n_out,
                                             eeopt_optimum* out);

/* Joint (beta, rho, M, K) maximization at a fixed finite BS density. */
eeopt_status eeopt_optimize_at_density(const eeopt_model* m, double lambda,
                                       double gamma, eeopt_optimum* out);

/* Joint maximization under a fixed UE density mu with lambda = mu/K. */
eeopt_status eeopt_optimize_fixed_ue_density(const eeopt_model* m, double mu,
                                             double gamma, eeopt_optimum* out);

/* Reference variant of the fixed-mu problem with (M, K) pinned; only reuse
 * and power are optimized. */
eeopt_status eeopt_optimize_reference(const eeopt_model* m, double mu, int M,
                                      int K, double gamma, eeopt_optimum* out);

typedef struct eeopt_mc_result {
  double mean;
  double sem;
  long trials;
} eeopt_mc_result;

/* Monte Carlo mean spectral efficiency over random network geometries at the
 * point (finite density; trials/seed from the montecarlo config section). */
eeopt_status eeopt_mc_average_se(const eeopt_model* m, const eeopt_point* pt,
                                 eeopt_mc_result* out);

/* Per-trial streaming variant; the sink returns 0 to continue, nonzero to
 * abort (aborting yields EEOPT_INTERNAL). */
typedef int (*eeopt_trial_sink)(void* ctx, long index, double serving_distance,
                                int interferers, double sinr, double se);
eeopt_status eeopt_mc_average_se_dump(const eeopt_model* m, const eeopt_point* pt,
                                      eeopt_trial_sink sink, void* ctx,
                                      eeopt_mc_result* out);

/* Radial-model MC of the interference distance-ratio moment
 * E{sum (d_own/d_typ)^(kappa*alpha)}, summed over K UE slots. */
eeopt_status eeopt_mc_distance_moment(const eeopt_model* m, double lambda,
                                      int kappa, int K, eeopt_mc_result* out);

/* Radial-model MC of the cross moments over UE pairs: distinct-cell product
 * term and same-cell product term. */
eeopt_status eeopt_mc_cross_moment(const eeopt_model* m, double lambda, int K,
                                   eeopt_mc_result* pair_out,
                                   eeopt_mc_result* same_out);

/* Channel-level validation of every term of the effective-SINR expression on
 * a fixed geometry. own/typ are row-major [cells][K] distances of each
 * interfering cell's UEs to their own BS and to the typical BS; slot 0 is the
 * pilot-sharing UE. Writes up to terms_cap rows and the full row count to
 * *terms_out; sems report the achieved statistical error (never fails for
 * being too small). */
typedef struct eeopt_term_check {
  char name[32];
  double closed_form;
  double estimate;
  double sem;
} eeopt_term_check;

eeopt_status eeopt_validate_sinr_terms(const eeopt_model* m, int M, int K,
                                       double beta, double inv_snr, int cells,
                                       const double* own, const double* typ,
                                       long samples, uint64_t seed,
                                       eeopt_term_check* terms, int terms_cap,
                                       int* terms_out, double* sinr_closed_form,
                                       double* sinr_estimate);

#ifdef __cplusplus
}
#endif

#endif /* EEOPT_H */

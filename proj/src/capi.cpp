#include "eeopt.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "config.hpp"
#include "mc.hpp"
#include "optimizer.hpp"
#include "params.hpp"
#include "power.hpp"
#include "se_bound.hpp"

struct eeopt_model {
  eeopt::ModelConfig cfg;
};

namespace {

thread_local std::string t_last_error;

eeopt_status set_err(eeopt_status s, const std::string& msg) {
  t_last_error = msg;
  return s;
}

template <typename F>
eeopt_status guarded(F&& body) {
  try {
    return body();
  } catch (const eeopt::IoError& e) {
    return set_err(EEOPT_IO, e.what());
  } catch (const eeopt::ConfigError& e) {
    return set_err(EEOPT_INVALID, e.what());
  } catch (const std::invalid_argument& e) {
    return set_err(EEOPT_INVALID, e.what());
  } catch (const std::domain_error& e) {
    return set_err(EEOPT_INFEASIBLE, e.what());
  } catch (const std::bad_alloc&) {
    return set_err(EEOPT_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_err(EEOPT_INTERNAL, e.what());
  } catch (...) {
    return set_err(EEOPT_INTERNAL, "unknown error");
  }
}

eeopt::DesignPoint to_design_point(const eeopt_point& p) {
  eeopt::DesignPoint pt;
  pt.beta = p.beta;
  pt.rho = p.rho;
  pt.density = p.asymptotic ? eeopt::BsDensity::asymptotic()
                            : eeopt::BsDensity::finite(p.lambda);
  pt.M = p.m;
  pt.K = p.k;
  return pt;
}

std::string infeasible_msg(const eeopt_model* m, eeopt::BetaError err) {
  const double lim = eeopt::feasibility_limit(m->cfg.propagation.coherence_symbols,
                                              m->cfg.propagation.alpha,
                                              m->cfg.hardware.impairment_level);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", lim);
  return std::string("target infeasible: ") + eeopt::to_string(err) +
         " (coherence-block feasibility limit gamma < " + buf + ")";
}

void fill_eval_from_target(const eeopt_model* m, const eeopt::TargetEe& r,
                           double gamma, double K, eeopt_eval* out) {
  out->sinr = gamma;
  out->prelog = 1.0 - r.beta * K / m->cfg.propagation.coherence_symbols;
  out->se = r.se;
  out->beta = r.beta;
  out->ase = r.breakdown.area_se;
  out->apc = r.breakdown.total();
  out->ee = r.ee;
}

void fill_breakdown(const eeopt::EEBreakdown& b, eeopt_breakdown* out) {
  out->radiated = b.radiated;
  out->static_bs = b.static_bs;
  out->per_ue = b.per_ue;
  out->per_antenna = b.per_antenna;
  out->per_antenna_ue = b.per_antenna_ue;
  out->coding = b.coding;
  out->area_se = b.area_se;
  out->ee = b.ee;
}

void fill_optimum_from_density(const eeopt::DensityOptimum& d, eeopt_optimum* out) {
  out->m_real = d.point.M;
  out->k_real = d.point.K;
  out->m = d.point.M;
  out->k = d.point.K;
  out->beta = d.point.beta;
  out->rho = d.point.rho;
  out->lambda = d.point.density.per_km2();
  out->inv_snr = d.inv_snr;
  out->se = d.se;
  out->ee = d.ee;
  out->iterations = 0;
  out->converged = d.ok ? 1 : 0;
}

eeopt_status require_args(bool ok) {
  if (!ok) return set_err(EEOPT_INVALID, "null argument");
  return EEOPT_OK;
}

}  // namespace

extern "C" {

const char* eeopt_last_error(void) { return t_last_error.c_str(); }

eeopt_model* eeopt_create(void) {
  try {
    return new eeopt_model{};
  } catch (...) {
    set_err(EEOPT_INTERNAL, "out of memory");
    return nullptr;
  }
}

eeopt_model* eeopt_create_from_json(const char* path) {
  if (!path) {
    set_err(EEOPT_INVALID, "null argument");
    return nullptr;
  }
  try {
    return new eeopt_model{eeopt::config_from_file(path)};
  } catch (const eeopt::IoError& e) {
    set_err(EEOPT_IO, e.what());
  } catch (const std::exception& e) {
    set_err(EEOPT_INVALID, e.what());
  }
  return nullptr;
}

eeopt_model* eeopt_create_from_json_text(const char* text) {
  if (!text) {
    set_err(EEOPT_INVALID, "null argument");
    return nullptr;
  }
  try {
    return new eeopt_model{eeopt::config_from_json_text(text)};
  } catch (const std::exception& e) {
    set_err(EEOPT_INVALID, e.what());
  }
  return nullptr;
}

void eeopt_destroy(eeopt_model* m) { delete m; }

eeopt_status eeopt_set(eeopt_model* m, const char* key, double value) {
  if (eeopt_status s = require_args(m && key)) return s;
  return guarded([&] {
    eeopt::set_param(m->cfg, key, value);
    return EEOPT_OK;
  });
}

eeopt_status eeopt_get(const eeopt_model* m, const char* key, double* out) {
  if (eeopt_status s = require_args(m && key && out)) return s;
  return guarded([&] {
    *out = eeopt::get_param(m->cfg, key);
    return EEOPT_OK;
  });
}

char* eeopt_config_json(const eeopt_model* m) {
  if (!m) {
    set_err(EEOPT_INVALID, "null argument");
    return nullptr;
  }
  try {
    const std::string s = eeopt::config_to_json(m->cfg);
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) {
      set_err(EEOPT_INTERNAL, "out of memory");
      return nullptr;
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
  } catch (const std::exception& e) {
    set_err(EEOPT_INTERNAL, e.what());
    return nullptr;
  }
}

void eeopt_free_text(char* text) { std::free(text); }

eeopt_status eeopt_evaluate(const eeopt_model* m, const eeopt_point* pt,
                            eeopt_eval* out) {
  if (eeopt_status s = require_args(m && pt && out)) return s;
  return guarded([&] {
    const eeopt::DesignPoint p = to_design_point(*pt);
    if (p.density.is_asymptotic())
      return set_err(EEOPT_INVALID,
                     "point evaluation needs a finite density; use the target "
                     "variant for the asymptotic limit");
    eeopt::require_valid(p, m->cfg.propagation, m->cfg.hardware);
    const double eps = m->cfg.hardware.impairment_level;
    out->sinr = eeopt::sinr_lower_bound(p, m->cfg.propagation, eps);
    out->prelog = eeopt::pilot_prelog(p.beta, p.K, m->cfg.propagation.coherence_symbols);
    out->se = out->prelog * std::log2(1.0 + out->sinr);
    out->beta = p.beta;
    const eeopt::EEBreakdown b = eeopt::apc(p, m->cfg.propagation, m->cfg.hardware);
    out->ase = b.area_se;
    out->apc = b.total();
    out->ee = b.ee;
    return EEOPT_OK;
  });
}

eeopt_status eeopt_evaluate_target(const eeopt_model* m, const eeopt_point* pt,
                                   double gamma, eeopt_eval* out) {
  if (eeopt_status s = require_args(m && pt && out)) return s;
  return guarded([&] {
    const eeopt::DesignPoint p = to_design_point(*pt);
    const eeopt::TargetEe r =
        p.density.is_asymptotic()
            ? eeopt::ee_asymptotic(p.M, p.K, gamma, m->cfg.propagation,
                                   m->cfg.hardware)
            : eeopt::ee_at_target(p, gamma, m->cfg.propagation, m->cfg.hardware);
    if (r.error != eeopt::BetaError::none)
      return set_err(EEOPT_INFEASIBLE, infeasible_msg(m, r.error));
    fill_eval_from_target(m, r, gamma, p.K, out);
    return EEOPT_OK;
  });
}

eeopt_status eeopt_apc(const eeopt_model* m, const eeopt_point* pt,
                       eeopt_breakdown* out) {
  if (eeopt_status s = require_args(m && pt && out)) return s;
  return guarded([&] {
    const eeopt::DesignPoint p = to_design_point(*pt);
    if (p.density.is_asymptotic())
      return set_err(EEOPT_INVALID,
                     "area power at a point needs a finite density; use the "
                     "target variant for the asymptotic limit");
    eeopt::require_valid(p, m->cfg.propagation, m->cfg.hardware);
    fill_breakdown(eeopt::apc(p, m->cfg.propagation, m->cfg.hardware), out);
    return EEOPT_OK;
  });
}

eeopt_status eeopt_apc_target(const eeopt_model* m, const eeopt_point* pt,
                              double gamma, eeopt_breakdown* out) {
  if (eeopt_status s = require_args(m && pt && out)) return s;
  return guarded([&] {
    const eeopt::DesignPoint p = to_design_point(*pt);
    const eeopt::TargetEe r =
        p.density.is_asymptotic()
            ? eeopt::ee_asymptotic(p.M, p.K, gamma, m->cfg.propagation,
                                   m->cfg.hardware)
            : eeopt::ee_at_target(p, gamma, m->cfg.propagation, m->cfg.hardware);
    if (r.error != eeopt::BetaError::none)
      return set_err(EEOPT_INFEASIBLE, infeasible_msg(m, r.error));
    fill_breakdown(r.breakdown, out);
    return EEOPT_OK;
  });
}

eeopt_status eeopt_optimal_beta(const eeopt_model* m, int M, int K,
                                double inv_snr, double gamma, double* beta_out) {
  if (eeopt_status s = require_args(m && beta_out)) return s;
  return guarded([&] {
    const eeopt::BetaResult r = eeopt::optimal_beta(
        M, K, inv_snr, gamma, m->cfg.propagation.alpha,
        m->cfg.hardware.impairment_level, m->cfg.propagation.coherence_symbols);
    if (r.error != eeopt::BetaError::none)
      return set_err(EEOPT_INFEASIBLE, infeasible_msg(m, r.error));
    *beta_out = r.beta;
    return EEOPT_OK;
  });
}

eeopt_status eeopt_feasibility_limit(const eeopt_model* m, double* limit_out) {
  if (eeopt_status s = require_args(m && limit_out)) return s;
  return guarded([&] {
    *limit_out = eeopt::feasibility_limit(m->cfg.propagation.coherence_symbols,
                                          m->cfg.propagation.alpha,
                                          m->cfg.hardware.impairment_level);
    return EEOPT_OK;
  });
}

eeopt_status eeopt_ee_asymptotic(const eeopt_model* m, double M, double K,
                                 double gamma, double* ee_out, double* beta_out,
                                 double* se_out) {
  if (eeopt_status s = require_args(m && ee_out)) return s;
  return guarded([&] {
    const eeopt::TargetEe r =
        eeopt::ee_asymptotic(M, K, gamma, m->cfg.propagation, m->cfg.hardware);
    if (r.error != eeopt::BetaError::none)
      return set_err(EEOPT_INFEASIBLE, infeasible_msg(m, r.error));
    *ee_out = r.ee;
    if (beta_out) *beta_out = r.beta;
    if (se_out) *se_out = r.se;
    return EEOPT_OK;
  });
}

eeopt_status eeopt_optimize_asymptotic(const eeopt_model* m, double gamma,
                                       eeopt_optimum* out) {
  return eeopt_optimize_asymptotic_trace(m, gamma, nullptr, nullptr, nullptr, 0,
                                         nullptr, out);
}

eeopt_status eeopt_optimize_asymptotic_trace(const eeopt_model* m, double gamma,
                                             double* m_trace, double* k_trace,
                                             double* ee_trace, int cap, int* n_out,
                                             eeopt_optimum* out) {
  if (eeopt_status s = require_args(m && out)) return s;
  return guarded([&] {
    const eeopt::AsymptoticOptimum r = eeopt::optimize_asymptotic(
        gamma, m->cfg.propagation, m->cfg.hardware, m->cfg.solver);
    out->m_real = r.real.M;
    out->k_real = r.real.K;
    out->m = r.integer.M;
    out->k = r.integer.K;
    out->beta = r.integer.beta;
    out->rho = 0.0;
    out->lambda = HUGE_VAL;
    out->inv_snr = 0.0;
    out->se = r.integer.se;
    out->ee = r.integer.ee;
    out->iterations = static_cast<int>(r.real.trace.size());
    out->converged = r.real.converged ? 1 : 0;
    const int n = static_cast<int>(r.real.trace.size());
    if (n_out) *n_out = n;
    for (int i = 0; i < n && i < cap; ++i) {
      if (m_trace) m_trace[i] = r.real.trace[static_cast<size_t>(i)].M;
      if (k_trace) k_trace[i] = r.real.trace[static_cast<size_t>(i)].K;
      if (ee_trace) ee_trace[i] = r.real.trace[static_cast<size_t>(i)].ee;
    }
    return EEOPT_OK;
  });
}

eeopt_status eeopt_optimize_at_density(const eeopt_model* m, double lambda,
                                       double gamma, eeopt_optimum* out) {
  if (eeopt_status s = require_args(m && out)) return s;
  return guarded([&] {
    const eeopt::DensityOptimum r = eeopt::optimize_at_density(
        lambda, gamma, m->cfg.propagation, m->cfg.hardware, m->cfg.solver);
    if (!r.ok)
      return set_err(EEOPT_INFEASIBLE,
                     infeasible_msg(m, eeopt::BetaError::target_exceeded_at_unit_reuse));
    fill_optimum_from_density(r, out);
    return EEOPT_OK;
  });
}

eeopt_status eeopt_optimize_fixed_ue_density(const eeopt_model* m, double mu,
                                             double gamma, eeopt_optimum* out) {
  if (eeopt_status s = require_args(m && out)) return s;
  return guarded([&] {
    const eeopt::DensityOptimum r = eeopt::optimize_fixed_ue_density(
        mu, gamma, m->cfg.propagation, m->cfg.hardware, m->cfg.solver);
    if (!r.ok)
      return set_err(EEOPT_INFEASIBLE,
                     infeasible_msg(m, eeopt::BetaError::target_exceeded_at_unit_reuse));
    fill_optimum_from_density(r, out);
    return EEOPT_OK;
  });
}

eeopt_status eeopt_optimize_reference(const eeopt_model* m, double mu, int M,
                                      int K, double gamma, eeopt_optimum* out) {
  if (eeopt_status s = require_args(m && out)) return s;
  return guarded([&] {
    const eeopt::DensityOptimum r = eeopt::optimize_reference_at_ue_density(
        mu, M, K, gamma, m->cfg.propagation, m->cfg.hardware, m->cfg.solver);
    if (!r.ok)
      return set_err(EEOPT_INFEASIBLE,
                     infeasible_msg(m, eeopt::BetaError::target_exceeded_at_unit_reuse));
    fill_optimum_from_density(r, out);
    return EEOPT_OK;
  });
}

eeopt_status eeopt_mc_average_se(const eeopt_model* m, const eeopt_point* pt,
                                 eeopt_mc_result* out) {
  return eeopt_mc_average_se_dump(m, pt, nullptr, nullptr, out);
}

eeopt_status eeopt_mc_average_se_dump(const eeopt_model* m, const eeopt_point* pt,
                                      eeopt_trial_sink sink, void* ctx,
                                      eeopt_mc_result* out) {
  if (eeopt_status s = require_args(m && pt && out)) return s;
  return guarded([&] {
    const eeopt::DesignPoint p = to_design_point(*pt);
    std::vector<eeopt::TrialRecord> dump;
    const eeopt::McEstimate r = eeopt::mc_average_se(
        p, m->cfg.propagation, m->cfg.hardware.impairment_level, m->cfg.montecarlo,
        sink ? &dump : nullptr);
    out->mean = r.mean;
    out->sem = r.sem;
    out->trials = r.trials;
    if (sink) {
      for (const auto& rec : dump) {
        if (sink(ctx, rec.index, rec.serving_distance, rec.interferers, rec.sinr,
                 rec.se) != 0)
          return set_err(EEOPT_INTERNAL, "trial sink aborted");
      }
    }
    return EEOPT_OK;
  });
}

eeopt_status eeopt_mc_distance_moment(const eeopt_model* m, double lambda,
                                      int kappa, int K, eeopt_mc_result* out) {
  if (eeopt_status s = require_args(m && out)) return s;
  return guarded([&] {
    const eeopt::McEstimate r = eeopt::mc_distance_moment(
        lambda, m->cfg.propagation.alpha, kappa, m->cfg.montecarlo, K);
    out->mean = r.mean;
    out->sem = r.sem;
    out->trials = r.trials;
    return EEOPT_OK;
  });
}

eeopt_status eeopt_mc_cross_moment(const eeopt_model* m, double lambda, int K,
                                   eeopt_mc_result* pair_out,
                                   eeopt_mc_result* same_out) {
  if (eeopt_status s = require_args(m && pair_out && same_out)) return s;
  return guarded([&] {
    const eeopt::CrossMoments r = eeopt::mc_cross_moment(
        lambda, m->cfg.propagation.alpha, K, m->cfg.montecarlo);
    pair_out->mean = r.distinct_pair.mean;
    pair_out->sem = r.distinct_pair.sem;
    pair_out->trials = r.distinct_pair.trials;
    same_out->mean = r.same_cell.mean;
    same_out->sem = r.same_cell.sem;
    same_out->trials = r.same_cell.trials;
    return EEOPT_OK;
  });
}

eeopt_status eeopt_validate_sinr_terms(const eeopt_model* m, int M, int K,
                                       double beta, double inv_snr, int cells,
                                       const double* own, const double* typ,
                                       long samples, uint64_t seed,
                                       eeopt_term_check* terms, int terms_cap,
                                       int* terms_out, double* sinr_closed_form,
                                       double* sinr_estimate) {
  if (eeopt_status s = require_args(m && (cells == 0 || (own && typ)))) return s;
  return guarded([&] {
    if (cells < 0) return set_err(EEOPT_INVALID, "cells must be nonnegative");
    eeopt::GeometryRealization g;
    g.serving_distance = 1.0;
    g.cells.resize(static_cast<size_t>(cells));
    for (int j = 0; j < cells; ++j) {
      auto& cell = g.cells[static_cast<size_t>(j)];
      cell.ue.resize(static_cast<size_t>(K));
      for (int i = 0; i < K; ++i) {
        const double o = own[j * K + i];
        const double t = typ[j * K + i];
        if (!(o > 0.0) || !(t > 0.0))
          return set_err(EEOPT_INVALID, "geometry distances must be positive");
        cell.ue[static_cast<size_t>(i)] = {o, t};
      }
      cell.bs_x = cell.ue[0].typical_bs;
      cell.bs_y = 0.0;
    }
    const eeopt::SinrTermReport rep = eeopt::validate_effective_sinr_terms(
        g, M, K, beta, inv_snr, m->cfg.hardware.impairment_level,
        m->cfg.propagation.alpha, samples, seed);
    const int n = static_cast<int>(rep.terms.size());
    if (terms_out) *terms_out = n;
    for (int i = 0; terms && i < n && i < terms_cap; ++i) {
      const auto& t = rep.terms[static_cast<size_t>(i)];
      std::snprintf(terms[i].name, sizeof terms[i].name, "%s", t.name.c_str());
      terms[i].closed_form = t.closed_form;
      terms[i].estimate = t.estimate;
      terms[i].sem = t.sem;
    }
    if (sinr_closed_form) *sinr_closed_form = rep.sinr_closed_form;
    if (sinr_estimate) *sinr_estimate = rep.sinr_estimate;
    return EEOPT_OK;
  });
}

}  // extern "C"

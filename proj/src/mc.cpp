#include "mc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace eeopt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtHalf = 0.70710678118654752440;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

double pairwise_sum(const double* v, size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

McEstimate summarize(const std::vector<double>& per_trial) {
  McEstimate e;
  e.trials = static_cast<long>(per_trial.size());
  if (per_trial.empty()) return e;
  e.mean = pairwise_sum(per_trial.data(), per_trial.size()) /
           static_cast<double>(per_trial.size());
  if (per_trial.size() < 2) return e;
  std::vector<double> dev2(per_trial.size());
  for (size_t i = 0; i < per_trial.size(); ++i) {
    const double d = per_trial[i] - e.mean;
    dev2[i] = d * d;
  }
  const double var = pairwise_sum(dev2.data(), dev2.size()) /
                     static_cast<double>(per_trial.size() - 1);
  e.sem = std::sqrt(var / static_cast<double>(per_trial.size()));
  return e;
}

McEstimate mc_average_se(const DesignPoint& pt, const PropagationParams& prop,
                         double epsilon, const MonteCarloConfig& cfg,
                         std::vector<TrialRecord>* dump) {
  if (pt.density.is_asymptotic()) fail("mc_average_se: needs a finite BS density");
  if (!(prop.alpha > 2.0)) fail("mc_average_se: alpha must exceed 2");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) fail("mc_average_se: epsilon in [0, 1)");
  if (pt.M < 1 || pt.K < 1) fail("mc_average_se: M and K must be >= 1");
  if (!(pt.beta >= 1.0) || pt.beta * pt.K > prop.coherence_symbols)
    fail("mc_average_se: pilot reuse outside [1, S/K]");
  if (!(pt.rho > 0.0)) fail("mc_average_se: rho must be positive");
  if (cfg.trials < 1) fail("mc_average_se: trials must be >= 1");

  const double x = inverse_snr(pt, prop);
  const double prelog = pilot_prelog(pt.beta, pt.K, prop.coherence_symbols);
  const double lambda = pt.density.per_km2();

  GeometrySampler sampler(lambda, pt.K, cfg);
  GeometryRealization geo;
  std::vector<double> se(static_cast<size_t>(cfg.trials));
  if (dump) {
    dump->clear();
    dump->reserve(static_cast<size_t>(cfg.trials));
  }
  for (long t = 0; t < cfg.trials; ++t) {
    Philox rng(cfg.seed, static_cast<uint64_t>(t));
    sampler.sample(rng, geo);
    const double sinr = effective_sinr_given_geometry(geo, pt.M, pt.K, pt.beta, x,
                                                      prop.alpha, epsilon);
    se[static_cast<size_t>(t)] = prelog * std::log2(1.0 + sinr);
    if (dump) {
      TrialRecord rec;
      rec.index = t;
      rec.serving_distance = geo.serving_distance;
      rec.interferers = static_cast<int>(geo.cells.size());
      rec.resamples = geo.resamples;
      rec.sinr = sinr;
      rec.se = se[static_cast<size_t>(t)];
      dump->push_back(rec);
    }
  }
  return summarize(se);
}

namespace {

// Sampling core for the radial interference model: interfering-UE distances
// x to the typical BS form a PPP of intensity 2*pi*lambda*x*F(x) with
// F(x) = 1 - exp(-pi*lambda*x^2) (the chance the UE's own BS is nearer than
// the typical one), truncated at r2max = count/(pi*lambda); the own-BS
// distance given x is Rayleigh(1/sqrt(2*pi*lambda)) conditioned below x.
// Moments are taken through logs so a UE costs three transcendental calls.
struct RadialModel {
  double lambda;
  double r2max;
  double sig2;
  std::poisson_distribution<int> pois;
  std::vector<double> x2;   // kept typical-BS distances^2
  std::vector<double> fx;   // F at each kept distance
  std::vector<double> xka;  // x^ka per kept cell for the exponent in use
  double dscale = 0.0;      // (2 sig2)^(ka/2), so d^ka = dscale*exp(ka/2*log(-L))
  double hka = 0.0;

  RadialModel(double lam, double expected_count)
      : lambda(lam),
        r2max(expected_count / (kPi * lam)),
        sig2(1.0 / (2.0 * kPi * lam)),
        pois(expected_count) {}

  void set_exponent(double ka) {
    hka = 0.5 * ka;
    dscale = std::pow(2.0 * sig2, hka);
  }

  // E{sum over cells beyond r2max of (d/x)^ka} = E{d^ka}*2*pi*lambda*
  // r2max^((2-ka)/2)/(ka-2); the caller supplies the d^ka moment estimate.
  double tail_scale(double ka) const {
    return 2.0 * kPi * lambda * std::pow(r2max, 0.5 * (2.0 - ka)) / (ka - 2.0);
  }

  void draw_cells(Philox& rng) {
    const int n = pois(rng);
    x2.clear();
    fx.clear();
    for (int i = 0; i < n; ++i) {
      const double c = r2max * rng.uniform();
      const double keep = -std::expm1(-kPi * lambda * c);
      if (rng.uniform() < keep) {
        x2.push_back(c);
        fx.push_back(keep);
      }
    }
    xka.resize(x2.size());
    for (size_t c = 0; c < x2.size(); ++c) xka[c] = std::pow(x2[c], hka);
  }

  // One UE of cell c: returns d^ka with (d/x)^ka = d^ka / xka[c].
  double draw_da(Philox& rng, size_t c) const {
    const double el = std::log1p(-rng.uniform() * fx[c]);  // log of 1 - U*F < 0
    return dscale * std::exp(hka * std::log(-el));
  }
};

}  // namespace

McEstimate mc_distance_moment(double lambda, double alpha, int kappa,
                              const MonteCarloConfig& cfg, int K) {
  if (!(lambda > 0.0)) fail("mc_distance_moment: lambda must be positive");
  if (kappa < 1) fail("mc_distance_moment: kappa must be >= 1");
  if (!(alpha > 2.0)) fail("mc_distance_moment: alpha must exceed 2");
  if (K < 1) fail("mc_distance_moment: K must be >= 1");
  if (cfg.trials < 1) fail("mc_distance_moment: trials must be >= 1");
  if (cfg.max_interferers < 1) fail("mc_distance_moment: max_interferers must be >= 1");

  const double ka = kappa * alpha;  // moment exponent; tail integral needs ka > 2
  // Unconditional Rayleigh moment E{d^ka}, the fallback m-hat when a trial
  // keeps no cells (vanishing probability at the default truncation count).
  const double rayleigh_moment =
      std::tgamma(0.5 * ka + 1.0) / std::pow(kPi * lambda, 0.5 * ka);

  RadialModel rm(lambda, static_cast<double>(cfg.max_interferers));
  rm.set_exponent(ka);
  const double tail_scale = rm.tail_scale(ka);
  std::vector<double> vals(static_cast<size_t>(cfg.trials));
  for (long t = 0; t < cfg.trials; ++t) {
    Philox rng(cfg.seed, static_cast<uint64_t>(t));
    rm.draw_cells(rng);
    const size_t n = rm.x2.size();
    double total = 0.0;
    for (int s = 0; s < K; ++s) {
      double sum_ra = 0.0;
      double sum_da = 0.0;
      for (size_t c = 0; c < n; ++c) {
        const double da = rm.draw_da(rng, c);
        sum_da += da;
        sum_ra += da / rm.xka[c];
      }
      const double mhat = n ? sum_da / static_cast<double>(n) : rayleigh_moment;
      total += sum_ra + mhat * tail_scale;
    }
    vals[static_cast<size_t>(t)] = total;
  }
  return summarize(vals);
}

CrossMoments mc_cross_moment(double lambda, double alpha, int K,
                             const MonteCarloConfig& cfg) {
  if (!(lambda > 0.0)) fail("mc_cross_moment: lambda must be positive");
  if (!(alpha > 2.0)) fail("mc_cross_moment: alpha must exceed 2");
  if (K < 1) fail("mc_cross_moment: K must be >= 1");
  if (cfg.trials < 1) fail("mc_cross_moment: trials must be >= 1");
  if (cfg.max_interferers < 1) fail("mc_cross_moment: max_interferers must be >= 1");

  const double ray1 = std::tgamma(0.5 * alpha + 1.0) / std::pow(kPi * lambda, 0.5 * alpha);
  const double ray2 = std::tgamma(alpha + 1.0) / std::pow(kPi * lambda, alpha);

  RadialModel rm(lambda, static_cast<double>(cfg.max_interferers));
  rm.set_exponent(alpha);
  const double tail_scale1 = rm.tail_scale(alpha);
  const double tail_scale2 = rm.tail_scale(2.0 * alpha);
  std::vector<double> ra0;
  std::vector<double> dp(static_cast<size_t>(cfg.trials));
  std::vector<double> sc(static_cast<size_t>(cfg.trials));
  for (long t = 0; t < cfg.trials; ++t) {
    Philox rng(cfg.seed, static_cast<uint64_t>(t));
    rm.draw_cells(rng);
    const size_t n = rm.x2.size();

    // Pilot slot first: keep its per-cell ratios for the same-cell products.
    ra0.assign(n, 0.0);
    double sum_ra0 = 0.0, sum_da0 = 0.0, sum_da0_sq = 0.0, samecell = 0.0;
    for (size_t c = 0; c < n; ++c) {
      const double da = rm.draw_da(rng, c);
      const double ra = da / rm.xka[c];
      ra0[c] = ra;
      sum_ra0 += ra;
      sum_da0 += da;
      sum_da0_sq += da * da;  // d^(2 alpha), for the doubled-exponent tail
      samecell += ra * ra;
    }
    const double mhat1_0 = n ? sum_da0 / static_cast<double>(n) : ray1;
    const double mhat2_0 = n ? sum_da0_sq / static_cast<double>(n) : ray2;
    const double s0 = sum_ra0 + mhat1_0 * tail_scale1;
    double ssum = s0;
    for (int s = 1; s < K; ++s) {
      double sum_ra = 0.0, sum_da = 0.0;
      for (size_t c = 0; c < n; ++c) {
        const double da = rm.draw_da(rng, c);
        const double ra = da / rm.xka[c];
        sum_ra += ra;
        sum_da += da;
        samecell += ra * ra0[c];
      }
      const double mhat = n ? sum_da / static_cast<double>(n) : ray1;
      ssum += sum_ra + mhat * tail_scale1;
    }
    // Cross-cell products of independent slots; subtracting the same-cell
    // block leaves only pairs in distinct cells. Far-tail cross terms are
    // negligible at the default truncation count.
    dp[static_cast<size_t>(t)] = ssum * s0 - samecell;
    sc[static_cast<size_t>(t)] = samecell + mhat2_0 * tail_scale2;
  }
  CrossMoments out;
  out.distinct_pair = summarize(dp);
  out.same_cell = summarize(sc);
  return out;
}

namespace {

using cplx = std::complex<double>;

cplx draw_cn(Philox& rng) {
  double a, b;
  rng.normal_pair(a, b);
  return cplx(a * kSqrtHalf, b * kSqrtHalf);
}

void draw_cn_vector(Philox& rng, std::vector<cplx>& v) {
  for (auto& z : v) z = draw_cn(rng);
}

cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s(0.0, 0.0);
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

struct Accum {
  long double sum = 0.0L;
  long double sumsq = 0.0L;
  void add(double v) {
    sum += v;
    sumsq += static_cast<long double>(v) * v;
  }
  double mean(long n) const { return static_cast<double>(sum / n); }
  double sem(long n) const {
    if (n < 2) return 0.0;
    const long double m = sum / n;
    const long double var = (sumsq - static_cast<long double>(n) * m * m) / (n - 1);
    return std::sqrt(std::max(0.0, static_cast<double>(var / n)));
  }
};

}  // namespace

SinrTermReport validate_effective_sinr_terms(const GeometryRealization& g, int M,
                                             int K, double beta, double inv_snr,
                                             double epsilon, double alpha,
                                             long samples, uint64_t seed) {
  if (M < 1 || K < 1) fail("validate_effective_sinr_terms: M and K must be >= 1");
  if (!(beta >= 1.0)) fail("validate_effective_sinr_terms: beta must be >= 1");
  if (!(inv_snr >= 0.0)) fail("validate_effective_sinr_terms: inv_snr must be >= 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    fail("validate_effective_sinr_terms: epsilon in [0, 1)");
  if (!(alpha > 2.0)) fail("validate_effective_sinr_terms: alpha must exceed 2");
  if (samples < 2) fail("validate_effective_sinr_terms: samples must be >= 2");
  for (const auto& cell : g.cells)
    if (static_cast<int>(cell.ue.size()) != K)
      fail("validate_effective_sinr_terms: every cell needs exactly K UEs");

  const size_t L = g.cells.size();
  const double e2 = epsilon * epsilon;
  const double x = inv_snr;
  const double amp = std::sqrt(1.0 - e2);

  // Power ratios r_ji = (d_jji / d_0ji)^alpha; slot 0 shares the pilot.
  std::vector<std::vector<double>> r(L, std::vector<double>(K));
  std::vector<double> rk(L), rk_sqrt(L);
  double rk_sum = 0.0, c2 = 0.0, a_all = 0.0;
  for (size_t j = 0; j < L; ++j) {
    for (int i = 0; i < K; ++i) {
      const auto& ue = g.cells[j].ue[static_cast<size_t>(i)];
      r[j][static_cast<size_t>(i)] = std::pow(ue.own_bs / ue.typical_bs, alpha);
      a_all += r[j][static_cast<size_t>(i)];
    }
    rk[j] = r[j][0];
    rk_sqrt[j] = std::sqrt(rk[j]);
    rk_sum += rk[j];
    c2 += rk[j] * rk[j];
  }
  const double etau = 1.0 + rk_sum / beta + x;

  // Per-sample probes. Units: received powers relative to rho at the typical
  // BS, so the serving channel has unit per-antenna variance and cell j slot
  // i arrives with variance r_ji.
  const size_t m = static_cast<size_t>(M);
  std::vector<cplx> g00(m), y(m), v(m), probe(m);
  std::vector<std::vector<cplx>> gct(L, std::vector<cplx>(m));
  std::vector<char> chi(L);
  const double sx = std::sqrt(x);

  cplx evh_sum(0.0, 0.0);
  Accum self_raw, noise, intra;
  std::vector<Accum> nc(L * static_cast<size_t>(K > 1 ? K - 1 : 0)), ct(L);
  std::vector<cplx> coh_sum(L, cplx(0.0, 0.0));
  std::vector<long double> coh_sq(L, 0.0L);
  std::vector<long> coh_n(L, 0);

  for (long s = 0; s < samples; ++s) {
    Philox rng(seed, static_cast<uint64_t>(s));
    draw_cn_vector(rng, g00);
    const cplx e0 = epsilon * draw_cn(rng);
    for (size_t i = 0; i < m; ++i) y[i] = (amp + e0) * g00[i];
    for (size_t j = 0; j < L; ++j) {
      draw_cn_vector(rng, gct[j]);
      const cplx ej = epsilon * draw_cn(rng);
      chi[j] = rng.uniform() < 1.0 / beta;
      if (chi[j]) {
        const cplx w = (amp + ej) * rk_sqrt[j];
        for (size_t i = 0; i < m; ++i) y[i] += w * gct[j][i];
      }
    }
    for (size_t i = 0; i < m; ++i) y[i] += sx * draw_cn(rng);

    // MMSE estimate hhat = (amp / tau) y with the realized tau, combined with
    // v = tau / sqrt((1-e2) M) hhat: the realized tau cancels, v = y / sqrt(M).
    const double vscale = amp / std::sqrt((1.0 - e2) * static_cast<double>(M));
    for (size_t i = 0; i < m; ++i) v[i] = vscale * y[i];

    const cplx vh = inner(v, g00);
    evh_sum += vh;
    self_raw.add(std::norm(vh));

    draw_cn_vector(rng, probe);  // fresh data-phase noise
    noise.add(x * std::norm(inner(v, probe)));

    for (int i = 1; i < K; ++i) {
      draw_cn_vector(rng, probe);
      intra.add(std::norm(inner(v, probe)));
    }
    for (size_t j = 0; j < L; ++j) {
      for (int i = 1; i < K; ++i) {
        draw_cn_vector(rng, probe);
        nc[j * static_cast<size_t>(K - 1) + static_cast<size_t>(i - 1)].add(
            r[j][static_cast<size_t>(i)] * std::norm(inner(v, probe)));
      }
      const cplx vg = inner(v, gct[j]);
      ct[j].add(rk[j] * std::norm(vg));
      if (chi[j]) {
        coh_sum[j] += vg;
        coh_sq[j] += static_cast<long double>(std::norm(vg));
        ++coh_n[j];
      }
    }
  }

  SinrTermReport rep;
  rep.samples = samples;
  const double n = static_cast<double>(samples);

  const cplx evh(static_cast<double>(evh_sum.real() / n),
                 static_cast<double>(evh_sum.imag() / n));
  const double evh2 = std::norm(evh);
  const double e_vh2 = self_raw.mean(samples);
  // |mean|^2 and the centered second moment are nonlinear in the accumulators;
  // their errors come from the delta method with the complex scatter treated
  // as isotropic.
  const double sem_vh = std::sqrt(std::max(0.0, e_vh2 - evh2) / (2.0 * n));

  TermCheck desired;
  desired.name = "desired";
  desired.closed_form = (1.0 - e2) * static_cast<double>(M);
  desired.estimate = (1.0 - e2) * evh2;
  desired.sem = (1.0 - e2) * 2.0 * std::sqrt(evh2) * sem_vh;
  rep.terms.push_back(desired);

  TermCheck noise_t;
  noise_t.name = "noise";
  noise_t.closed_form = x * etau;
  noise_t.estimate = noise.mean(samples);
  noise_t.sem = noise.sem(samples);
  rep.terms.push_back(noise_t);

  // Combined self-interference of the served UE: channel-estimation scatter
  // plus its own distortion, (1-e2) Var{v^H g} + e2 E{|v^H g|^2}.
  TermCheck self_t;
  self_t.name = "self_combined";
  self_t.closed_form = etau + e2 * (1.0 - e2) * static_cast<double>(M);
  self_t.estimate = (1.0 - e2) * (e_vh2 - evh2) + e2 * e_vh2;
  self_t.sem = self_raw.sem(samples) + 2.0 * (1.0 - e2) * std::sqrt(evh2) * sem_vh;
  rep.terms.push_back(self_t);

  double intra_mean = 0.0;
  if (K > 1) {
    const long cnt = samples * (K - 1);
    TermCheck t;
    t.name = "intra_per_ue";
    t.closed_form = etau;
    t.estimate = intra.mean(cnt);
    t.sem = intra.sem(cnt);
    intra_mean = t.estimate;
    rep.terms.push_back(t);
  }

  double nc_total = 0.0, ct_total = 0.0;
  for (size_t j = 0; j < L; ++j) {
    for (int i = 1; i < K; ++i) {
      const Accum& a = nc[j * static_cast<size_t>(K - 1) + static_cast<size_t>(i - 1)];
      TermCheck t;
      t.name = "noncont_cell" + std::to_string(j) + "_slot" + std::to_string(i);
      t.closed_form = r[j][static_cast<size_t>(i)] * etau;
      t.estimate = a.mean(samples);
      t.sem = a.sem(samples);
      nc_total += t.estimate;
      rep.terms.push_back(t);
    }
  }
  double coh_est_total = 0.0, coh_sem_sq = 0.0;
  for (size_t j = 0; j < L; ++j) {
    TermCheck t;
    t.name = "contam_cell" + std::to_string(j);
    t.closed_form = rk[j] * etau + rk[j] * rk[j] * (1.0 - e2) * static_cast<double>(M) / beta;
    t.estimate = ct[j].mean(samples);
    t.sem = ct[j].sem(samples);
    ct_total += t.estimate;
    rep.terms.push_back(t);

    if (coh_n[j] > 1) {
      const double nj = static_cast<double>(coh_n[j]);
      const cplx mu = coh_sum[j] / nj;
      const double mu2 = std::norm(mu);
      const double varvg = std::max(0.0, static_cast<double>(coh_sq[j]) / nj - mu2);
      // |E{v^H g | chi=1}|^2 debiased by the estimator's own variance.
      const double coh = mu2 - varvg / nj;
      coh_est_total += rk[j] * coh / beta;
      const double s = 2.0 * std::sqrt(mu2) * std::sqrt(varvg / (2.0 * nj));
      coh_sem_sq += rk[j] * rk[j] / (beta * beta) * s * s;
    }
  }
  if (L > 0) {
    // Coherent pilot-contamination component aggregated over cells; the mean
    // conditioned on collision carries it, so it is estimated from the
    // collision subsample.
    TermCheck t;
    t.name = "contamination_coherent";
    t.closed_form = (1.0 - e2) * static_cast<double>(M) * c2 / beta;
    t.estimate = coh_est_total;
    t.sem = std::sqrt(coh_sem_sq);
    rep.terms.push_back(t);
  }

  const double den8 = (K + a_all + x) * (1.0 + rk_sum / beta + x) +
                      static_cast<double>(M) * (1.0 - e2) * (c2 / beta + e2);
  rep.sinr_closed_form = static_cast<double>(M) * (1.0 - e2) * (1.0 - e2) / den8;
  const double d_emp = self_t.estimate + static_cast<double>(K - 1) * intra_mean +
                       nc_total + ct_total + noise_t.estimate;
  rep.sinr_estimate = desired.estimate / d_emp;
  return rep;
}

}  // namespace eeopt

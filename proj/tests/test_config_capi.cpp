#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "doctest.h"
#include "eeopt.h"

using namespace eeopt;

namespace {

struct ModelDeleter {
  void operator()(eeopt_model* m) const { eeopt_destroy(m); }
};
using Model = std::unique_ptr<eeopt_model, ModelDeleter>;

struct TextDeleter {
  void operator()(char* t) const { eeopt_free_text(t); }
};
using Text = std::unique_ptr<char, TextDeleter>;

std::string last_err() { return eeopt_last_error(); }

}  // namespace

TEST_CASE("empty config text yields the built-in defaults") {
  const ModelConfig def;
  const ModelConfig loaded = config_from_json_text("{}");
  CHECK(config_to_json(loaded) == config_to_json(def));
  CHECK(loaded.propagation.alpha == 3.76);
  CHECK(loaded.hardware.static_power == 5e-7);
  CHECK(loaded.montecarlo.trials == 10000);
}

TEST_CASE("unknown sections and keys are rejected") {
  CHECK_THROWS_WITH_AS(config_from_json_text(R"({"radio":{}})"),
                       "unknown config section: radio", ConfigError);
  CHECK_THROWS_WITH_AS(config_from_json_text(R"({"hardware":{"bogus":1}})"),
                       "unknown parameter key: hardware.bogus", ConfigError);
  CHECK_THROWS_AS(config_from_json_text("not json"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("[1,2]"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"hardware":7})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"hardware":{"static_power":"x"}})"),
                  ConfigError);
}

TEST_CASE("decibel and watt convenience keys convert at load") {
  const ModelConfig a =
      config_from_json_text(R"({"propagation":{"omega_db":130}})");
  CHECK(a.propagation.omega == doctest::Approx(1e13).epsilon(1e-12));

  // 10 W at 50 ns per symbol is 5e-7 J/symbol.
  const ModelConfig b =
      config_from_json_text(R"({"hardware":{"static_power_watts":10}})");
  CHECK(b.hardware.static_power == doctest::Approx(5e-7).epsilon(1e-12));

  // The conversion uses the configured symbol time, not the default.
  const ModelConfig c = config_from_json_text(
      R"({"propagation":{"symbol_time":1e-7},"hardware":{"per_ue_power_watts":2}})");
  CHECK(c.hardware.per_ue_power == doctest::Approx(2e-7).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(
      config_from_json_text(R"({"propagation":{"omega":1e13,"omega_db":130}})"),
      "propagation: give omega or omega_db, not both", ConfigError);
  CHECK_THROWS_WITH_AS(
      config_from_json_text(
          R"({"hardware":{"static_power":5e-7,"static_power_watts":10}})"),
      "hardware: give static_power or static_power_watts, not both", ConfigError);
}

TEST_CASE("out-of-range values are rejected with the offending field named") {
  try {
    config_from_json_text(R"({"propagation":{"alpha":1.5}})");
    FAIL("alpha <= 2 must not load");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("alpha") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_json_text(R"({"hardware":{"pa_efficiency":0}})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"hardware":{"impairment_level":1}})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"montecarlo":{"seed":-4}})"),
                  ConfigError);
}

TEST_CASE("canonical JSON form round-trips byte for byte") {
  ModelConfig cfg;
  set_param(cfg, "hardware.impairment_level", 0.1);
  set_param(cfg, "solver.m_cap", 512);
  set_param(cfg, "montecarlo.seed", 42);
  const std::string first = config_to_json(cfg);
  const ModelConfig again = config_from_json_text(first);
  CHECK(config_to_json(again) == first);
  // Canonical form is single-line compact JSON.
  CHECK(first.find('\n') == std::string::npos);
  CHECK(first.find(' ') == std::string::npos);
  CHECK(first.find("\"montecarlo\":{") != std::string::npos);
  CHECK(first.find("\"seed\":42") != std::string::npos);
}

TEST_CASE("dotted parameter access covers every scalar field") {
  ModelConfig cfg;
  const std::vector<std::string> keys = param_keys();
  CHECK(keys.size() == 25);
  for (const std::string& k : keys) {
    const double v = get_param(cfg, k);
    set_param(cfg, k, v);
    CHECK(get_param(cfg, k) == v);
  }
  set_param(cfg, "propagation.coherence_symbols", 200.0);
  CHECK(cfg.propagation.coherence_symbols == 200.0);
  set_param(cfg, "solver.max_iter", 7.2);  // integer fields round
  CHECK(cfg.solver.max_iter == 7);
  CHECK_THROWS_AS(set_param(cfg, "hardware.nope", 1.0), ConfigError);
  CHECK_THROWS_AS(get_param(cfg, "nope"), ConfigError);
  CHECK_THROWS_AS(set_param(cfg, "montecarlo.trials",
                            std::numeric_limits<double>::infinity()),
                  ConfigError);
}

TEST_CASE("model lifecycle and parameter access through the shared library") {
  Model m(eeopt_create());
  REQUIRE(m);
  double v = 0.0;
  CHECK(eeopt_get(m.get(), "propagation.alpha", &v) == EEOPT_OK);
  CHECK(v == 3.76);
  CHECK(eeopt_set(m.get(), "hardware.impairment_level", 0.1) == EEOPT_OK);
  CHECK(eeopt_get(m.get(), "hardware.impairment_level", &v) == EEOPT_OK);
  CHECK(v == 0.1);

  CHECK(eeopt_set(m.get(), "hardware.nope", 1.0) == EEOPT_INVALID);
  CHECK(last_err() == "unknown parameter key: hardware.nope");
  CHECK(eeopt_set(nullptr, "propagation.alpha", 3.0) == EEOPT_INVALID);
  CHECK(last_err() == "null argument");
  CHECK(eeopt_get(m.get(), "propagation.alpha", nullptr) == EEOPT_INVALID);
  CHECK(eeopt_set(m.get(), "montecarlo.seed", -1.0) == EEOPT_INVALID);

  Text js(eeopt_config_json(m.get()));
  REQUIRE(js);
  const std::string s = js.get();
  CHECK(s.find("\"impairment_level\":0.1") != std::string::npos);
  Model copy(eeopt_create_from_json_text(s.c_str()));
  REQUIRE(copy);
  Text js2(eeopt_config_json(copy.get()));
  CHECK(std::string(js2.get()) == s);
}

TEST_CASE("model creation reports JSON and filesystem failures") {
  CHECK(eeopt_create_from_json_text(R"({"nope":{}})") == nullptr);
  CHECK(last_err() == "unknown config section: nope");
  CHECK(eeopt_create_from_json_text(nullptr) == nullptr);

  CHECK(eeopt_create_from_json("/nonexistent/dir/cfg.json") == nullptr);
  CHECK(last_err().find("cannot open config file") != std::string::npos);

  const char* path = "capi_cfg_tmp.json";
  {
    std::ofstream out(path);
    out << R"({"propagation":{"alpha":3.5}})";
  }
  Model m(eeopt_create_from_json(path));
  REQUIRE(m);
  double v = 0.0;
  CHECK(eeopt_get(m.get(), "propagation.alpha", &v) == EEOPT_OK);
  CHECK(v == 3.5);
  std::remove(path);
}

TEST_CASE("point evaluation through the C API") {
  Model m(eeopt_create());
  REQUIRE(m);
  eeopt_point pt{};
  pt.beta = 7.16301006828;
  pt.rho = 1.27175697038e-19;
  pt.lambda = 10.0;
  pt.asymptotic = 0;
  pt.m = 97;
  pt.k = 10;
  eeopt_eval ev{};
  REQUIRE(eeopt_evaluate(m.get(), &pt, &ev) == EEOPT_OK);
  CHECK(ev.sinr == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(ev.se == doctest::Approx(1.64184949659).epsilon(1e-8));
  CHECK(ev.ase == doctest::Approx(164.184949659).epsilon(1e-8));
  CHECK(ev.apc == doctest::Approx(1.76407926674e-05).epsilon(1e-8));
  CHECK(ev.ee == doctest::Approx(9307118.60597).epsilon(1e-8));
  CHECK(ev.beta == pt.beta);
  CHECK(ev.prelog == doctest::Approx(1.0 - pt.beta * 10.0 / 400.0).epsilon(1e-12));

  // Target mode resolves the same reuse from gamma instead.
  eeopt_eval tv{};
  pt.beta = 0.0;
  REQUIRE(eeopt_evaluate_target(m.get(), &pt, 3.0, &tv) == EEOPT_OK);
  CHECK(tv.beta == doctest::Approx(7.16301006828).epsilon(1e-8));
  CHECK(tv.ee == doctest::Approx(ev.ee).epsilon(1e-8));

  // The point form rejects the asymptotic flag and invalid points.
  pt.asymptotic = 1;
  CHECK(eeopt_evaluate(m.get(), &pt, &ev) == EEOPT_INVALID);
  pt.asymptotic = 0;
  pt.beta = 50.0;  // beta*K beyond the coherence block
  CHECK(eeopt_evaluate(m.get(), &pt, &ev) == EEOPT_INVALID);
  CHECK(eeopt_evaluate(m.get(), nullptr, &ev) == EEOPT_INVALID);
}

TEST_CASE("asymptotic target evaluation and feasibility reporting") {
  Model m(eeopt_create());
  REQUIRE(m);
  eeopt_point pt{};
  pt.asymptotic = 1;
  pt.m = 91;
  pt.k = 10;
  eeopt_eval ev{};
  REQUIRE(eeopt_evaluate_target(m.get(), &pt, 3.0, &ev) == EEOPT_OK);
  CHECK(ev.sinr == 3.0);
  CHECK(ev.beta == doctest::Approx(7.07561315181).epsilon(1e-9));
  CHECK(ev.se == doctest::Approx(1.64621934241).epsilon(1e-9));
  CHECK(ev.ee == doctest::Approx(10156258.5751).epsilon(1e-9));

  double lim = 0.0;
  REQUIRE(eeopt_feasibility_limit(m.get(), &lim) == EEOPT_OK);
  CHECK(lim == doctest::Approx(292.88297872340422).epsilon(1e-12));

  CHECK(eeopt_evaluate_target(m.get(), &pt, 500.0, &ev) == EEOPT_INFEASIBLE);
  CHECK(last_err().find("target infeasible") != std::string::npos);
  CHECK(last_err().find("292.883") != std::string::npos);

  double beta = 0.0;
  REQUIRE(eeopt_optimal_beta(m.get(), 91, 10, 0.0, 3.0, &beta) == EEOPT_OK);
  CHECK(beta == doctest::Approx(7.07561315181).epsilon(1e-9));
  CHECK(eeopt_optimal_beta(m.get(), 91, 10, 0.0, 500.0, &beta) == EEOPT_INFEASIBLE);

  double ee = 0.0, b2 = 0.0, se = 0.0;
  REQUIRE(eeopt_ee_asymptotic(m.get(), 91.0, 10.0, 3.0, &ee, &b2, &se) == EEOPT_OK);
  CHECK(ee == doctest::Approx(10156258.5751).epsilon(1e-9));
  CHECK(b2 == doctest::Approx(7.07561315181).epsilon(1e-9));
  CHECK(se == doctest::Approx(1.64621934241).epsilon(1e-9));
}

TEST_CASE("area power breakdown through the C API") {
  Model m(eeopt_create());
  REQUIRE(m);
  eeopt_point pt{};
  pt.beta = 7.16301006828;
  pt.rho = 1.27175697038e-19;
  pt.lambda = 10.0;
  pt.m = 97;
  pt.k = 10;
  eeopt_breakdown b{};
  REQUIRE(eeopt_apc(m.get(), &pt, &b) == EEOPT_OK);
  const double total = b.radiated + b.static_bs + b.per_ue + b.per_antenna +
                       b.per_antenna_ue + b.coding;
  CHECK(b.ee == doctest::Approx(b.area_se / total).epsilon(1e-12));
  CHECK(b.radiated > 0.0);
  CHECK(b.ee == doctest::Approx(9307118.60597).epsilon(1e-8));

  eeopt_breakdown t{};
  pt.beta = 0.0;
  REQUIRE(eeopt_apc_target(m.get(), &pt, 3.0, &t) == EEOPT_OK);
  CHECK(t.ee == doctest::Approx(b.ee).epsilon(1e-8));
}

TEST_CASE("asymptotic optimizer through the C API, with trace truncation") {
  Model m(eeopt_create());
  REQUIRE(m);
  eeopt_optimum full{};
  REQUIRE(eeopt_optimize_asymptotic(m.get(), 3.0, &full) == EEOPT_OK);
  CHECK(full.m == 91);
  CHECK(full.k == 10);
  CHECK(full.beta == doctest::Approx(7.07561315181).epsilon(1e-9));
  CHECK(full.ee == doctest::Approx(10156258.5751).epsilon(1e-9));
  CHECK(full.m_real == doctest::Approx(91.5885459021).epsilon(1e-6));
  CHECK(full.k_real == doctest::Approx(10.1046213677).epsilon(1e-6));
  CHECK(full.converged == 1);
  CHECK(full.iterations >= 2);
  CHECK(full.rho == 0.0);
  CHECK(full.lambda > 1e300);

  double mt[64], kt[64], et[64];
  int n = 0;
  eeopt_optimum tr{};
  REQUIRE(eeopt_optimize_asymptotic_trace(m.get(), 3.0, mt, kt, et, 64, &n,
                                          &tr) == EEOPT_OK);
  REQUIRE(n == full.iterations);
  REQUIRE(n <= 64);
  for (int i = 1; i < n; ++i) CHECK(et[i] >= et[i - 1]);  // ascent never backtracks
  CHECK(mt[n - 1] == doctest::Approx(full.m_real).epsilon(1e-9));
  CHECK(kt[n - 1] == doctest::Approx(full.k_real).epsilon(1e-9));

  // A small cap truncates the copy but still reports the full length.
  double m2[2], k2[2], e2[2];
  int n2 = 0;
  REQUIRE(eeopt_optimize_asymptotic_trace(m.get(), 3.0, m2, k2, e2, 2, &n2,
                                          &tr) == EEOPT_OK);
  CHECK(n2 == n);
  CHECK(m2[0] == mt[0]);
  CHECK(m2[1] == mt[1]);
  CHECK(e2[1] == et[1]);
}

TEST_CASE("density-constrained optimizers through the C API") {
  Model m(eeopt_create());
  REQUIRE(m);
  eeopt_optimum at{};
  REQUIRE(eeopt_optimize_at_density(m.get(), 10.0, 3.0, &at) == EEOPT_OK);
  CHECK(at.m == 97);
  CHECK(at.k == 10);
  CHECK(at.ee == doctest::Approx(9307118.60597).epsilon(1e-8));
  CHECK(at.lambda == 10.0);
  CHECK(at.rho > 0.0);
  CHECK(at.inv_snr == doctest::Approx(0.078631376).epsilon(1e-5));

  eeopt_optimum fx{};
  REQUIRE(eeopt_optimize_fixed_ue_density(m.get(), 100.0, 3.0, &fx) == EEOPT_OK);
  CHECK(fx.m == 86);
  CHECK(fx.k == 9);
  CHECK(fx.ee == doctest::Approx(9360281.15124).epsilon(1e-8));
  CHECK(fx.lambda == doctest::Approx(100.0 / 9.0).epsilon(1e-12));

  eeopt_optimum ref{};
  REQUIRE(eeopt_optimize_reference(m.get(), 100.0, 10, 1, 3.0, &ref) == EEOPT_OK);
  CHECK(ref.m == 10);
  CHECK(ref.k == 1);
  CHECK(ref.lambda == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(ref.ee == doctest::Approx(3234271.52611).epsilon(1e-8));

  // An unreachable target is reported as infeasible, not as an exception.
  CHECK(eeopt_optimize_at_density(m.get(), 10.0, 500.0, &at) == EEOPT_INFEASIBLE);
  CHECK(last_err().find("feasibility limit") != std::string::npos);
}

namespace {
struct SinkState {
  long calls = 0;
  long abort_at = -1;
  double se_sum = 0.0;
};
int count_sink(void* ctx, long index, double serving_distance, int interferers,
               double sinr, double se) {
  SinkState* s = static_cast<SinkState*>(ctx);
  if (index != s->calls) return 2;  // indices must arrive in order
  if (serving_distance <= 0.0 || interferers < 0 || sinr <= 0.0) return 3;
  s->se_sum += se;
  ++s->calls;
  return s->abort_at >= 0 && index >= s->abort_at ? 1 : 0;
}
}  // namespace

TEST_CASE("Monte Carlo SE through the C API with a streaming sink") {
  Model m(eeopt_create());
  REQUIRE(m);
  REQUIRE(eeopt_set(m.get(), "montecarlo.trials", 60) == EEOPT_OK);
  REQUIRE(eeopt_set(m.get(), "montecarlo.max_interferers", 150) == EEOPT_OK);
  REQUIRE(eeopt_set(m.get(), "montecarlo.seed", 3) == EEOPT_OK);

  eeopt_point pt{};
  pt.beta = 2.0;
  pt.rho = 1e-19;
  pt.lambda = 10.0;
  pt.m = 16;
  pt.k = 2;
  eeopt_mc_result r{};
  REQUIRE(eeopt_mc_average_se(m.get(), &pt, &r) == EEOPT_OK);
  CHECK(r.trials == 60);
  CHECK(r.mean > 0.0);
  CHECK(r.sem > 0.0);

  SinkState st;
  eeopt_mc_result r2{};
  REQUIRE(eeopt_mc_average_se_dump(m.get(), &pt, count_sink, &st, &r2) == EEOPT_OK);
  CHECK(st.calls == 60);
  CHECK(r2.mean == r.mean);  // same seed, same stream
  CHECK(st.se_sum / 60.0 == doctest::Approx(r.mean).epsilon(1e-12));

  SinkState ab;
  ab.abort_at = 5;
  CHECK(eeopt_mc_average_se_dump(m.get(), &pt, count_sink, &ab, &r2) ==
        EEOPT_INTERNAL);
  CHECK(last_err() == "trial sink aborted");
  CHECK(ab.calls == 6);

  pt.asymptotic = 1;
  CHECK(eeopt_mc_average_se(m.get(), &pt, &r) == EEOPT_INVALID);
}

TEST_CASE("radial moment estimators through the C API") {
  Model m(eeopt_create());
  REQUIRE(m);
  REQUIRE(eeopt_set(m.get(), "montecarlo.trials", 4000) == EEOPT_OK);
  REQUIRE(eeopt_set(m.get(), "montecarlo.seed", 7) == EEOPT_OK);
  REQUIRE(eeopt_set(m.get(), "propagation.alpha", 4.0) == EEOPT_OK);

  eeopt_mc_result mo{};
  REQUIRE(eeopt_mc_distance_moment(m.get(), 10.0, 1, 1, &mo) == EEOPT_OK);
  CHECK(mo.trials == 4000);
  CHECK(std::fabs(mo.mean - 1.0) <= 3.0 * mo.sem);

  eeopt_mc_result pair{}, same{};
  REQUIRE(eeopt_mc_cross_moment(m.get(), 10.0, 1, &pair, &same) == EEOPT_OK);
  CHECK(std::fabs(pair.mean - 1.0) <= 3.0 * pair.sem);
  CHECK(same.mean <= 1.0 / 3.0 + 3.0 * same.sem);

  CHECK(eeopt_mc_distance_moment(m.get(), -1.0, 1, 1, &mo) == EEOPT_INVALID);
  CHECK(eeopt_mc_distance_moment(m.get(), 10.0, 1, 1, nullptr) == EEOPT_INVALID);
}

TEST_CASE("channel-term validation through the C API") {
  Model m(eeopt_create());
  REQUIRE(m);
  const double own[6] = {0.9, 1.1, 0.8, 1.0, 1.2, 0.7};
  const double typ[6] = {1.8, 2.2, 2.5, 2.8, 3.5, 3.1};

  int n = 0;
  REQUIRE(eeopt_validate_sinr_terms(m.get(), 4, 2, 2.0, 0.1, 3, own, typ, 2000,
                                    42, nullptr, 0, &n, nullptr,
                                    nullptr) == EEOPT_OK);
  REQUIRE(n > 4);
  REQUIRE(n <= 64);

  std::vector<eeopt_term_check> terms(static_cast<size_t>(n));
  double cf = 0.0, est = 0.0;
  int n2 = 0;
  REQUIRE(eeopt_validate_sinr_terms(m.get(), 4, 2, 2.0, 0.1, 3, own, typ, 60000,
                                    42, terms.data(), n, &n2, &cf,
                                    &est) == EEOPT_OK);
  CHECK(n2 == n);
  bool saw_desired = false, saw_contam = false;
  for (const auto& t : terms) {
    CHECK(std::fabs(t.estimate - t.closed_form) <= 0.05 * std::fabs(t.closed_form));
    if (std::string(t.name) == "desired") {
      saw_desired = true;
      CHECK(t.closed_form == doctest::Approx(3.99).epsilon(1e-12));
      CHECK(t.sem >= 0.0);
    }
    if (std::string(t.name) == "contamination_coherent") saw_contam = true;
  }
  CHECK(saw_desired);
  CHECK(saw_contam);
  CHECK(cf > 0.0);
  CHECK(est == doctest::Approx(cf).epsilon(0.02));

  // Truncated copy still reports the full row count.
  std::vector<eeopt_term_check> two(2);
  REQUIRE(eeopt_validate_sinr_terms(m.get(), 4, 2, 2.0, 0.1, 3, own, typ, 2000,
                                    42, two.data(), 2, &n2, nullptr,
                                    nullptr) == EEOPT_OK);
  CHECK(n2 == n);
  CHECK(std::string(two[0].name) == std::string(terms[0].name));

  const double bad[6] = {0.9, -1.0, 0.8, 1.0, 1.2, 0.7};
  CHECK(eeopt_validate_sinr_terms(m.get(), 4, 2, 2.0, 0.1, 3, bad, typ, 100, 42,
                                  nullptr, 0, &n2, nullptr,
                                  nullptr) == EEOPT_INVALID);
  CHECK(eeopt_validate_sinr_terms(m.get(), 4, 2, 2.0, 0.1, 3, nullptr, nullptr,
                                  100, 42, nullptr, 0, &n2, nullptr,
                                  nullptr) == EEOPT_INVALID);
}

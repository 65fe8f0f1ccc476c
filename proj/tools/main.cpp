// eeopt command-line harness: reproduces the analytic and Monte Carlo data
// sets behind the library's figures and tables. Talks to the core strictly
// through the C API.
//
// Exit codes: 0 success, 2 infeasible target, 3 configuration error, 4 I/O
// or runtime failure. Failures also print one machine-readable JSON record
// to stderr.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eeopt.h"

namespace {

constexpr const char* kFormatLine = "# eeopt-format: 1";

std::string fmt(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt(int v) { return std::to_string(v); }

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

// One machine-readable error record on stderr; returns the exit code.
int fail(int code, const std::string& message,
         const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  std::string rec = "{\"error\":\"" + json_escape(message) + "\",\"exit_code\":" +
                    std::to_string(code);
  for (const auto& kv : extra) rec += ",\"" + kv.first + "\":" + kv.second;
  rec += "}";
  std::fprintf(stderr, "%s\n", rec.c_str());
  return code;
}

int code_of(eeopt_status st) {
  switch (st) {
    case EEOPT_OK: return 0;
    case EEOPT_INFEASIBLE: return 2;
    case EEOPT_INVALID: return 3;
    default: return 4;
  }
}

struct Column {
  std::string name;
  bool text = false;  // quoted in ndjson
};

// Row sink with checkpoint support: when the output file already starts with
// the identical header, rows present are skipped and new rows append, so an
// interrupted sweep resumes where it stopped and a finished file is a no-op.
class Emitter {
 public:
  Emitter(std::string path, bool ndjson) : path_(std::move(path)), ndjson_(ndjson) {}

  ~Emitter() {
    if (f_ && f_ != stdout) std::fclose(f_);
  }

  // header_extras: extra comment lines (csv) / fields (ndjson) after the
  // config; must be deterministic so resume can byte-compare them.
  bool open(const std::string& experiment, const std::string& config_json,
            uint64_t seed, const std::vector<Column>& columns,
            const std::vector<std::pair<std::string, std::string>>& header_extras,
            std::string* err) {
    columns_ = columns;
    std::vector<std::string> header;
    if (ndjson_) {
      std::string h = std::string("{\"eeopt_format\":1,\"experiment\":\"") +
                      experiment + "\",\"seed\":" + std::to_string(seed);
      for (const auto& kv : header_extras) h += ",\"" + kv.first + "\":" + kv.second;
      h += ",\"config\":" + config_json + "}";
      header.push_back(h);
    } else {
      header.push_back(kFormatLine);
      header.push_back("# experiment: " + experiment);
      header.push_back("# seed: " + std::to_string(seed));
      for (const auto& kv : header_extras)
        header.push_back("# " + kv.first + ": " + kv.second);
      header.push_back("# config: " + config_json);
      std::string cols;
      for (size_t i = 0; i < columns_.size(); ++i) {
        if (i) cols += ',';
        cols += columns_[i].name;
      }
      header.push_back(cols);
    }

    if (path_.empty()) {
      f_ = stdout;
      for (const auto& line : header) std::fprintf(f_, "%s\n", line.c_str());
      return true;
    }

    std::ifstream existing(path_);
    if (existing.good()) {
      std::string line;
      size_t hi = 0;
      bool match = true;
      long rows = 0;
      while (std::getline(existing, line)) {
        if (hi < header.size()) {
          if (line != header[hi]) {
            match = false;
            break;
          }
          ++hi;
        } else if (!line.empty()) {
          ++rows;
        }
      }
      if (hi > 0 && (!match || hi < header.size())) {
        *err = "existing output '" + path_ + "' has a different run header; "
               "refusing to mix results (delete it or choose another --out)";
        return false;
      }
      if (match && hi == header.size()) {
        skip_ = rows;
        f_ = std::fopen(path_.c_str(), "a");
        if (!f_) {
          *err = "cannot append to '" + path_ + "': " + std::strerror(errno);
          return false;
        }
        return true;
      }
    }
    f_ = std::fopen(path_.c_str(), "w");
    if (!f_) {
      *err = "cannot write '" + path_ + "': " + std::strerror(errno);
      return false;
    }
    for (const auto& line : header) std::fprintf(f_, "%s\n", line.c_str());
    return true;
  }

  // True if this row index was already in the checkpoint.
  bool done_already() {
    if (emitted_ < skip_) {
      ++emitted_;
      return true;
    }
    return false;
  }

  void row(const std::vector<std::string>& values) {
    ++emitted_;
    if (ndjson_) {
      std::string line = "{";
      for (size_t i = 0; i < columns_.size(); ++i) {
        if (i) line += ',';
        line += "\"" + columns_[i].name + "\":";
        if (values[i].empty())
          line += "null";
        else if (columns_[i].text)
          line += "\"" + json_escape(values[i]) + "\"";
        else if (values[i] == "inf" || values[i] == "-inf" || values[i] == "nan")
          line += "null";
        else
          line += values[i];
      }
      line += "}";
      std::fprintf(f_, "%s\n", line.c_str());
    } else {
      std::string line;
      for (size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += values[i];
      }
      std::fprintf(f_, "%s\n", line.c_str());
    }
  }

 private:
  std::string path_;
  bool ndjson_;
  FILE* f_ = nullptr;
  std::vector<Column> columns_;
  long skip_ = 0;
  long emitted_ = 0;
};

struct ModelDeleter {
  void operator()(eeopt_model* m) const { eeopt_destroy(m); }
};
using ModelPtr = std::unique_ptr<eeopt_model, ModelDeleter>;

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  double gamma = 3.0;
  bool gamma_set = false;
  long trials = -1;
  long long seed = -1;
  std::vector<std::string> sets;  // raw key=value overrides
  // physics conveniences
  double S = -1, alpha = -1, epsilon = -1;
};

// Builds a model from defaults/--config and applies overrides; on failure
// returns null with *code/*msg set.
ModelPtr make_model(const Options& opt, int* code, std::string* msg) {
  ModelPtr m(opt.config_path.empty() ? eeopt_create()
                                     : eeopt_create_from_json(opt.config_path.c_str()));
  if (!m) {
    *code = opt.config_path.empty() ? 3 : 4;
    const char* last = eeopt_last_error();
    *msg = last ? last : "model creation failed";
    if (*msg == std::string() || msg->find("cannot") == std::string::npos)
      *code = 3;  // parse/validation problems are config errors
    if (!opt.config_path.empty() &&
        (msg->find("cannot open") != std::string::npos ||
         msg->find("cannot read") != std::string::npos))
      *code = 4;
    return nullptr;
  }
  auto apply = [&](const char* key, double value) -> bool {
    if (eeopt_set(m.get(), key, value) != EEOPT_OK) {
      *code = 3;
      *msg = eeopt_last_error();
      return false;
    }
    return true;
  };
  for (const std::string& kv : opt.sets) {
    const size_t eq = kv.find('=');
    double value = 0;
    if (eq == std::string::npos ||
        std::sscanf(kv.c_str() + eq + 1, "%lf", &value) != 1) {
      *code = 3;
      *msg = "--set expects key=value with a numeric value, got '" + kv + "'";
      return nullptr;
    }
    if (!apply(kv.substr(0, eq).c_str(), value)) return nullptr;
  }
  if (opt.S > 0 && !apply("propagation.coherence_symbols", opt.S)) return nullptr;
  if (opt.alpha > 0 && !apply("propagation.alpha", opt.alpha)) return nullptr;
  if (opt.epsilon >= 0 && !apply("hardware.impairment_level", opt.epsilon))
    return nullptr;
  if (opt.trials >= 0 && !apply("montecarlo.trials", (double)opt.trials))
    return nullptr;
  if (opt.seed >= 0 && !apply("montecarlo.seed", (double)opt.seed)) return nullptr;
  return m;
}

std::string config_of(const eeopt_model* m) {
  char* text = eeopt_config_json(m);
  std::string out = text ? text : "{}";
  eeopt_free_text(text);
  return out;
}

uint64_t seed_of(const eeopt_model* m) {
  double v = 0;
  eeopt_get(m, "montecarlo.seed", &v);
  return static_cast<uint64_t>(v);
}

long trials_of(const eeopt_model* m) {
  double v = 0;
  eeopt_get(m, "montecarlo.trials", &v);
  return static_cast<long>(v);
}

double get_or_die(const eeopt_model* m, const char* key) {
  double v = 0;
  eeopt_get(m, key, &v);
  return v;
}

// Clone a model (fresh instance with identical config) so experiments can
// mutate parameters without touching the caller's instance.
ModelPtr clone_model(const eeopt_model* m) {
  return ModelPtr(eeopt_create_from_json_text(config_of(m).c_str()));
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g;
  if (points <= 1 || lo == hi) {
    g.push_back(lo);
    return g;
  }
  const double la = std::log10(lo), lb = std::log10(hi);
  for (int i = 0; i < points; ++i)
    g.push_back(std::pow(10.0, la + (lb - la) * i / (points - 1)));
  return g;
}

int infeasible_exit(const eeopt_model* m, const std::string& context) {
  double limit = 0;
  eeopt_feasibility_limit(m, &limit);
  return fail(2, context + ": " + eeopt_last_error(),
              {{"feasibility_limit", fmt(limit)}});
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  double M = 91, K = 10, lambda = 0, rho = 0, beta = 0;
  bool lambda_set = false, rho_set = false, beta_set = false;
};

int run_evaluate(const Options& opt, const EvaluateArgs& a) {
  int code = 0;
  std::string msg;
  ModelPtr m = make_model(opt, &code, &msg);
  if (!m) return fail(code, msg);

  eeopt_point pt{};
  pt.m = static_cast<int>(a.M);
  pt.k = static_cast<int>(a.K);
  pt.asymptotic = a.lambda_set ? 0 : 1;
  pt.lambda = a.lambda;
  pt.rho = a.rho;
  pt.beta = a.beta_set ? a.beta : 1.0;
  if (a.lambda_set && !a.rho_set)
    return fail(3, "evaluate at finite density needs --rho (per-symbol transmit "
                   "energy scale)");

  eeopt_eval ev{};
  eeopt_status st;
  if (a.beta_set)
    st = eeopt_evaluate(m.get(), &pt, &ev);
  else
    st = eeopt_evaluate_target(m.get(), &pt, opt.gamma, &ev);
  if (st == EEOPT_INFEASIBLE) return infeasible_exit(m.get(), "evaluate");
  if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());

  Emitter out(opt.out_path, opt.format == "ndjson");
  std::string err;
  const std::vector<Column> cols = {{"gamma"}, {"M"},   {"K"},      {"lambda"},
                                    {"beta"},  {"rho"}, {"sinr"},   {"prelog"},
                                    {"se"},    {"ase"}, {"apc"},    {"ee_mbit_per_joule"}};
  if (!out.open("evaluate", config_of(m.get()), seed_of(m.get()), cols, {}, &err))
    return fail(4, err);
  if (!out.done_already())
    out.row({fmt(opt.gamma), fmt(pt.m), fmt(pt.k),
             pt.asymptotic ? "inf" : fmt(pt.lambda), fmt(ev.beta), fmt(pt.rho),
             fmt(ev.sinr), fmt(ev.prelog), fmt(ev.se), fmt(ev.ase), fmt(ev.apc),
             fmt(ev.ee / 1e6)});
  return 0;
}

// ---------------------------------------------------------------- optimize

int run_optimize(const Options& opt) {
  int code = 0;
  std::string msg;
  ModelPtr m = make_model(opt, &code, &msg);
  if (!m) return fail(code, msg);

  eeopt_optimum best{};
  eeopt_status st = eeopt_optimize_asymptotic(m.get(), opt.gamma, &best);
  if (st == EEOPT_INFEASIBLE) return infeasible_exit(m.get(), "optimize");
  if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());

  Emitter out(opt.out_path, opt.format == "ndjson");
  std::string err;
  const std::vector<Column> cols = {{"gamma"},   {"M"},      {"K"},
                                    {"beta"},    {"se"},     {"ee_mbit_per_joule"},
                                    {"m_real"},  {"k_real"}, {"ee_real_mbit_per_joule"},
                                    {"iterations"}, {"converged"}};
  // The real-relaxation EE at the fixed point, for the summary column.
  double ee_real = 0, beta_real = 0, se_real = 0;
  eeopt_ee_asymptotic(m.get(), best.m_real, best.k_real, opt.gamma, &ee_real,
                      &beta_real, &se_real);
  if (!out.open("optimize", config_of(m.get()), seed_of(m.get()), cols, {}, &err))
    return fail(4, err);
  if (!out.done_already())
    out.row({fmt(opt.gamma), fmt(best.m), fmt(best.k), fmt(best.beta), fmt(best.se),
             fmt(best.ee / 1e6), fmt(best.m_real), fmt(best.k_real), fmt(ee_real / 1e6),
             fmt(best.iterations), fmt(best.converged)});
  return 0;
}

// ------------------------------------------------------------ sweep-density

struct DensityArgs {
  double lambda_min = 0.1, lambda_max = 1000.0;
  int points = 20;
  double lambda_single = 0;
  bool single = false;
};

int run_sweep_density(const Options& opt, const DensityArgs& a) {
  int code = 0;
  std::string msg;
  ModelPtr m = make_model(opt, &code, &msg);
  if (!m) return fail(code, msg);

  const std::vector<double> grid =
      a.single ? std::vector<double>{a.lambda_single}
               : log_grid(a.lambda_min, a.lambda_max, a.points);
  const long trials = trials_of(m.get());
  const double coding_cost = get_or_die(m.get(), "hardware.coding_cost");

  Emitter out(opt.out_path, opt.format == "ndjson");
  std::string err;
  const std::vector<Column> cols = {{"lambda"}, {"gamma"},      {"ee_bound"},
                                    {"ee_mc_mean"}, {"ee_mc_sem"}, {"M"},
                                    {"K"},      {"beta"},       {"rho"}};
  // Pin every argument that defines the row sequence, so a resume against a
  // file produced with different sweep parameters is refused instead of
  // silently skipping the wrong rows.
  std::vector<std::pair<std::string, std::string>> extras = {{"gamma", fmt(opt.gamma)}};
  if (a.single) {
    extras.push_back({"lambda", fmt(a.lambda_single)});
  } else {
    extras.push_back({"lambda_min", fmt(a.lambda_min)});
    extras.push_back({"lambda_max", fmt(a.lambda_max)});
    extras.push_back({"points", fmt(a.points)});
  }
  if (!out.open("sweep-density", config_of(m.get()), seed_of(m.get()), cols, extras,
                &err))
    return fail(4, err);

  for (double lambda : grid) {
    if (out.done_already()) continue;
    eeopt_optimum o{};
    eeopt_status st = eeopt_optimize_at_density(m.get(), lambda, opt.gamma, &o);
    if (st == EEOPT_INFEASIBLE) return infeasible_exit(m.get(), "sweep-density");
    if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
    std::string mc_mean, mc_sem;
    if (trials > 0) {
      eeopt_point pt{o.beta, o.rho, lambda, 0, o.m, o.k};
      eeopt_mc_result mc{};
      st = eeopt_mc_average_se(m.get(), &pt, &mc);
      if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
      eeopt_breakdown bd{};
      st = eeopt_apc_target(m.get(), &pt, opt.gamma, &bd);
      if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
      // EE with the Monte Carlo SE substituted: only the coding term of the
      // area power scales with throughput.
      const double p_rest = bd.radiated + bd.static_bs + bd.per_ue +
                            bd.per_antenna + bd.per_antenna_ue;
      const double ase_mc = lambda * o.k * mc.mean;
      const double ee_mc = ase_mc / (p_rest + coding_cost * ase_mc);
      const double dee_dase =
          p_rest / ((p_rest + coding_cost * ase_mc) * (p_rest + coding_cost * ase_mc));
      const double sem_ee = dee_dase * lambda * o.k * mc.sem;
      mc_mean = fmt(ee_mc / 1e6);
      mc_sem = fmt(sem_ee / 1e6);
    }
    out.row({fmt(lambda), fmt(opt.gamma), fmt(o.ee / 1e6), mc_mean, mc_sem,
             fmt(o.m), fmt(o.k), fmt(o.beta), fmt(o.rho)});
  }
  return 0;
}

// -------------------------------------------------------------- surface-mk

struct SurfaceArgs {
  int m_min = 10, m_max = 200, k_min = 1, k_max = 30;
};

int run_surface(const Options& opt, const SurfaceArgs& a) {
  int code = 0;
  std::string msg;
  ModelPtr m = make_model(opt, &code, &msg);
  if (!m) return fail(code, msg);

  // Star point for the header: grid argmax plus the real-relaxation optimum.
  eeopt_optimum best{};
  eeopt_status st = eeopt_optimize_asymptotic(m.get(), opt.gamma, &best);
  if (st == EEOPT_INFEASIBLE) return infeasible_exit(m.get(), "surface-mk");
  if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
  const std::string star = "M=" + fmt(best.m) + " K=" + fmt(best.k) +
                           " beta=" + fmt(best.beta) +
                           " ee_mbit_per_joule=" + fmt(best.ee / 1e6) +
                           " m_real=" + fmt(best.m_real) + " k_real=" + fmt(best.k_real);

  Emitter out(opt.out_path, opt.format == "ndjson");
  std::string err;
  const std::vector<Column> cols = {{"M"}, {"K"}, {"beta_star"}, {"ee_mbit_per_joule"}};
  const bool ndq = opt.format == "ndjson";
  if (!out.open("surface-mk", config_of(m.get()), seed_of(m.get()), cols,
                {{"star", ndq ? "\"" + json_escape(star) + "\"" : star},
                 {"gamma", fmt(opt.gamma)},
                 {"m_min", fmt(a.m_min)},
                 {"m_max", fmt(a.m_max)},
                 {"k_min", fmt(a.k_min)},
                 {"k_max", fmt(a.k_max)}},
                &err))
    return fail(4, err);

  for (int M = a.m_min; M <= a.m_max; ++M) {
    for (int K = a.k_min; K <= a.k_max; ++K) {
      if (out.done_already()) continue;
      double ee = 0, beta = 0, se = 0;
      st = eeopt_ee_asymptotic(m.get(), M, K, opt.gamma, &ee, &beta, &se);
      if (st == EEOPT_OK)
        out.row({fmt(M), fmt(K), fmt(beta), fmt(ee / 1e6)});
      else if (st == EEOPT_INFEASIBLE)
        out.row({fmt(M), fmt(K), "", ""});  // target unreachable at this (M, K)
      else
        return fail(code_of(st), eeopt_last_error());
    }
  }
  return 0;
}

// --------------------------------------------------------------- breakdown

struct BreakdownArgs {
  double lambda = 100.0;
  int M = 0, K = 0;  // 0: use the density optimum
};

int run_breakdown(const Options& opt, const BreakdownArgs& a) {
  int code = 0;
  std::string msg;
  ModelPtr m = make_model(opt, &code, &msg);
  if (!m) return fail(code, msg);

  eeopt_optimum o{};
  eeopt_status st = eeopt_optimize_at_density(m.get(), a.lambda, opt.gamma, &o);
  if (st == EEOPT_INFEASIBLE) return infeasible_exit(m.get(), "breakdown");
  if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
  eeopt_point pt{o.beta, o.rho, a.lambda, 0, o.m, o.k};
  if (a.M > 0) pt.m = a.M;
  if (a.K > 0) pt.k = a.K;
  eeopt_breakdown bd{};
  st = eeopt_apc_target(m.get(), &pt, opt.gamma, &bd);
  if (st == EEOPT_INFEASIBLE) return infeasible_exit(m.get(), "breakdown");
  if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());

  Emitter out(opt.out_path, opt.format == "ndjson");
  std::string err;
  const std::vector<Column> cols = {{"component", true},
                                    {"joules_per_symbol_km2"},
                                    {"share"}};
  if (!out.open("breakdown", config_of(m.get()), seed_of(m.get()), cols,
                {{"gamma", fmt(opt.gamma)},
                 {"lambda", fmt(a.lambda)},
                 {"M", fmt(pt.m)},
                 {"K", fmt(pt.k)}},
                &err))
    return fail(4, err);

  const double total = bd.radiated + bd.static_bs + bd.per_ue + bd.per_antenna +
                       bd.per_antenna_ue + bd.coding;
  const std::pair<const char*, double> rows[] = {
      {"radiated", bd.radiated},         {"static_bs", bd.static_bs},
      {"per_ue", bd.per_ue},             {"per_antenna", bd.per_antenna},
      {"per_antenna_ue", bd.per_antenna_ue}, {"coding", bd.coding}};
  for (const auto& r : rows) {
    if (out.done_already()) continue;
    out.row({r.first, fmt(r.second), fmt(r.second / total)});
  }
  return 0;
}

// -------------------------------------------------------- sweep-impairments

struct ImpairArgs {
  double eps_min = 0.0, eps_max = 0.2;
  int points = 21;
  std::vector<double> gammas;
};

int run_sweep_impairments(const Options& opt, const ImpairArgs& a) {
  int code = 0;
  std::string msg;
  ModelPtr m = make_model(opt, &code, &msg);
  if (!m) return fail(code, msg);

  std::vector<double> gammas = a.gammas;
  if (gammas.empty()) {
    if (opt.gamma_set)
      gammas.push_back(opt.gamma);
    else
      gammas = {1.0, 3.0};
  }

  Emitter out(opt.out_path, opt.format == "ndjson");
  std::string err;
  const std::vector<Column> cols = {{"epsilon"}, {"gamma"}, {"ee_mbit_per_joule"}};
  std::string glist;
  for (size_t i = 0; i < gammas.size(); ++i)
    glist += (i ? " " : "") + fmt(gammas[i]);
  if (opt.format == "ndjson") glist = "\"" + json_escape(glist) + "\"";
  if (!out.open("sweep-impairments", config_of(m.get()), seed_of(m.get()), cols,
                {{"gammas", glist},
                 {"eps_min", fmt(a.eps_min)},
                 {"eps_max", fmt(a.eps_max)},
                 {"points", fmt(a.points)}},
                &err))
    return fail(4, err);

  for (double gamma : gammas) {
    for (int i = 0; i < a.points; ++i) {
      const double eps =
          a.points > 1 ? a.eps_min + (a.eps_max - a.eps_min) * i / (a.points - 1)
                       : a.eps_min;
      if (out.done_already()) continue;
      ModelPtr w = clone_model(m.get());
      if (!w) return fail(3, eeopt_last_error());
      if (eeopt_set(w.get(), "hardware.impairment_level", eps) != EEOPT_OK)
        return fail(3, eeopt_last_error());
      eeopt_optimum o{};
      eeopt_status st = eeopt_optimize_asymptotic(w.get(), gamma, &o);
      if (st == EEOPT_INFEASIBLE) return infeasible_exit(w.get(), "sweep-impairments");
      if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
      out.row({fmt(eps), fmt(gamma), fmt(o.ee / 1e6)});
    }
  }
  return 0;
}

// -------------------------------------------------------- sweep-ue-density

struct UeDensityArgs {
  double mu_min = 1.0, mu_max = 1e5;
  int points = 21;
  double mu_single = 0;
  bool single = false;
};

int run_sweep_ue_density(const Options& opt, const UeDensityArgs& a) {
  int code = 0;
  std::string msg;
  ModelPtr m = make_model(opt, &code, &msg);
  if (!m) return fail(code, msg);

  const std::vector<double> grid = a.single
                                       ? std::vector<double>{a.mu_single}
                                       : log_grid(a.mu_min, a.mu_max, a.points);

  Emitter out(opt.out_path, opt.format == "ndjson");
  std::string err;
  const std::vector<Column> cols = {{"mu"}, {"mode", true}, {"ee_mbit_per_joule"},
                                    {"lambda_opt"}, {"M"}, {"K"}};
  std::vector<std::pair<std::string, std::string>> extras = {{"gamma", fmt(opt.gamma)}};
  if (a.single) {
    extras.push_back({"mu", fmt(a.mu_single)});
  } else {
    extras.push_back({"mu_min", fmt(a.mu_min)});
    extras.push_back({"mu_max", fmt(a.mu_max)});
    extras.push_back({"points", fmt(a.points)});
  }
  if (!out.open("sweep-ue-density", config_of(m.get()), seed_of(m.get()), cols, extras,
                &err))
    return fail(4, err);

  for (double mu : grid) {
    struct Mode {
      const char* name;
      int M, K;  // 0,0: jointly optimized
    };
    const Mode modes[] = {{"optimal", 0, 0}, {"simo_10_1", 10, 1}, {"mimo_91_10", 91, 10}};
    for (const Mode& mode : modes) {
      if (out.done_already()) continue;
      eeopt_optimum o{};
      eeopt_status st =
          mode.M == 0
              ? eeopt_optimize_fixed_ue_density(m.get(), mu, opt.gamma, &o)
              : eeopt_optimize_reference(m.get(), mu, mode.M, mode.K, opt.gamma, &o);
      if (st == EEOPT_INFEASIBLE) return infeasible_exit(m.get(), "sweep-ue-density");
      if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
      out.row({fmt(mu), mode.name, fmt(o.ee / 1e6), fmt(o.lambda), fmt(o.m), fmt(o.k)});
    }
  }
  return 0;
}

// -------------------------------------------------------------- mc-validate

struct McValidateArgs {
  std::vector<double> lambdas;
};

int run_mc_validate(const Options& opt, const McValidateArgs& a) {
  int code = 0;
  std::string msg;
  ModelPtr m = make_model(opt, &code, &msg);
  if (!m) return fail(code, msg);
  std::vector<double> lambdas = a.lambdas;
  if (lambdas.empty()) lambdas = {1.0, 10.0, 100.0};

  Emitter out(opt.out_path, opt.format == "ndjson");
  std::string err;
  const std::vector<Column> cols = {{"lambda"},     {"gamma"},      {"M"},
                                    {"K"},          {"beta"},       {"rho"},
                                    {"se_bound"},   {"se_mc_mean"}, {"se_mc_sem"},
                                    {"gap_percent"}, {"jensen_pass"}};
  std::string llist;
  for (size_t i = 0; i < lambdas.size(); ++i)
    llist += (i ? " " : "") + fmt(lambdas[i]);
  if (opt.format == "ndjson") llist = "\"" + json_escape(llist) + "\"";
  if (!out.open("mc-validate", config_of(m.get()), seed_of(m.get()), cols,
                {{"gamma", fmt(opt.gamma)}, {"lambdas", llist}}, &err))
    return fail(4, err);

  for (double lambda : lambdas) {
    if (out.done_already()) continue;
    eeopt_optimum o{};
    eeopt_status st = eeopt_optimize_at_density(m.get(), lambda, opt.gamma, &o);
    if (st == EEOPT_INFEASIBLE) return infeasible_exit(m.get(), "mc-validate");
    if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
    eeopt_point pt{o.beta, o.rho, lambda, 0, o.m, o.k};
    eeopt_mc_result mc{};
    st = eeopt_mc_average_se(m.get(), &pt, &mc);
    if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
    const double gap = 100.0 * (mc.mean - o.se) / o.se;
    const int jensen = o.se <= mc.mean + 2.0 * mc.sem ? 1 : 0;
    out.row({fmt(lambda), fmt(opt.gamma), fmt(o.m), fmt(o.k), fmt(o.beta), fmt(o.rho),
             fmt(o.se), fmt(mc.mean), fmt(mc.sem), fmt(gap), fmt(jensen)});
  }
  return 0;
}

// -------------------------------------------------------- validate-appendix

struct AppendixArgs {
  double lambda = 10.0;
  int K = 10;
  long samples = 1000000;  // channel-term sample count
};

int run_validate_appendix(const Options& opt, const AppendixArgs& a) {
  int code = 0;
  std::string msg;
  ModelPtr m = make_model(opt, &code, &msg);
  if (!m) return fail(code, msg);

  Emitter out(opt.out_path, opt.format == "ndjson");
  std::string err;
  const std::vector<Column> cols = {{"name", true}, {"closed_form"}, {"mc_estimate"},
                                    {"sem"},        {"pass"}};
  if (!out.open("validate-appendix", config_of(m.get()), seed_of(m.get()), cols,
                {{"lambda", fmt(a.lambda)},
                 {"K", fmt(a.K)},
                 {"samples", std::to_string(a.samples)}},
                &err))
    return fail(4, err);

  const double alpha_cfg = get_or_die(m.get(), "propagation.alpha");

  // Distance-ratio moments of the radial interference model, one UE slot.
  struct MomentRow {
    double alpha;
    int kappa;
  };
  const MomentRow moments[] = {{3.0, 1}, {alpha_cfg, 1}, {alpha_cfg, 2}};
  for (const MomentRow& mr : moments) {
    if (out.done_already()) continue;
    ModelPtr w = clone_model(m.get());
    if (!w) return fail(3, eeopt_last_error());
    if (eeopt_set(w.get(), "propagation.alpha", mr.alpha) != EEOPT_OK)
      return fail(3, eeopt_last_error());
    eeopt_mc_result mc{};
    eeopt_status st = eeopt_mc_distance_moment(w.get(), a.lambda, mr.kappa, 1, &mc);
    if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
    const double cf = 2.0 / (mr.kappa * mr.alpha - 2.0);
    const int pass = std::fabs(mc.mean - cf) <= 3.0 * mc.sem ? 1 : 0;
    std::ostringstream name;
    name << "moment_alpha" << fmt(mr.alpha) << "_kappa" << mr.kappa;
    out.row({name.str(), fmt(cf), fmt(mc.mean), fmt(mc.sem), fmt(pass)});
  }

  // Cross moments over the K UE slots: distinct-cell pairs are exact, the
  // same-cell term is an upper bound (one-sided).
  {
    eeopt_mc_result pair{}, same{};
    eeopt_status st = eeopt_mc_cross_moment(m.get(), a.lambda, a.K, &pair, &same);
    if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
    const double cf_pair = a.K * (2.0 / (alpha_cfg - 2.0)) * (2.0 / (alpha_cfg - 2.0));
    const double cf_same = a.K / (alpha_cfg - 1.0);
    if (!out.done_already()) {
      const int p = std::fabs(pair.mean - cf_pair) <= 3.0 * pair.sem ? 1 : 0;
      out.row({"pair_distinct", fmt(cf_pair), fmt(pair.mean), fmt(pair.sem), fmt(p)});
    }
    if (!out.done_already()) {
      const int p = same.mean <= cf_same + 3.0 * same.sem ? 1 : 0;
      out.row({"same_cell_upper", fmt(cf_same), fmt(same.mean), fmt(same.sem), fmt(p)});
    }
  }

  // Channel-level terms on a fixed three-cell geometry.
  {
    const int M = 4, K = 2, cells = 3;
    const double own[cells * K] = {0.9, 1.1, 0.8, 1.0, 1.2, 0.7};
    const double typ[cells * K] = {1.8, 2.2, 2.5, 2.8, 3.5, 3.1};
    eeopt_term_check terms[32];
    int n_terms = 0;
    double sinr_cf = 0, sinr_mc = 0;
    eeopt_status st = eeopt_validate_sinr_terms(
        m.get(), M, K, 2.0, 0.1, cells, own, typ, a.samples, seed_of(m.get()), terms,
        32, &n_terms, &sinr_cf, &sinr_mc);
    if (st != EEOPT_OK) return fail(code_of(st), eeopt_last_error());
    for (int i = 0; i < n_terms && i < 32; ++i) {
      if (out.done_already()) continue;
      const int pass =
          std::fabs(terms[i].estimate - terms[i].closed_form) <=
                  0.02 * std::fabs(terms[i].closed_form)
              ? 1
              : 0;
      out.row({terms[i].name, fmt(terms[i].closed_form), fmt(terms[i].estimate),
               fmt(terms[i].sem), fmt(pass)});
    }
    if (!out.done_already()) {
      const int pass = std::fabs(sinr_mc - sinr_cf) <= 0.02 * std::fabs(sinr_cf) ? 1 : 0;
      out.row({"effective_sinr", fmt(sinr_cf), fmt(sinr_mc), "", fmt(pass)});
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eeopt: energy-efficiency optimization and Monte Carlo validation "
               "for Poisson multi-antenna cellular networks"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "JSON config file")
      ->envname("EEOPT_CONFIG");
  app.add_option("--out", opt.out_path, "output file (default stdout); sweeps "
                                        "resume from a matching partial file");
  app.add_option("--format", opt.format, "csv or ndjson")
      ->check(CLI::IsMember({"csv", "ndjson"}));
  app.add_option("--seed", opt.seed, "Monte Carlo seed override");
  app.add_option("--trials", opt.trials, "Monte Carlo trial count override");
  app.add_option("--set", opt.sets, "config override as dotted.key=value (repeatable)");
  app.add_option("--S", opt.S, "coherence block length in symbols");
  app.add_option("--alpha", opt.alpha, "pathloss exponent");
  app.add_option("--epsilon", opt.epsilon, "hardware impairment level in [0,1)");
  auto* gamma_opt =
      app.add_option("--gamma", opt.gamma, "per-UE SINR target (default 3)");

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "SE/EE at one design point");
  c_ev->fallthrough();
  c_ev->add_option("--M", ev.M, "antennas per BS (default 91)");
  c_ev->add_option("--K", ev.K, "UEs per cell (default 10)");
  auto* ev_lambda = c_ev->add_option("--lambda", ev.lambda,
                                     "BS density per km^2 (absent: asymptotic)");
  auto* ev_rho = c_ev->add_option("--rho", ev.rho, "transmit energy scale, J/symbol");
  auto* ev_beta = c_ev->add_option("--beta", ev.beta,
                                   "evaluate at this pilot reuse instead of the "
                                   "gamma-target reuse");

  auto* c_opt = app.add_subcommand("optimize", "joint (beta, M, K) EE maximization "
                                               "in the dense limit");
  c_opt->fallthrough();

  DensityArgs da;
  auto* c_sd = app.add_subcommand("sweep-density", "EE and Monte Carlo SE across "
                                                   "BS densities");
  c_sd->fallthrough();
  c_sd->add_option("--lambda-min", da.lambda_min, "grid start (default 0.1)");
  c_sd->add_option("--lambda-max", da.lambda_max, "grid end (default 1000)");
  c_sd->add_option("--points", da.points, "log-grid size (default 20)");
  auto* sd_single = c_sd->add_option("--lambda", da.lambda_single, "single density");

  SurfaceArgs sa;
  auto* c_sf = app.add_subcommand("surface-mk", "EE over the (M, K) grid in the "
                                                "dense limit");
  c_sf->fallthrough();
  c_sf->add_option("--m-min", sa.m_min, "default 10");
  c_sf->add_option("--m-max", sa.m_max, "default 200");
  c_sf->add_option("--k-min", sa.k_min, "default 1");
  c_sf->add_option("--k-max", sa.k_max, "default 30");

  BreakdownArgs ba;
  auto* c_bd = app.add_subcommand("breakdown", "area power consumption split");
  c_bd->fallthrough();
  c_bd->add_option("--lambda", ba.lambda, "BS density (default 100)");
  c_bd->add_option("--M", ba.M, "override antennas (default: density optimum)");
  c_bd->add_option("--K", ba.K, "override UEs (default: density optimum)");

  ImpairArgs ia;
  auto* c_si = app.add_subcommand("sweep-impairments", "optimized EE across "
                                                       "impairment levels");
  c_si->fallthrough();
  c_si->add_option("--eps-min", ia.eps_min, "default 0");
  c_si->add_option("--eps-max", ia.eps_max, "default 0.2");
  c_si->add_option("--points", ia.points, "default 21");
  c_si->add_option("--gammas", ia.gammas, "SINR targets (default 1 3)");

  UeDensityArgs ua;
  auto* c_su = app.add_subcommand("sweep-ue-density", "EE under a fixed UE density "
                                                      "with lambda = mu/K");
  c_su->fallthrough();
  c_su->add_option("--mu-min", ua.mu_min, "default 1");
  c_su->add_option("--mu-max", ua.mu_max, "default 1e5");
  c_su->add_option("--points", ua.points, "default 21");
  auto* su_single = c_su->add_option("--mu", ua.mu_single, "single UE density");

  McValidateArgs mv;
  auto* c_mv = app.add_subcommand("mc-validate", "closed-form SE bound against "
                                                 "Monte Carlo");
  c_mv->fallthrough();
  c_mv->add_option("--lambdas", mv.lambdas, "densities (default 1 10 100)");

  AppendixArgs aa;
  auto* c_va = app.add_subcommand("validate-appendix", "distance-moment and "
                                                       "channel-term identities");
  c_va->fallthrough();
  c_va->add_option("--lambda", aa.lambda, "radial-model density (default 10)");
  c_va->add_option("--K", aa.K, "UE slots for the cross moments (default 10)");
  c_va->add_option("--samples", aa.samples, "channel-term samples (default 1e6)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    os << e.what();
    return fail(3, os.str());
  }
  opt.gamma_set = gamma_opt->count() > 0;
  ev.lambda_set = ev_lambda->count() > 0;
  ev.rho_set = ev_rho->count() > 0;
  ev.beta_set = ev_beta->count() > 0;
  da.single = sd_single->count() > 0;
  ua.single = su_single->count() > 0;

  if (c_ev->parsed()) return run_evaluate(opt, ev);
  if (c_opt->parsed()) return run_optimize(opt);
  if (c_sd->parsed()) return run_sweep_density(opt, da);
  if (c_sf->parsed()) return run_surface(opt, sa);
  if (c_bd->parsed()) return run_breakdown(opt, ba);
  if (c_si->parsed()) return run_sweep_impairments(opt, ia);
  if (c_su->parsed()) return run_sweep_ue_density(opt, ua);
  if (c_mv->parsed()) return run_mc_validate(opt, mv);
  if (c_va->parsed()) return run_validate_appendix(opt, aa);
  return fail(3, "no experiment selected");
}

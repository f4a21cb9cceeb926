#ifndef ANOMA_COMMANDS_HPP
#define ANOMA_COMMANDS_HPP

// Subcommand implementations behind the command-line tool. Each command
// resolves parameters, declares its outputs in a manifest, writes CSVs that
// reference the manifest, and returns a process exit code.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "anoma/analytic.hpp"
#include "anoma/config.hpp"
#include "anoma/jm_area.hpp"
#include "anoma/montecarlo.hpp"
#include "anoma/optimizer.hpp"
#include "anoma/spatial.hpp"

#ifndef ANOMA_DEFAULT_JM_CACHE
#define ANOMA_DEFAULT_JM_CACHE ""
#endif

namespace anoma {

inline constexpr const char* kVersion = "anoma 1.0.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitDiverged = 3, kExitBudget = 4 };

enum class Engine { analytic, mc, both };

inline Engine parse_engine(const std::string& s) {
  if (s == "analytic") return Engine::analytic;
  if (s == "mc") return Engine::mc;
  if (s == "both") return Engine::both;
  throw ParamError("unknown engine '" + s + "'");
}

inline Device parse_device(const std::string& s) {
  if (s == "mobile") return Device::mobile;
  if (s == "iot") return Device::iot;
  throw ParamError("unknown device '" + s + "'");
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "noma") return Scheme::noma;
  if (s == "oma") return Scheme::oma;
  throw ParamError("unknown scheme '" + s + "'");
}

/// Comma-separated list of numbers, e.g. "-10,-5,0".
inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw ParamError("bad number '" + item + "' in list '" + s + "'");
    }
    if (item.find_first_not_of(" \t", pos) != std::string::npos)
      throw ParamError("bad number '" + item + "' in list '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ParamError("empty list");
  return out;
}

struct CommonOptions {
  std::string config;
  std::uint64_t seed = 20210601;
  int threads = 1;
  std::string out = ".";
  std::string engine = "analytic";
  std::string beta_grid = "-10,-5,0,5,10";
  double budget = 0.0;  // seconds; 0 = unlimited
  long n_geo = 2000;
  std::string jm_cache = ANOMA_DEFAULT_JM_CACHE;
  long jm_cells = kDefaultJmCells;
  std::optional<double> eps_m, eps_t, eta, beta_t_db, beta_m_db;
};

/// Wall-clock budget; zero means unlimited.
class Budget {
 public:
  explicit Budget(double seconds) : seconds_(seconds), start_(std::chrono::steady_clock::now()) {}
  bool exceeded() const {
    if (seconds_ <= 0.0) return false;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count() >
           seconds_;
  }
  double seconds() const { return seconds_; }

 private:
  double seconds_;
  std::chrono::steady_clock::time_point start_;
};

/// Structured-text record of a run. Contains no timestamps, so identical
/// inputs give identical manifests.
class RunManifest {
 public:
  RunManifest(std::string subcommand, std::string dir)
      : subcommand_(std::move(subcommand)), dir_(std::move(dir)) {}

  std::string path() const { return (std::filesystem::path(dir_) / file_name()).string(); }
  std::string file_name() const { return subcommand_ + ".manifest.txt"; }

  void set(const std::string& key, const std::string& value) {
    for (auto& kv : fields_)
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    fields_.emplace_back(key, value);
  }
  void set(const std::string& key, double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    set(key, std::string(buf, res.ptr));
  }
  void declare_output(const std::string& name) { outputs_.push_back(name); }
  const std::vector<std::string>& outputs() const { return outputs_; }
  void set_params(const SystemParams& p) { params_ = to_config_text(p); }
  void set_status(const std::string& s) { status_ = s; }

  void write() const {
    std::filesystem::create_directories(dir_);
    std::ofstream os(path());
    os << "subcommand: " << subcommand_ << "\n";
    os << "engine_version: " << kVersion << "\n";
    for (const auto& [k, v] : fields_) os << k << ": " << v << "\n";
    os << "status: " << status_ << "\n";
    os << "outputs:\n";
    for (const auto& o : outputs_) os << "  - " << o << "\n";
    os << "params:\n";
    std::istringstream in(params_);
    std::string line;
    while (std::getline(in, line)) os << "  " << line << "\n";
  }

  /// Opens an output CSV (which must have been declared) and writes the
  /// manifest reference line.
  std::ofstream open_csv(const std::string& name) const {
    std::ofstream os((std::filesystem::path(dir_) / name).string());
    os << "# manifest: " << file_name() << "\n";
    os << std::setprecision(12);
    return os;
  }

 private:
  std::string subcommand_;
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> fields_;
  std::vector<std::string> outputs_;
  std::string params_;
  std::string status_ = "running";
};

/// Parameters from defaults, the config file and flag overrides.
inline SystemParams resolve_params(const CommonOptions& o) {
  RawParams raw = default_raw_params();
  if (!o.config.empty()) raw = load_config(o.config, raw);
  if (o.eps_m) raw.eps_m = *o.eps_m;
  if (o.eps_t) raw.eps_t = *o.eps_t;
  if (o.eta) raw.eta = *o.eta;
  if (o.beta_t_db) {
    raw.beta_t_db = *o.beta_t_db;
    raw.beta_t.reset();
  }
  if (o.beta_m_db) {
    raw.beta_m_db = *o.beta_m_db;
    raw.beta_m.reset();
  }
  return validate(raw);
}

inline double resolve_jm(const CommonOptions& o, const SystemParams& p, RunManifest& m) {
  double v = 0.0;
  if (p.inv_jm_area) {
    v = *p.inv_jm_area;
    m.set("inv_jm_area_source", "config");
  } else {
    JmAreaCache cache(o.jm_cache);
    v = resolve_inverse_jm_area(p, &cache, o.jm_cells, kDefaultJmSeed, {100000, o.threads});
    m.set("inv_jm_area_source", o.jm_cache.empty() ? "estimated" : "cache " + o.jm_cache);
  }
  m.set("inv_jm_area", v);
  return v;
}

inline void describe_common(RunManifest& m, const CommonOptions& o) {
  m.set("config", o.config.empty() ? "(defaults)" : o.config);
  m.set("seed", std::to_string(o.seed));
  m.set("engine", o.engine);
  m.set("threads_cap", std::to_string(o.threads));
  m.set("budget_seconds", o.budget);
  m.set("moment_rel_tol", kMomentTol);
  m.set("rate_rel_tol", kRateTol);
  m.set("ccdf_truncation", kCcdfTruncation);
  m.set("min_distance_m", kDefaultMinDistance);
}

/// Runs body(manifest, params, budget) with uniform error handling.
template <class Body>
int run_command(const std::string& name, const CommonOptions& o, Body&& body) {
  RunManifest m(name, o.out);
  SystemParams p;
  try {
    p = resolve_params(o);
    parse_engine(o.engine);
  } catch (const ParamError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  describe_common(m, o);
  m.set_params(p);
  Budget budget(o.budget);
  int code = kExitOk;
  try {
    code = body(m, p, budget);
  } catch (const ParamError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    m.set_status("failed: " + std::string(e.what()));
    m.write();
    return kExitConfig;
  }
  if (code == kExitBudget) m.set_status("incomplete: budget exceeded");
  else if (code == kExitDiverged) m.set_status("complete with divergence");
  else m.set_status("complete");
  m.write();
  return code;
}

inline std::string fmt_db(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// ---------------------------------------------------------------- moment

struct MomentOptions {
  std::string device = "mobile";
  std::string scheme = "noma";
  double b = 1.0;
};

inline int cmd_moment(const CommonOptions& o, const MomentOptions& mo) {
  return run_command("moment", o, [&](RunManifest& m, const SystemParams& p, const Budget& budget) {
    const Device d = parse_device(mo.device);
    const Scheme sc = parse_scheme(mo.scheme);
    const Engine en = parse_engine(o.engine);
    const auto betas = parse_list(o.beta_grid);
    for (std::size_t i = 1; i < betas.size(); ++i)
      if (!(betas[i] > betas[i - 1])) throw ParamError("beta grid must be strictly increasing");
    const std::string file = std::string("moment_") + to_string(d) + "_" + to_string(sc) + ".csv";
    m.declare_output(file);
    m.set("device", to_string(d));
    m.set("scheme", to_string(sc));
    m.set("b", mo.b);
    m.set("beta_grid_db", o.beta_grid);
    if (en != Engine::analytic) m.set("n_geo", std::to_string(o.n_geo));
    m.write();

    const double V = resolve_jm(o, p, m);
    const AnalyticEngine eng(p, V);
    const PowerControl pc{p.eps_m, p.eps_t};
    std::optional<SnapshotBatch> batch;
    if (en != Engine::analytic) batch.emplace(p, o.n_geo, o.seed, o.threads);

    auto os = m.open_csv(file);
    if (en == Engine::analytic) os << "beta_db,value,abs_error,status\n";
    else if (en == Engine::mc)
      os << "beta_db,estimate,std_error,n_samples,estimator_kind,scheme,device\n";
    else os << "beta_db,analytic,abs_error,status,estimate,std_error,n_samples,rel_diff\n";
    bool diverged = false;
    for (double db : betas) {
      if (budget.exceeded()) return static_cast<int>(kExitBudget);
      const double beta = db_to_linear(db);
      os << db;
      if (en != Engine::mc) {
        const MomentResult a = eng.moment(d, sc, mo.b, beta, pc);
        diverged |= a.status == QuadStatus::diverged;
        os << "," << a.value << "," << a.abs_error_est << "," << to_string(a.status);
        if (en == Engine::both) {
          const auto e = empirical_moment(*batch, mo.b, beta, d, sc, p, o.threads);
          os << "," << e.value << "," << e.std_error << "," << e.n_samples << ","
             << (e.value - a.value) / a.value;
        }
      } else {
        const auto e = empirical_moment(*batch, mo.b, beta, d, sc, p, o.threads);
        os << "," << e.value << "," << e.std_error << "," << e.n_samples << ","
           << to_string(e.kind) << "," << to_string(sc) << "," << to_string(d);
      }
      os << "\n";
    }
    return static_cast<int>(diverged ? kExitDiverged : kExitOk);
  });
}

// ------------------------------------------------------------------ rate

inline int cmd_rate(const CommonOptions& o, const std::string& scheme) {
  return run_command("rate", o, [&](RunManifest& m, const SystemParams& p, const Budget& budget) {
    const Engine en = parse_engine(o.engine);
    std::vector<Scheme> schemes;
    if (scheme == "both") schemes = {Scheme::noma, Scheme::oma};
    else schemes = {parse_scheme(scheme)};
    m.declare_output("rate.csv");
    if (en != Engine::analytic) m.set("n_geo", std::to_string(o.n_geo));
    m.write();
    const double V = resolve_jm(o, p, m);
    const AnalyticEngine eng(p, V);
    const PowerControl pc{p.eps_m, p.eps_t};
    std::optional<SnapshotBatch> batch;
    if (en != Engine::analytic) batch.emplace(p, o.n_geo, o.seed, o.threads);

    auto os = m.open_csv("rate.csv");
    os << "scheme,engine,eps_m,eps_t,eta,rate,error,gamma_max,tail_bound,status\n";
    for (Scheme sc : schemes) {
      const double eta = sc == Scheme::oma ? p.eta : 1.0;
      if (en != Engine::mc) {
        if (budget.exceeded()) return static_cast<int>(kExitBudget);
        const RateResult r = eng.ergodic_rate(sc, pc, eta);
        os << to_string(sc) << ",analytic," << p.eps_m << "," << p.eps_t << "," << eta << ","
           << r.value << "," << r.abs_error << "," << r.gamma_max << "," << r.tail_bound << ","
           << to_string(r.status) << "\n";
      }
      if (en != Engine::analytic) {
        if (budget.exceeded()) return static_cast<int>(kExitBudget);
        const auto e = empirical_rate(*batch, sc, p, kDefaultFadingDraws, o.threads);
        os << to_string(sc) << ",mc," << p.eps_m << "," << p.eps_t << "," << eta << ","
           << e.value << "," << e.std_error << ",,," << "ok\n";
      }
    }
    return static_cast<int>(kExitOk);
  });
}

// ----------------------------------------------------------------- delay

struct DelayOptions {
  std::string scheme = "noma";
  std::string eta_grid;  // OMA sweep; empty = config eta
};

inline int cmd_delay(const CommonOptions& o, const DelayOptions& dopt) {
  return run_command("delay", o, [&](RunManifest& m, const SystemParams& p, const Budget& budget) {
    const Engine en = parse_engine(o.engine);
    std::vector<Scheme> schemes;
    if (dopt.scheme == "both") schemes = {Scheme::noma, Scheme::oma};
    else schemes = {parse_scheme(dopt.scheme)};
    std::vector<double> etas = {p.eta};
    if (!dopt.eta_grid.empty()) etas = parse_list(dopt.eta_grid);
    for (double e : etas)
      if (!(e > 0.0 && e < 1.0)) throw ParamError("eta must lie in (0, 1)");
    const auto betas = parse_list(o.beta_grid);
    m.declare_output("delay.csv");
    m.set("beta_t_grid_db", o.beta_grid);
    if (en != Engine::analytic) m.set("n_geo", std::to_string(o.n_geo));
    m.write();
    const double V = resolve_jm(o, p, m);
    const AnalyticEngine eng(p, V);
    const PowerControl pc{p.eps_m, p.eps_t};
    std::optional<SnapshotBatch> batch;
    if (en != Engine::analytic) batch.emplace(p, o.n_geo, o.seed, o.threads);

    auto os = m.open_csv("delay.csv");
    os << "beta_t_db,scheme,eps_m,eps_t,eta,engine,delay,error,status\n";
    bool diverged = false;
    for (Scheme sc : schemes) {
      const std::vector<double> sweep = sc == Scheme::oma ? etas : std::vector<double>{0.0};
      for (double eta : sweep)
        for (double db : betas) {
          if (budget.exceeded()) return static_cast<int>(kExitBudget);
          const double bt = db_to_linear(db);
          auto head = [&](const char* engine) {
            os << db << "," << to_string(sc) << "," << p.eps_m << "," << p.eps_t << ",";
            if (sc == Scheme::oma) os << eta;
            os << "," << engine << ",";
          };
          if (en != Engine::mc) {
            const MomentResult r = eng.mean_local_delay(sc, bt, pc, eta);
            diverged |= r.status == QuadStatus::diverged;
            head("analytic");
            os << r.value << "," << r.abs_error_est << "," << to_string(r.status) << "\n";
          }
          if (en != Engine::analytic) {
            SystemParams q = p;
            q.eta = sc == Scheme::oma ? eta : p.eta;
            const DelayEstimate d = empirical_local_delay(*batch, sc, q, bt, o.threads);
            const char* flag = d.heavy_tail_warning ? "heavy-tail-warning" : "ok";
            head("mc-harmonic");
            os << d.harmonic.value << "," << d.harmonic.std_error << "," << flag << "\n";
            head("mc-bernoulli");
            os << d.bernoulli.value << "," << d.bernoulli.std_error << "," << flag << "\n";
          }
        }
    }
    return static_cast<int>(diverged ? kExitDiverged : kExitOk);
  });
}

// -------------------------------------------------------------- optimize

struct OptimizeOptions {
  std::string scheme = "both";
  double tau = 0.0;  // 0 = config tau
  double grid_res = 0.05;
};

inline void write_outcome_row(std::ostream& os, double tau, const OptimizationOutcome& r) {
  os << tau << "," << to_string(r.scheme) << "," << r.eps_m << "," << r.eps_t << ",";
  if (r.scheme == Scheme::oma) os << r.eta;
  os << "," << r.rate_at_opt << "," << r.delay_at_opt << "," << (r.feasible ? 1 : 0) << ","
     << r.grid_resolution << "," << r.evaluations << "\n";
}

inline constexpr const char* kOutcomeHeader =
    "tau,scheme,eps_m,eps_t,eta,rate,delay,feasible,grid_resolution,evaluations\n";

inline int cmd_optimize(const CommonOptions& o, const OptimizeOptions& oo) {
  return run_command("optimize", o, [&](RunManifest& m, const SystemParams& p,
                                        const Budget& budget) {
    std::vector<Scheme> schemes;
    if (oo.scheme == "both") schemes = {Scheme::noma, Scheme::oma};
    else schemes = {parse_scheme(oo.scheme)};
    const double tau = oo.tau > 0.0 ? oo.tau : p.tau;
    if (!(tau >= 1.0)) throw ParamError("tau must be at least 1");
    m.set("tau", tau);
    m.set("grid_res", oo.grid_res);
    m.declare_output("optimize.csv");
    for (Scheme sc : schemes) m.declare_output(std::string("trace_") + to_string(sc) + ".csv");
    m.write();
    const double V = resolve_jm(o, p, m);
    const AnalyticEngine eng(p, V);

    auto os = m.open_csv("optimize.csv");
    os << kOutcomeHeader;
    for (Scheme sc : schemes) {
      if (budget.exceeded()) return static_cast<int>(kExitBudget);
      std::vector<TracePoint> trace;
      const auto r = sc == Scheme::noma ? optimize_noma(eng, tau, oo.grid_res, o.threads, &trace)
                                        : optimize_oma(eng, tau, oo.grid_res, o.threads, &trace);
      write_outcome_row(os, tau, r);
      auto ts = m.open_csv(std::string("trace_") + to_string(sc) + ".csv");
      write_csv(ts, trace);
    }
    return static_cast<int>(kExitOk);
  });
}

// ------------------------------------------------------------- reproduce

inline constexpr PowerControl kLeftConfigs[] = {{0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}, {0.5, 1.0}};

inline int reproduce_left(RunManifest& m, const CommonOptions& o, const SystemParams& p,
                          const Budget& budget) {
  const auto betas = parse_list(o.beta_grid);
  m.set("beta_grid_db", o.beta_grid);
  m.set("n_geo", std::to_string(o.n_geo));
  m.declare_output("left_m1.csv");
  m.write();
  const double V = resolve_jm(o, p, m);
  const AnalyticEngine eng(p, V);
  const SnapshotBatch batch(p, o.n_geo, o.seed, o.threads);
  auto os = m.open_csv("left_m1.csv");
  os << "eps_m,eps_t,device,beta_db,analytic,abs_error,status,mc,std_error,n_samples,rel_diff\n";
  for (PowerControl pc : kLeftConfigs) {
    const SystemParams q = with_power(p, pc);
    for (Device d : {Device::mobile, Device::iot})
      for (double db : betas) {
        if (budget.exceeded()) return kExitBudget;
        const double beta = db_to_linear(db);
        const auto a = eng.moment(d, Scheme::noma, 1.0, beta, pc);
        const auto e = empirical_moment(batch, 1.0, beta, d, Scheme::noma, q, o.threads);
        os << pc.eps_m << "," << pc.eps_t << "," << to_string(d) << "," << db << "," << a.value
           << "," << a.abs_error_est << "," << to_string(a.status) << "," << e.value << ","
           << e.std_error << "," << e.n_samples << "," << (e.value - a.value) / a.value << "\n";
      }
  }
  return kExitOk;
}

inline int reproduce_middle(RunManifest& m, const CommonOptions& o, const SystemParams& p,
                            const Budget& budget, double grid_res) {
  m.set("taus", "2,10");
  m.set("grid_res", grid_res);
  for (const char* f : {"middle_optimal.csv", "middle_rate_ccdf.csv", "trace_noma_tau2.csv",
                        "trace_oma_tau2.csv", "trace_noma_tau10.csv", "trace_oma_tau10.csv"})
    m.declare_output(f);
  m.write();
  const double V = resolve_jm(o, p, m);
  const AnalyticEngine eng(p, V);
  auto opt = m.open_csv("middle_optimal.csv");
  opt << kOutcomeHeader;
  auto cc = m.open_csv("middle_rate_ccdf.csv");
  cc << "tau,scheme,rate_threshold,ccdf\n";
  for (double tau : {2.0, 10.0}) {
    for (Scheme sc : {Scheme::noma, Scheme::oma}) {
      if (budget.exceeded()) return kExitBudget;
      std::vector<TracePoint> trace;
      const auto r = sc == Scheme::noma ? optimize_noma(eng, tau, grid_res, o.threads, &trace)
                                        : optimize_oma(eng, tau, grid_res, o.threads, &trace);
      write_outcome_row(opt, tau, r);
      std::ostringstream tn;
      tn << "trace_" << to_string(sc) << "_tau" << tau << ".csv";
      auto ts = m.open_csv(tn.str());
      write_csv(ts, trace);
      if (!r.feasible) continue;
      // Rate distribution P(rate > x): rate = log2(1 + SIR), times eta under OMA.
      const double eta = sc == Scheme::oma ? r.eta : 1.0;
      for (int i = 0; i <= 40; ++i) {
        const double x = 0.25 * i;
        const double g = std::exp2(x / eta) - 1.0;
        const double v = x == 0.0 ? 1.0 : eng.ccdf_mobile(g, sc, {r.eps_m, r.eps_t}).value;
        cc << tau << "," << to_string(sc) << "," << x << "," << v << "\n";
      }
    }
  }
  return kExitOk;
}

inline int reproduce_right(RunManifest& m, const CommonOptions& o, const SystemParams& p,
                           const Budget& budget) {
  m.declare_output("right_delay.csv");
  m.write();
  const double V = resolve_jm(o, p, m);
  const AnalyticEngine eng(p, V);
  auto os = m.open_csv("right_delay.csv");
  os << "beta_t_db,scheme,eps_m,eps_t,eta,delay,abs_error,status\n";
  bool diverged = false;
  auto row = [&](double db, Scheme sc, PowerControl pc, double eta) {
    const auto r = eng.mean_local_delay(sc, db_to_linear(db), pc, eta);
    diverged |= r.status == QuadStatus::diverged;
    os << db << "," << to_string(sc) << "," << pc.eps_m << "," << pc.eps_t << ",";
    if (sc == Scheme::oma) os << eta;
    os << "," << r.value << "," << r.abs_error_est << "," << to_string(r.status) << "\n";
  };
  std::vector<double> betas;
  for (int db = -10; db <= 10; ++db) betas.push_back(db);
  for (double et : {1.0, 0.75})
    for (double em : {0.0, 0.25, 0.5, 0.75, 1.0})
      for (double db : betas) {
        if (budget.exceeded()) return kExitBudget;
        row(db, Scheme::noma, {em, et}, 0.0);
      }
  for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (double db : betas) {
      if (budget.exceeded()) return kExitBudget;
      row(db, Scheme::oma, {0.0, 1.0}, eta);
    }
  return diverged ? kExitDiverged : kExitOk;
}

inline int cmd_reproduce(const CommonOptions& o, const std::string& figure,
                         double grid_res = 0.05) {
  if (figure != "left" && figure != "middle" && figure != "right") {
    std::cerr << "config error: figure must be left, middle or right\n";
    return kExitConfig;
  }
  return run_command("reproduce_" + figure, o,
                     [&](RunManifest& m, const SystemParams& p, const Budget& budget) {
                       m.set("figure", figure);
                       if (figure == "left") return reproduce_left(m, o, p, budget);
                       if (figure == "middle") return reproduce_middle(m, o, p, budget, grid_res);
                       return reproduce_right(m, o, p, budget);
                     });
}

// ------------------------------------------------------------ jm-area, snapshot

inline int cmd_jm_area(const CommonOptions& o, long cells, int test_points) {
  return run_command("jm_area", o, [&](RunManifest& m, const SystemParams& p, const Budget&) {
    m.declare_output("jm_area.csv");
    m.set("cells", std::to_string(cells));
    m.set("test_points", std::to_string(test_points));
    m.write();
    JmAreaCache cache(o.jm_cache);
    const auto e = cache.get_or_estimate(p.lambda_b, p.L, cells, o.seed, {test_points, o.threads});
    auto os = m.open_csv("jm_area.csv");
    os << "lambda_b,L,lambda_b_L2,inv_jm_area,psi,ci_half_width,n_samples,seed\n";
    os << p.lambda_b << "," << p.L << "," << p.lambda_b * p.L * p.L << "," << e.value << ","
       << e.value / p.lambda_b << "," << e.ci_half_width << "," << e.n_samples << "," << e.seed
       << "\n";
    return static_cast<int>(kExitOk);
  });
}

inline int cmd_snapshot(const CommonOptions& o) {
  return run_command("snapshot", o, [&](RunManifest& m, const SystemParams& p, const Budget&) {
    m.declare_output("snapshot.csv");
    m.write();
    const auto s = build_snapshot(p, o.seed);
    m.set("bs_count", std::to_string(s.bs_points.size()));
    m.set("clamped_distances", std::to_string(s.clamped));
    auto os = m.open_csv("snapshot.csv");
    write_snapshot_csv(os, s);
    return static_cast<int>(kExitOk);
  });
}

}  // namespace anoma

#endif  // ANOMA_COMMANDS_HPP

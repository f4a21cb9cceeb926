#ifndef ANOMA_OPTIMIZER_HPP
#define ANOMA_OPTIMIZER_HPP

// Rate maximization under a mean-local-delay cap, by grid search over the
// power-control fractions (and the OMA time share) with one refinement pass
// at half resolution around the incumbent.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "anoma/analytic.hpp"
#include "anoma/montecarlo.hpp"

namespace anoma {

struct OptimizationOutcome {
  Scheme scheme = Scheme::noma;
  double eps_m = 0.0;
  double eps_t = 0.0;
  double eta = 0.0;  // OMA time share of the mobile user; unused for NOMA
  double rate_at_opt = 0.0;
  double delay_at_opt = std::numeric_limits<double>::infinity();
  bool feasible = false;
  double grid_resolution = 0.05;
  long evaluations = 0;
};

struct TracePoint {
  double eps_m = 0.0;
  double eps_t = 0.0;
  double eta = std::numeric_limits<double>::quiet_NaN();
  double rate = std::numeric_limits<double>::quiet_NaN();  // NaN when not evaluated
  double delay = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

inline void write_csv(std::ostream& os, const std::vector<TracePoint>& trace) {
  os << "eps_m,eps_t,eta,rate,delay,feasible\n";
  os.precision(12);
  for (const auto& t : trace)
    os << t.eps_m << "," << t.eps_t << "," << t.eta << "," << t.rate << "," << t.delay << ","
       << (t.feasible ? 1 : 0) << "\n";
}

/// Delay slack used when testing the constraint.
inline constexpr double kDelaySlack = 1e-9;

namespace detail {

inline std::vector<double> unit_grid(double res) {
  const int n = static_cast<int>(std::lround(1.0 / res));
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) g.push_back(std::min(1.0, i * res));
  if (g.back() < 1.0) g.push_back(1.0);
  return g;
}

/// Candidate A beats incumbent B: higher rate, ties broken toward the
/// lexicographically smaller (eps_m, eps_t, eta).
inline bool better(const TracePoint& a, const TracePoint& b) {
  if (!a.feasible) return false;
  if (!b.feasible) return true;
  if (a.rate != b.rate) return a.rate > b.rate;
  if (a.eps_m != b.eps_m) return a.eps_m < b.eps_m;
  if (a.eps_t != b.eps_t) return a.eps_t < b.eps_t;
  return a.eta < b.eta;
}

inline void check_resolution(double res) {
  if (!(res >= 0.01 && res <= 0.25)) throw ParamError("grid_res must lie in [0.01, 0.25]");
}

inline std::vector<PowerControl> refinement_points(PowerControl c, double h) {
  std::vector<PowerControl> out;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      if (i == 0 && j == 0) continue;
      const double em = c.eps_m + i * h, et = c.eps_t + j * h;
      if (em < 0.0 || em > 1.0 || et < 0.0 || et > 1.0) continue;
      out.push_back({em, et});
    }
  return out;
}

template <class Eval>
OptimizationOutcome run_grid(Scheme sc, double res, int threads, std::vector<TracePoint>* trace,
                             Eval&& eval) {
  std::vector<PowerControl> pts;
  for (double em : unit_grid(res))
    for (double et : unit_grid(res)) pts.push_back({em, et});

  std::vector<std::vector<TracePoint>> slots;
  auto evaluate = [&](const std::vector<PowerControl>& batch) {
    slots.assign(batch.size(), {});
    parallel_for(static_cast<long>(batch.size()), threads,
                 [&](long k) { slots[k] = eval(batch[k]); });
  };

  OptimizationOutcome out;
  out.scheme = sc;
  out.grid_resolution = res;
  TracePoint best;
  TracePoint min_delay;
  auto absorb = [&] {
    // Each slot holds the evaluated points of one (eps_m, eps_t); the last
    // one is the candidate for that pair.
    for (const auto& s : slots) {
      out.evaluations += static_cast<long>(s.size());
      if (trace) trace->insert(trace->end(), s.begin(), s.end());
      if (s.empty()) continue;
      const TracePoint& c = s.back();
      if (better(c, best)) best = c;
      for (const auto& t : s)
        if (t.delay < min_delay.delay) min_delay = t;
    }
  };

  evaluate(pts);
  absorb();
  if (best.feasible) {
    evaluate(refinement_points({best.eps_m, best.eps_t}, 0.5 * res));
    absorb();
  }

  const TracePoint& r = best.feasible ? best : min_delay;
  out.feasible = best.feasible;
  out.eps_m = r.eps_m;
  out.eps_t = r.eps_t;
  out.eta = r.eta;
  out.rate_at_opt = r.rate;
  out.delay_at_opt = r.delay;
  return out;
}

}  // namespace detail

/// max over (eps_m, eps_t) of the NOMA mobile ergodic rate subject to the
/// NOMA IoT mean local delay <= tau. Infeasible or divergent points are
/// skipped without evaluating their rate.
inline OptimizationOutcome optimize_noma(const AnalyticEngine& e, double tau, double grid_res,
                                         int threads = 1,
                                         std::vector<TracePoint>* trace = nullptr) {
  detail::check_resolution(grid_res);
  const double beta_t = e.params().beta_t;
  return detail::run_grid(Scheme::noma, grid_res, threads, trace, [&](PowerControl pc) {
    TracePoint t{pc.eps_m, pc.eps_t};
    const MomentResult d = e.mean_local_delay(Scheme::noma, beta_t, pc, 0.0);
    t.delay = d.value;
    t.feasible = d.converged() && d.value <= tau + kDelaySlack;
    if (t.feasible) t.rate = e.ergodic_rate(Scheme::noma, pc, 1.0).value;
    return std::vector<TracePoint>{t};
  });
}

/// Index of the largest feasible eta on the grid {res, 2 res, ..., 1 - res}
/// for an OMA point with eta-free delay d (delay(eta) = d / (1 - eta)), or -1.
inline int largest_feasible_eta_index(double d, double tau, int n_eta, double res,
                                      std::vector<int>* probed = nullptr) {
  auto ok = [&](int k) {
    if (probed) probed->push_back(k);
    return d / (1.0 - (k + 1) * res) <= tau + kDelaySlack;
  };
  if (!std::isfinite(d) || !ok(0)) return -1;
  int lo = 0, hi = n_eta;  // ok(lo), !ok(hi) with hi virtual
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// max over (eta, eps_m, eps_t) of eta times the OMA mobile rate subject to
/// M~_{-1} / (1 - eta) <= tau, eta on {res, ..., 1 - res}. Both objective and
/// delay grow with eta, so the largest feasible eta is found by bisection.
inline OptimizationOutcome optimize_oma(const AnalyticEngine& e, double tau, double grid_res,
                                        int threads = 1,
                                        std::vector<TracePoint>* trace = nullptr) {
  detail::check_resolution(grid_res);
  const double beta_t = e.params().beta_t;
  const int n_eta = static_cast<int>(std::lround(1.0 / grid_res)) - 1;
  return detail::run_grid(Scheme::oma, grid_res, threads, trace, [&](PowerControl pc) {
    std::vector<TracePoint> rows;
    const MomentResult m = e.moment(Device::iot, Scheme::oma, -1.0, beta_t, pc);
    const double d = m.converged() ? m.value : std::numeric_limits<double>::infinity();
    std::vector<int> probed;
    const int k = largest_feasible_eta_index(d, tau, n_eta, grid_res, &probed);
    const double unit = k >= 0 ? e.ergodic_rate(Scheme::oma, pc, 1.0).value
                               : std::numeric_limits<double>::quiet_NaN();
    for (int j : probed) {
      if (j == k) continue;
      TracePoint t{pc.eps_m, pc.eps_t, (j + 1) * grid_res};
      t.delay = d / (1.0 - t.eta);
      t.feasible = t.delay <= tau + kDelaySlack;
      if (t.feasible) t.rate = t.eta * unit;
      rows.push_back(t);
    }
    TracePoint best{pc.eps_m, pc.eps_t, (std::max(k, 0) + 1) * grid_res};
    best.delay = d / (1.0 - best.eta);
    if (k >= 0) {
      best.feasible = true;
      best.rate = best.eta * unit;
    }
    rows.push_back(best);
    return rows;
  });
}

/// Largest beta_t (dB, within tol_db) in [lo_db, hi_db] whose delay is at
/// most tau, by bisection; the delay is nondecreasing in beta_t. Returns
/// -inf when even lo_db is infeasible.
template <class Delay>
double max_feasible_beta_db(Delay&& delay, double tau, double lo_db = -30.0, double hi_db = 30.0,
                            double tol_db = 1e-3) {
  auto ok = [&](double db) {
    const double d = delay(db_to_linear(db));
    return std::isfinite(d) && d <= tau + kDelaySlack;
  };
  if (!ok(lo_db)) return -std::numeric_limits<double>::infinity();
  if (ok(hi_db)) return hi_db;
  while (hi_db - lo_db > tol_db) {
    const double mid = 0.5 * (lo_db + hi_db);
    (ok(mid) ? lo_db : hi_db) = mid;
  }
  return lo_db;
}

}  // namespace anoma

#endif  // ANOMA_OPTIMIZER_HPP

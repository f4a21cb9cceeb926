#ifndef ANOMA_MONTECARLO_HPP
#define ANOMA_MONTECARLO_HPP

// Simulation engine: closed-form conditional success probabilities on
// snapshots, empirical moments / meta-CCDF / rate / delay, and the
// brute-force oracles (fading draws, inhomogeneous-PPP PGFL).
//
// Geometry is shared: snapshot k of a batch is built from substream k of the
// master seed, and every estimate is a sequential sum over per-snapshot
// values, so results do not depend on the number of workers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "anoma/analytic.hpp"
#include "anoma/config.hpp"
#include "anoma/distributions.hpp"
#include "anoma/rng.hpp"
#include "anoma/spatial.hpp"

namespace anoma {

enum class EstimatorKind { moment_b, ccdf, rate, delay, meta_ccdf_at_x };

inline const char* to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::moment_b: return "moment-b";
    case EstimatorKind::ccdf: return "ccdf";
    case EstimatorKind::rate: return "rate";
    case EstimatorKind::delay: return "delay";
    case EstimatorKind::meta_ccdf_at_x: return "meta-ccdf-at-x";
  }
  return "unknown";
}

struct EmpiricalEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  EstimatorKind kind = EstimatorKind::moment_b;
  bool heavy_tail = false;  // sample kurtosis suggests an infinite-variance mean
};

/// Mean and standard error of a sample, summed in index order.
inline EmpiricalEstimate summarize(const std::vector<double>& x, EstimatorKind kind) {
  EmpiricalEstimate e;
  e.kind = kind;
  e.n_samples = static_cast<long>(x.size());
  if (x.empty()) return e;
  double sum = 0.0;
  for (double v : x) sum += v;
  e.value = sum / x.size();
  if (x.size() < 2) return e;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - e.value) * (v - e.value);
    m2 += d;
    m4 += d * d;
  }
  e.std_error = std::sqrt(m2 / (x.size() - 1) / x.size());
  m2 /= x.size();
  m4 /= x.size();
  // Excess kurtosis far above any light-tailed law.
  if (m2 > 0.0 && m4 / (m2 * m2) - 3.0 > 100.0) e.heavy_tail = true;
  if (!std::isfinite(e.value)) e.heavy_tail = true;
  return e;
}

/// Params with the power-control fractions replaced.
inline SystemParams with_power(SystemParams p, PowerControl pc) {
  p.eps_m = pc.eps_m;
  p.eps_t = pc.eps_t;
  return p;
}

namespace detail {

inline double log1p_sum(const std::vector<InterfererLink>& links, double s, double rho,
                        double alpha, double eps, double rmin) {
  double acc = 0.0;
  for (const auto& l : links)
    acc += std::log1p(s * rho * std::pow(detail::clampd(l.R, rmin), alpha * eps) *
                      std::pow(detail::clampd(l.D, rmin), -alpha));
  return acc;
}

}  // namespace detail

/// ln of the conditional success probability of the typical device given the
/// snapshot geometry (Rayleigh fading averaged out in closed form).
inline double log_conditional_success(const NetworkSnapshot& snap, Device d, Scheme sc,
                                      double beta, const SystemParams& p) {
  const double rmin = p.min_distance;
  const double a = p.alpha;
  if (d == Device::mobile) {
    const double s = beta / p.rho_m * std::pow(detail::clampd(snap.R_m, rmin), a * (1.0 - p.eps_m));
    double acc = detail::log1p_sum(snap.interferers_mobile, s, p.rho_m, a, p.eps_m, rmin);
    if (sc == Scheme::noma) {
      acc += std::log1p(s * p.rho_t * std::pow(detail::clampd(snap.R_t, rmin), a * (p.eps_t - 1.0)));
      acc += detail::log1p_sum(snap.interferers_iot, s, p.rho_t, a, p.eps_t, rmin);
    }
    return -acc;
  }
  const double s = beta / p.rho_t * std::pow(detail::clampd(snap.R_t, rmin), a * (1.0 - p.eps_t));
  double acc = detail::log1p_sum(snap.interferers_iot, s, p.rho_t, a, p.eps_t, rmin);
  if (sc == Scheme::noma)
    acc += detail::log1p_sum(snap.interferers_mobile, s, p.rho_m, a, p.eps_m, rmin);
  return -acc;
}

inline double conditional_success(const NetworkSnapshot& snap, Device d, Scheme sc, double beta,
                                  const SystemParams& p) {
  return std::exp(log_conditional_success(snap, d, sc, beta, p));
}

inline double conditional_success_mobile(const NetworkSnapshot& snap, double beta_m,
                                         const SystemParams& p) {
  return conditional_success(snap, Device::mobile, Scheme::noma, beta_m, p);
}

inline double conditional_success_mobile_oma(const NetworkSnapshot& snap, double beta_m,
                                             const SystemParams& p) {
  return conditional_success(snap, Device::mobile, Scheme::oma, beta_m, p);
}

inline double conditional_success_iot(const NetworkSnapshot& snap, double beta_t,
                                      const SystemParams& p) {
  return conditional_success(snap, Device::iot, Scheme::noma, beta_t, p);
}

inline double conditional_success_iot_oma(const NetworkSnapshot& snap, double beta_t,
                                          const SystemParams& p) {
  return conditional_success(snap, Device::iot, Scheme::oma, beta_t, p);
}

/// SIR of the typical device for one fading draw. The IoT signal is decoded
/// after the mobile signal has been cancelled.
inline double sir(const NetworkSnapshot& snap, const FadingDraw& f, Device d, Scheme sc,
                  const SystemParams& p) {
  const double rmin = p.min_distance;
  const double a = p.alpha;
  auto inter = [&](const std::vector<InterfererLink>& links, const std::vector<double>& h,
                   double rho, double eps) {
    double acc = 0.0;
    for (std::size_t i = 0; i < links.size(); ++i)
      acc += rho * std::pow(detail::clampd(links[i].R, rmin), a * eps) * h[i] *
             std::pow(detail::clampd(links[i].D, rmin), -a);
    return acc;
  };
  const double own_m = p.rho_m * std::pow(detail::clampd(snap.R_m, rmin), a * (p.eps_m - 1.0));
  const double own_t = p.rho_t * std::pow(detail::clampd(snap.R_t, rmin), a * (p.eps_t - 1.0));
  double denom = 0.0;
  if (d == Device::mobile) {
    denom = inter(snap.interferers_mobile, f.h_xm, p.rho_m, p.eps_m);
    if (sc == Scheme::noma)
      denom += own_t * f.h_t + inter(snap.interferers_iot, f.h_xt, p.rho_t, p.eps_t);
    return own_m * f.h_m / denom;
  }
  denom = inter(snap.interferers_iot, f.h_xt, p.rho_t, p.eps_t);
  if (sc == Scheme::noma) denom += inter(snap.interferers_mobile, f.h_xm, p.rho_m, p.eps_m);
  return own_t * f.h_t / denom;
}

/// Fading-draw oracle: fraction of n_draws independent fading realizations on
/// a fixed snapshot with SIR > beta.
inline EmpiricalEstimate fading_success_frequency(const NetworkSnapshot& snap, Device d, Scheme sc,
                                                  double beta, const SystemParams& p, long n_draws,
                                                  std::uint64_t seed) {
  Rng rng = make_rng(seed, 0, 4);
  long hits = 0;
  for (long k = 0; k < n_draws; ++k) hits += sir(snap, draw_fading(snap, rng), d, sc, p) > beta;
  EmpiricalEstimate e;
  e.kind = EstimatorKind::ccdf;
  e.n_samples = n_draws;
  e.value = static_cast<double>(hits) / n_draws;
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / n_draws);
  return e;
}

/// Runs f(k) for k in [0, n) on up to `threads` workers; f writes only slot k.
template <class F>
void parallel_for(long n, int threads, F&& f) {
  const int workers = static_cast<int>(std::max(1L, std::min<long>(threads, n)));
  if (workers == 1) {
    for (long k = 0; k < n; ++k) f(k);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (long k = w; k < n; k += workers) f(k);
    });
  for (auto& t : pool) t.join();
}

/// n_geo independent geometries drawn from substreams of master_seed.
class SnapshotBatch {
 public:
  SnapshotBatch(const SystemParams& p, long n_geo, std::uint64_t master_seed, int threads = 1,
                SnapshotOptions opt = {})
      : master_seed_(master_seed), snaps_(static_cast<std::size_t>(std::max(0L, n_geo))) {
    parallel_for(n_geo, threads, [&](long k) {
      snaps_[k] = build_snapshot(p, substream_seed(master_seed, static_cast<std::uint64_t>(k), 2),
                                 opt);
    });
  }

  long size() const { return static_cast<long>(snaps_.size()); }
  const NetworkSnapshot& operator[](long k) const { return snaps_[k]; }
  std::uint64_t master_seed() const { return master_seed_; }

  /// Total number of clamped distances across the batch.
  long clamped() const {
    long c = 0;
    for (const auto& s : snaps_) c += s.clamped;
    return c;
  }

 private:
  std::uint64_t master_seed_;
  std::vector<NetworkSnapshot> snaps_;
};

/// Conditional success probability of every snapshot.
inline std::vector<double> success_samples(const SnapshotBatch& batch, Device d, Scheme sc,
                                           double beta, const SystemParams& p, int threads = 1) {
  std::vector<double> out(static_cast<std::size_t>(batch.size()));
  parallel_for(batch.size(), threads,
               [&](long k) { out[k] = conditional_success(batch[k], d, sc, beta, p); });
  return out;
}

/// Empirical M_b = E[P^b] over the batch.
inline EmpiricalEstimate empirical_moment(const SnapshotBatch& batch, double b, double beta,
                                          Device d, Scheme sc, const SystemParams& p,
                                          int threads = 1) {
  std::vector<double> x(static_cast<std::size_t>(batch.size()));
  parallel_for(batch.size(), threads, [&](long k) {
    x[k] = std::exp(b * log_conditional_success(batch[k], d, sc, beta, p));
  });
  auto e = summarize(x, EstimatorKind::moment_b);
  if (b >= 0.0) e.heavy_tail = false;
  if (e.heavy_tail)
    std::clog << "[montecarlo] heavy-tailed samples for b=" << b
              << "; the moment may not exist\n";
  return e;
}

inline EmpiricalEstimate empirical_moment(double b, double beta, Device d, Scheme sc, long n_geo,
                                          std::uint64_t master_seed, const SystemParams& p,
                                          int threads = 1) {
  if (n_geo < 100) throw ParamError("n_geo must be at least 100");
  const SnapshotBatch batch(p, n_geo, master_seed, threads);
  return empirical_moment(batch, b, beta, d, sc, p, threads);
}

/// Fraction of geometries whose conditional success probability exceeds x.
inline EmpiricalEstimate empirical_meta_ccdf(const SnapshotBatch& batch, double x, double beta,
                                             Device d, Scheme sc, const SystemParams& p,
                                             int threads = 1) {
  if (!(x >= 0.0 && x <= 1.0)) throw ParamError("reliability threshold must lie in [0, 1]");
  const auto ps = success_samples(batch, d, sc, beta, p, threads);
  std::vector<double> ind(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k) ind[k] = ps[k] > x ? 1.0 : 0.0;
  return summarize(ind, EstimatorKind::meta_ccdf_at_x);
}

inline EmpiricalEstimate empirical_meta_ccdf(double x, double beta, Device d, Scheme sc,
                                             long n_geo, std::uint64_t master_seed,
                                             const SystemParams& p, int threads = 1) {
  const SnapshotBatch batch(p, n_geo, master_seed, threads);
  return empirical_meta_ccdf(batch, x, beta, d, sc, p, threads);
}

inline constexpr long kDefaultFadingDraws = 20;

/// Ergodic rate E[log2(1 + SIR_m)] from n_fade fading draws per snapshot;
/// OMA scales by eta.
inline EmpiricalEstimate empirical_rate(const SnapshotBatch& batch, Scheme sc,
                                        const SystemParams& p, long n_fade = kDefaultFadingDraws,
                                        int threads = 1) {
  std::vector<double> x(static_cast<std::size_t>(batch.size()));
  parallel_for(batch.size(), threads, [&](long k) {
    Rng rng = make_rng(batch[k].seed, 0, 3);
    double acc = 0.0;
    for (long j = 0; j < n_fade; ++j)
      acc += std::log2(1.0 + sir(batch[k], draw_fading(batch[k], rng), Device::mobile, sc, p));
    x[k] = acc / n_fade * (sc == Scheme::oma ? p.eta : 1.0);
  });
  auto e = summarize(x, EstimatorKind::rate);
  e.heavy_tail = false;
  e.n_samples = batch.size() * n_fade;
  return e;
}

inline EmpiricalEstimate empirical_rate(const SystemParams& p, Scheme sc, long n_geo,
                                        std::uint64_t master_seed, int threads = 1) {
  if (n_geo < 100) throw ParamError("n_geo must be at least 100");
  const SnapshotBatch batch(p, n_geo, master_seed, threads);
  return empirical_rate(batch, sc, p, kDefaultFadingDraws, threads);
}

inline constexpr long kRetransmissionCap = 10000;

struct DelayEstimate {
  EmpiricalEstimate harmonic;   // mean of 1 / (per-slot success probability)
  EmpiricalEstimate bernoulli;  // simulated slots until first success, capped
  double cap_hit_fraction = 0.0;
  bool heavy_tail_warning = false;
};

/// Mean local delay of the typical IoT device. Per-slot success is P_t under
/// NOMA and (1 - eta) P_t under OMA.
inline DelayEstimate empirical_local_delay(const SnapshotBatch& batch, Scheme sc,
                                           const SystemParams& p, double beta_t,
                                           int threads = 1) {
  const double access = sc == Scheme::oma ? 1.0 - p.eta : 1.0;
  std::vector<double> inv(static_cast<std::size_t>(batch.size()));
  std::vector<double> slots(inv.size());
  std::vector<char> capped(inv.size(), 0);
  parallel_for(batch.size(), threads, [&](long k) {
    const double q = access * conditional_success(batch[k], Device::iot, sc, beta_t, p);
    inv[k] = 1.0 / q;
    Rng rng = make_rng(batch[k].seed, 0, 5);
    long n = 1;
    while (uniform01(rng) >= q && n < kRetransmissionCap) ++n;
    if (n == kRetransmissionCap && q < 1.0) capped[k] = 1;
    slots[k] = static_cast<double>(n);
  });
  DelayEstimate d;
  d.harmonic = summarize(inv, EstimatorKind::delay);
  d.bernoulli = summarize(slots, EstimatorKind::delay);
  d.bernoulli.heavy_tail = false;
  long hits = 0;
  for (char c : capped) hits += c;
  d.cap_hit_fraction = batch.size() > 0 ? static_cast<double>(hits) / batch.size() : 0.0;
  d.heavy_tail_warning = d.cap_hit_fraction > 0.01 || d.harmonic.heavy_tail;
  if (d.heavy_tail_warning)
    std::clog << "[montecarlo] delay: cap hit in " << 100.0 * d.cap_hit_fraction
              << "% of geometries; the mean delay may diverge\n";
  return d;
}

inline DelayEstimate empirical_local_delay(const SystemParams& p, Scheme sc, long n_geo,
                                           std::uint64_t master_seed, int threads = 1) {
  if (n_geo < 100) throw ParamError("n_geo must be at least 100");
  const SnapshotBatch batch(p, n_geo, master_seed, threads);
  return empirical_local_delay(batch, sc, p, p.beta_t, threads);
}

/// Factor contributed by one interferer at distance u from the typical BS;
/// may draw its random marks from rng.
using InnerKernel = std::function<double(double u, Rng& rng)>;

/// Monte Carlo of E[prod_x f(x)] for a PPP with radial density `density`
/// (bounded by lambda_max) inside B(0, window): a homogeneous lambda_max
/// process thinned with probability density(u) / lambda_max.
inline EmpiricalEstimate pgfl_oracle(const RadialDensity& density, double lambda_max,
                                     double window, const InnerKernel& inner, long n_real,
                                     std::uint64_t seed, int threads = 1) {
  std::vector<double> x(static_cast<std::size_t>(n_real));
  const double mean = lambda_max * kPi * window * window;
  parallel_for(n_real, threads, [&](long k) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(k), 6);
    std::poisson_distribution<long> count(mean);
    const long n = count(rng);
    double log_prod = 0.0;
    for (long i = 0; i < n; ++i) {
      const double u = window * std::sqrt(uniform01(rng));
      if (uniform01(rng) * lambda_max >= density(u)) continue;
      log_prod += std::log(inner(u, rng));
    }
    x[k] = std::exp(log_prod);
  });
  auto e = summarize(x, EstimatorKind::moment_b);
  e.heavy_tail = false;
  return e;
}

/// PGFL oracle for the interferer kernels: IoT (I2) or mobile (M)
/// interferers with power-control fraction eps, at scale s and order b.
inline EmpiricalEstimate pgfl_kernel_oracle(Device interferers, double s, double b, double eps,
                                            const SystemParams& p, double inv_jm_area,
                                            long n_real, std::uint64_t seed, int threads = 1,
                                            double window = 3000.0) {
  const bool mob = interferers == Device::mobile;
  const RadialDensity density =
      mob ? mobile_interferer_density(p, inv_jm_area) : iot_interferer_density(p);
  const double rho = mob ? p.rho_m : p.rho_t;
  const double c = rayleigh_scale(p);
  const InnerKernel inner = [&](double u, Rng& rng) {
    const TruncatedRayleigh law(c, mob ? std::min(u, p.L) : u);
    const double r = law.sample(rng);
    const double x = s * rho * std::pow(detail::clampd(r, p.min_distance), p.alpha * eps) *
                     std::pow(detail::clampd(u, p.min_distance), -p.alpha);
    return std::exp(-b * std::log1p(x));
  };
  return pgfl_oracle(density, p.lambda_b, window, inner, n_real, seed, threads);
}

struct EmpiricalRow {
  double beta_db = 0.0;
  EmpiricalEstimate estimate;
  Scheme scheme = Scheme::noma;
  Device device = Device::mobile;
};

inline void write_csv(std::ostream& os, const std::vector<EmpiricalRow>& rows) {
  os << "beta_db,estimate,std_error,n_samples,estimator_kind,scheme,device\n";
  os.precision(12);
  for (const auto& r : rows)
    os << r.beta_db << "," << r.estimate.value << "," << r.estimate.std_error << ","
       << r.estimate.n_samples << "," << to_string(r.estimate.kind) << ","
       << to_string(r.scheme) << "," << to_string(r.device) << "\n";
}

}  // namespace anoma

#endif  // ANOMA_MONTECARLO_HPP

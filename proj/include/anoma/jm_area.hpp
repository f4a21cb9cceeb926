#ifndef ANOMA_JM_AREA_HPP
#define ANOMA_JM_AREA_HPP

// Monte Carlo estimate of E[1/|JM cell|] for the typical cell
// B_o(L) ∩ V_o, with an on-disk cache keyed by the dimensionless lambda_b L^2.
//
// Scale invariance: E[1/|JM cell|] = lambda_b * psi(lambda_b L^2), so the
// cache stores psi and any (lambda_b, L) pair with the same product reuses it.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "anoma/config.hpp"
#include "anoma/rng.hpp"
#include "anoma/spatial.hpp"

namespace anoma {

struct JmAreaOptions {
  int test_points = 100000;  // hit-or-miss points per cell
  int threads = 1;
};

struct JmAreaEstimate {
  double value = 0.0;          // E[1/|JM cell|], 1/m^2
  double std_error = 0.0;
  double ci_half_width = 0.0;  // 95 %
  long n_samples = 0;
  std::uint64_t seed = 0;
  long resampled = 0;          // cells rejected for zero hits
  bool low_sample = false;     // CI widened to a Student-t quantile
};

namespace detail {

struct CellArea {
  double area = 0.0;
  long rejected = 0;
};

/// Area of B_o(L) ∩ V_o for one PPP draw, by hit-or-miss inside the smallest
/// disk known to contain the region.
inline CellArea sample_jm_cell_area(double lambda_b, double L, int test_points, Rng& rng) {
  CellArea out;
  for (;;) {
    auto pts = sample_bs_process(lambda_b, 2.0 * L, rng);
    const double full = kPi * L * L;
    if (pts.size() == 1) {
      out.area = full;
      return out;
    }
    // Neighbors sorted by distance, so most rejections exit on the first test.
    std::vector<Point> nb(pts.begin() + 1, pts.end());
    std::sort(nb.begin(), nb.end(), [](Point a, Point b) { return norm(a) < norm(b); });
    double r = std::min(L, 2.0 * mean_cell_radius(lambda_b));
    {
      const BsIndex index(pts, std::max(L / 4.0, 1e-300));
      while (r < L && !cell_within_radius(index, 0, r)) r = std::min(2.0 * r, L);
    }
    // The disk B(0, r) contains the region, so no proposal can be missed.
    long hits = 0;
    for (int k = 0; k < test_points; ++k) {
      const Point q = uniform_in_disk({0.0, 0.0}, r, rng);
      const double q2 = q.x * q.x + q.y * q.y;
      if (q2 > L * L) continue;
      bool inside = true;
      for (const auto& y : nb) {
        const double y2 = y.x * y.x + y.y * y.y;
        if (y2 > 4.0 * q2) break;  // |q - y| >= |y| - |q| >= |q|
        if (2.0 * (q.x * y.x + q.y * y.y) > y2) {
          inside = false;
          break;
        }
      }
      hits += inside;
    }
    if (hits > 0) {
      out.area = kPi * r * r * static_cast<double>(hits) / test_points;
      return out;
    }
    ++out.rejected;
  }
}

}  // namespace detail

/// Monte Carlo estimate of E[1/|B_o(L) ∩ V_o|] under a PPP of density
/// lambda_b with an extra point at the origin. Cell k uses substream k of
/// `seed`, so the result does not depend on the worker count.
inline JmAreaEstimate estimate_inverse_jm_area(double lambda_b, double L, long n_samples,
                                               std::uint64_t seed, JmAreaOptions opt = {}) {
  if (!(lambda_b > 0.0) || !(L > 0.0)) throw ParamError("lambda_b and L must be positive");
  if (n_samples < 2) throw ParamError("n_samples must be at least 2");
  std::vector<double> inv(static_cast<std::size_t>(n_samples));
  std::vector<long> rejected(static_cast<std::size_t>(n_samples));
  const int workers = std::max(1, std::min<int>(opt.threads, static_cast<int>(n_samples)));
  auto work = [&](int w) {
    for (long k = w; k < n_samples; k += workers) {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(k), 7);
      const auto c = detail::sample_jm_cell_area(lambda_b, L, opt.test_points, rng);
      inv[k] = 1.0 / c.area;
      rejected[k] = c.rejected;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  JmAreaEstimate e;
  e.n_samples = n_samples;
  e.seed = seed;
  double sum = 0.0;
  for (double v : inv) sum += v;
  e.value = sum / n_samples;
  double ss = 0.0;
  for (double v : inv) ss += (v - e.value) * (v - e.value);
  e.std_error = std::sqrt(ss / (n_samples - 1) / n_samples);
  for (long r : rejected) e.resampled += r;
  e.low_sample = n_samples < 1000;
  double q = 1.959963984540054;
  if (e.low_sample) {
    boost::math::students_t t(static_cast<double>(n_samples - 1));
    q = boost::math::quantile(boost::math::complement(t, 0.025));
  }
  e.ci_half_width = q * e.std_error;
  if (e.resampled > 0)
    std::clog << "[jm-area] resampled " << e.resampled << " degenerate cells\n";
  return e;
}

/// Text cache: one line per rounded lambda_b L^2:
///   <key> <psi> <ci_half_width/lambda_b> <n_samples> <seed>
class JmAreaCache {
 public:
  struct Entry {
    double psi = 0.0;
    double ci = 0.0;
    long n_samples = 0;
    std::uint64_t seed = 0;
  };

  explicit JmAreaCache(std::string path) : path_(std::move(path)) { load(); }

  static std::string key(double lambda_b, double L) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", lambda_b * L * L);
    return buf;
  }

  std::optional<Entry> find(double lambda_b, double L) const {
    std::lock_guard lock(mu_);
    const auto it = entries_.find(key(lambda_b, L));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  /// Cached value, or a fresh estimate that is then appended to the file.
  JmAreaEstimate get_or_estimate(double lambda_b, double L, long n_samples, std::uint64_t seed,
                                 JmAreaOptions opt = {}) {
    if (auto e = find(lambda_b, L)) {
      JmAreaEstimate out;
      out.value = e->psi * lambda_b;
      out.ci_half_width = e->ci * lambda_b;
      out.std_error = out.ci_half_width / 1.959963984540054;
      out.n_samples = e->n_samples;
      out.seed = e->seed;
      return out;
    }
    auto est = estimate_inverse_jm_area(lambda_b, L, n_samples, seed, opt);
    Entry entry{est.value / lambda_b, est.ci_half_width / lambda_b, n_samples, seed};
    std::lock_guard lock(mu_);
    entries_[key(lambda_b, L)] = entry;
    if (!path_.empty()) {
      std::ofstream out(path_, std::ios::app);
      out.precision(17);
      out << key(lambda_b, L) << " " << entry.psi << " " << entry.ci << " " << entry.n_samples
          << " " << entry.seed << "\n";
    }
    return est;
  }

  const std::string& path() const { return path_; }

 private:
  void load() {
    if (path_.empty()) return;
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream is(line);
      std::string k;
      Entry e;
      if (is >> k >> e.psi >> e.ci >> e.n_samples >> e.seed) entries_[k] = e;
    }
  }

  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, Entry> entries_;
};

inline constexpr long kDefaultJmCells = 10000;
inline constexpr std::uint64_t kDefaultJmSeed = 20210601;

/// E[1/|JM cell|] for the parameters: the explicit override when present,
/// else the cache (estimating and storing on a miss).
inline double resolve_inverse_jm_area(const SystemParams& p, JmAreaCache* cache,
                                      long n_samples = kDefaultJmCells,
                                      std::uint64_t seed = kDefaultJmSeed,
                                      JmAreaOptions opt = {}) {
  if (p.inv_jm_area) return *p.inv_jm_area;
  if (cache) return cache->get_or_estimate(p.lambda_b, p.L, n_samples, seed, opt).value;
  return estimate_inverse_jm_area(p.lambda_b, p.L, n_samples, seed, opt).value;
}

}  // namespace anoma

#endif  // ANOMA_JM_AREA_HPP

#ifndef ANOMA_SPATIAL_HPP
#define ANOMA_SPATIAL_HPP

// Monte Carlo network geometry: PPP base stations under the typical-cell
// viewpoint, uniform device placement in PV / JM cells by rejection against
// nearest-BS tests, and extraction of the link distances the SIR needs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "anoma/config.hpp"
#include "anoma/rng.hpp"

namespace anoma {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double dist2(Point a, Point b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}
inline double dist(Point a, Point b) { return std::sqrt(dist2(a, b)); }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

/// Uniform grid over a square for radius queries on a static point set.
class BsIndex {
 public:
  BsIndex(const std::vector<Point>& pts, double cell_size) : pts_(&pts), h_(cell_size) {
    double ext = 0.0;
    for (const auto& p : pts) ext = std::max({ext, std::abs(p.x), std::abs(p.y)});
    half_ = ext + h_;
    n_ = std::max(1, static_cast<int>(std::ceil(2.0 * half_ / h_)));
    heads_.assign(static_cast<std::size_t>(n_) * n_ + 1, 0);
    std::vector<int> cell_of(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      cell_of[i] = cell_id(pts[i]);
      ++heads_[cell_of[i] + 1];
    }
    for (std::size_t c = 1; c < heads_.size(); ++c) heads_[c] += heads_[c - 1];
    items_.resize(pts.size());
    std::vector<int> fill(heads_.begin(), heads_.end() - 1);
    for (std::size_t i = 0; i < pts.size(); ++i) items_[fill[cell_of[i]]++] = static_cast<int>(i);
  }

  const std::vector<Point>& points() const { return *pts_; }

  /// Calls visit(j) for every point within `radius` of q (and maybe a few more).
  template <class Visit>
  void for_each_near(Point q, double radius, Visit&& visit) const {
    const int x0 = clampi(static_cast<int>(std::floor((q.x - radius + half_) / h_)));
    const int x1 = clampi(static_cast<int>(std::floor((q.x + radius + half_) / h_)));
    const int y0 = clampi(static_cast<int>(std::floor((q.y - radius + half_) / h_)));
    const int y1 = clampi(static_cast<int>(std::floor((q.y + radius + half_) / h_)));
    for (int gy = y0; gy <= y1; ++gy)
      for (int gx = x0; gx <= x1; ++gx) {
        const int c = gy * n_ + gx;
        for (int k = heads_[c]; k < heads_[c + 1]; ++k) visit(items_[k]);
      }
  }

  /// True when no other point is strictly closer to q than point i.
  bool is_nearest(Point q, std::size_t i) const {
    const auto& pts = *pts_;
    const double di2 = dist2(q, pts[i]);
    bool ok = true;
    for_each_near(q, std::sqrt(di2), [&](int j) {
      if (ok && static_cast<std::size_t>(j) != i && dist2(q, pts[j]) < di2) ok = false;
    });
    return ok;
  }

  std::size_t nearest(Point q) const {
    const auto& pts = *pts_;
    double r = h_;
    for (;;) {
      std::size_t best = pts.size();
      double bd = r * r;
      for_each_near(q, r, [&](int j) {
        const double d = dist2(q, pts[j]);
        if (d <= bd) {
          if (d < bd || static_cast<std::size_t>(j) < best) best = static_cast<std::size_t>(j);
          bd = d;
        }
      });
      if (best != pts.size()) return best;
      if (r > 4.0 * half_) throw std::logic_error("nearest query on empty index");
      r *= 2.0;
    }
  }

 private:
  int clampi(int v) const { return std::clamp(v, 0, n_ - 1); }
  int cell_id(Point p) const {
    return clampi(static_cast<int>(std::floor((p.y + half_) / h_))) * n_ +
           clampi(static_cast<int>(std::floor((p.x + half_) / h_)));
  }

  const std::vector<Point>* pts_;
  double h_;
  double half_ = 0.0;
  int n_ = 1;
  std::vector<int> heads_;
  std::vector<int> items_;
};

inline Point uniform_in_disk(Point c, double radius, Rng& rng) {
  const double r = radius * std::sqrt(uniform01(rng));
  const double th = 2.0 * kPi * uniform01(rng);
  return {c.x + r * std::cos(th), c.y + r * std::sin(th)};
}

/// Poisson(lambda_b pi R^2) points uniform in the disk of radius R, preceded
/// by the typical BS at the origin (index 0).
inline std::vector<Point> sample_bs_process(double lambda_b, double window_radius, Rng& rng) {
  if (!(window_radius > 0.0)) throw std::invalid_argument("window_radius must be > 0");
  std::poisson_distribution<long> count(lambda_b * kPi * window_radius * window_radius);
  const long n = count(rng);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n) + 1);
  pts.push_back({0.0, 0.0});
  for (long k = 0; k < n; ++k) pts.push_back(uniform_in_disk({0.0, 0.0}, window_radius, rng));
  return pts;
}

inline double mean_cell_radius(double lambda_b) { return 1.0 / std::sqrt(kPi * lambda_b); }

/// True when the PV cell of point i lies inside the closed disk B(x_i, r).
/// The cell is convex and contains x_i, so this holds iff the circle of
/// radius r is covered by the arcs on which some other BS is closer.
inline bool cell_within_radius(const BsIndex& index, std::size_t i, double r) {
  const auto& pts = index.points();
  const Point c = pts[i];
  std::vector<std::pair<double, double>> arcs;
  index.for_each_near(c, 2.0 * r, [&](int j) {
    if (static_cast<std::size_t>(j) == i) return;
    const double d = dist(c, pts[j]);
    if (d >= 2.0 * r || d == 0.0) return;
    const double w = std::acos(d / (2.0 * r));
    double mid = std::atan2(pts[j].y - c.y, pts[j].x - c.x);
    if (mid < 0.0) mid += 2.0 * kPi;
    double a = mid - w, b = mid + w;
    if (a < 0.0) {
      arcs.push_back({a + 2.0 * kPi, 2.0 * kPi});
      arcs.push_back({0.0, b});
    } else if (b > 2.0 * kPi) {
      arcs.push_back({a, 2.0 * kPi});
      arcs.push_back({0.0, b - 2.0 * kPi});
    } else {
      arcs.push_back({a, b});
    }
  });
  std::sort(arcs.begin(), arcs.end());
  double covered = 0.0;
  for (const auto& [a, b] : arcs) {
    if (a > covered) return false;
    covered = std::max(covered, b);
  }
  return covered >= 2.0 * kPi;
}

enum class CellKind { pv, jm };

struct CellConstraint {
  CellKind kind = CellKind::pv;
  double L = 0.0;  // jm only
};

struct CellSamplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform point in the PV cell of BS i, or in its JM cell B(x_i, L) ∩ V_i.
/// Proposals are uniform in a disk around x_i that provably contains the
/// target region; the disk starts at 2/sqrt(pi lambda_b) and doubles until
/// containment holds, up to 20/sqrt(pi lambda_b).
inline Point sample_uniform_in_cell(const BsIndex& index, std::size_t i, Rng& rng,
                                    CellConstraint constraint, double lambda_b) {
  const auto& pts = index.points();
  const double unit = mean_cell_radius(lambda_b);
  const double cap = 20.0 * unit;
  double radius = 2.0 * unit;
  const bool jm = constraint.kind == CellKind::jm;
  // B(x_i, L) always contains the JM cell.
  while (!(jm && constraint.L <= radius) && !cell_within_radius(index, i, radius)) {
    radius *= 2.0;
    if (radius > cap && !(jm && constraint.L <= cap))
      throw CellSamplingError("cell of BS " + std::to_string(i) + " at (" +
                              std::to_string(pts[i].x) + ", " + std::to_string(pts[i].y) +
                              ") exceeds the sampling radius cap " + std::to_string(cap));
  }
  if (jm) radius = std::min(radius, constraint.L);
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    const Point q = uniform_in_disk(pts[i], radius, rng);
    if (index.is_nearest(q, i)) return q;
  }
  throw CellSamplingError("rejection sampling did not accept within 1e6 proposals");
}

struct InterfererLink {
  double R = 0.0;  // distance to its own BS
  double D = 0.0;  // distance to the typical BS at the origin
  int cell = 0;    // index of its BS
};

struct NetworkSnapshot {
  std::vector<Point> bs_points;  // index 0 is the typical BS
  Point mobile_pos, iot_pos;
  double R_m = 0.0;  // typical mobile serving distance
  double R_t = 0.0;  // typical IoT serving distance
  std::vector<InterfererLink> interferers_mobile;
  std::vector<InterfererLink> interferers_iot;
  double window_radius = 0.0;
  std::uint64_t seed = 0;
  /// Number of recorded distances below the clamp distance.
  int clamped = 0;
};

/// Default simulation window: at least ~500 BSs in expectation.
inline double default_window_radius(double lambda_b) {
  return std::max(5.0 / std::sqrt(kPi * lambda_b), std::sqrt(500.0 / (kPi * lambda_b)));
}

struct SnapshotOptions {
  double window_radius = 0.0;  // 0 selects default_window_radius
  /// Ring of extra BSs beyond the window so edge cells are bounded; those BSs
  /// carry no devices. 0 selects 4/sqrt(pi lambda_b).
  double guard = 0.0;
};

/// One geometry realization: one IoT device (PV-uniform) and one mobile user
/// (JM-uniform) in every cell whose BS lies in the window.
inline NetworkSnapshot build_snapshot(const SystemParams& p, std::uint64_t seed,
                                      SnapshotOptions opt = {}) {
  NetworkSnapshot s;
  s.seed = seed;
  s.window_radius = opt.window_radius > 0.0 ? opt.window_radius : default_window_radius(p.lambda_b);
  const double guard = opt.guard > 0.0 ? opt.guard : 4.0 * mean_cell_radius(p.lambda_b);
  Rng rng = make_rng(seed, 0, 1);
  s.bs_points = sample_bs_process(p.lambda_b, s.window_radius + guard, rng);
  const BsIndex index(s.bs_points, 1.0 / std::sqrt(p.lambda_b));

  const CellConstraint pv{CellKind::pv, 0.0};
  const CellConstraint jm{CellKind::jm, p.L};
  const double window2 = s.window_radius * s.window_radius;
  auto note = [&](double d) {
    if (d < p.min_distance) ++s.clamped;
  };

  s.iot_pos = sample_uniform_in_cell(index, 0, rng, pv, p.lambda_b);
  s.mobile_pos = sample_uniform_in_cell(index, 0, rng, jm, p.lambda_b);
  s.R_t = norm(s.iot_pos);
  s.R_m = norm(s.mobile_pos);
  note(s.R_t);
  note(s.R_m);

  const std::size_t n = s.bs_points.size();
  s.interferers_iot.reserve(n);
  s.interferers_mobile.reserve(n);
  for (std::size_t i = 1; i < n; ++i) {
    const Point b = s.bs_points[i];
    if (b.x * b.x + b.y * b.y > window2) continue;
    const Point t = sample_uniform_in_cell(index, i, rng, pv, p.lambda_b);
    const Point m = sample_uniform_in_cell(index, i, rng, jm, p.lambda_b);
    s.interferers_iot.push_back({dist(t, b), norm(t), static_cast<int>(i)});
    s.interferers_mobile.push_back({dist(m, b), norm(m), static_cast<int>(i)});
    note(s.interferers_iot.back().R);
    note(s.interferers_iot.back().D);
    note(s.interferers_mobile.back().R);
    note(s.interferers_mobile.back().D);
  }
  return s;
}

/// Serving distances of one typical-cell draw (IoT PV-uniform, mobile
/// JM-uniform) using a small window around the origin.
struct TypicalLinks {
  double R_t = 0.0;
  double R_m = 0.0;
};

inline TypicalLinks sample_typical_links(const SystemParams& p, Rng& rng) {
  const double window = 10.0 * mean_cell_radius(p.lambda_b) + 2.0 * p.L;
  const auto pts = sample_bs_process(p.lambda_b, window, rng);
  const BsIndex index(pts, 1.0 / std::sqrt(p.lambda_b));
  const Point t = sample_uniform_in_cell(index, 0, rng, {CellKind::pv, 0.0}, p.lambda_b);
  const Point m = sample_uniform_in_cell(index, 0, rng, {CellKind::jm, p.L}, p.lambda_b);
  return {norm(t), norm(m)};
}

struct FadingDraw {
  double h_m = 1.0;
  double h_t = 1.0;
  std::vector<double> h_xm;
  std::vector<double> h_xt;
};

inline double exponential1(Rng& rng) { return -std::log(uniform_open0(rng)); }

/// Independent unit-mean exponential gains for every link of the snapshot.
inline FadingDraw draw_fading(const NetworkSnapshot& s, Rng& rng) {
  FadingDraw f;
  f.h_m = exponential1(rng);
  f.h_t = exponential1(rng);
  f.h_xm.resize(s.interferers_mobile.size());
  f.h_xt.resize(s.interferers_iot.size());
  for (auto& h : f.h_xm) h = exponential1(rng);
  for (auto& h : f.h_xt) h = exponential1(rng);
  return f;
}

/// Debug dump: one row per device.
inline void write_snapshot_csv(std::ostream& os, const NetworkSnapshot& s) {
  os.precision(10);
  os << "role,R,D,cell\n";
  os << "typical_mobile," << s.R_m << "," << s.R_m << ",0\n";
  os << "typical_iot," << s.R_t << "," << s.R_t << ",0\n";
  for (const auto& l : s.interferers_mobile)
    os << "interferer_mobile," << l.R << "," << l.D << "," << l.cell << "\n";
  for (const auto& l : s.interferers_iot)
    os << "interferer_iot," << l.R << "," << l.D << "," << l.cell << "\n";
}

}  // namespace anoma

#endif  // ANOMA_SPATIAL_HPP

#ifndef ANOMA_ANALYTIC_HPP
#define ANOMA_ANALYTIC_HPP

// Numerical evaluation of the meta-distribution moments of the typical mobile
// user and IoT device under adaptive-rate NOMA and OMA, the SIR CCDF, the
// mobile ergodic rate and the IoT mean local delay.
//
// Structure of every moment:
//
//   M_b = E_R[ prod_k K_k(s(R)) ],   s(R) = beta / rho * R^{alpha (1 - eps)}
//
// with three kernels of the interference scale s:
//
//   I1(s) = E_{R_t}[(1 + s rho_t R_t^{alpha (eps_t - 1)})^{-b}]       own IoT device
//   I2(s) = exp(-2 pi int lt(u) (1 - E[(1 + s rho_t r^{a e_t} u^-a)^-b | u]) u du)
//   M(s)  = same with the mobile interferer density and truncation min(u, L)
//
// The expectation inside I2 / M runs over the link distance of an interferer
// at distance u from the typical BS, a Rayleigh law truncated to [0, u]
// (IoT) or [0, min(u, L)] (mobile). It is evaluated with composite
// Gauss-Legendre; the u-integral is adaptive.
//
// Every distance entering a path-loss or power-control factor is replaced by
// max(d, min_distance), matching the simulator's clamp.
//
// Kernels are smooth and monotone in s, so moment evaluation goes through
// tabulated log-kernels: y(x) = ln|ln K(e^x)| on a uniform grid in x = ln s,
// interpolated by a cubic B-spline and extrapolated linearly (exact slope 1
// for small s).

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "anoma/config.hpp"
#include "anoma/distributions.hpp"
#include "anoma/quadrature.hpp"

namespace anoma {

enum class Device { mobile, iot };
enum class Scheme { noma, oma };

inline const char* to_string(Device d) { return d == Device::mobile ? "mobile" : "iot"; }
inline const char* to_string(Scheme s) { return s == Scheme::noma ? "noma" : "oma"; }

struct MomentResult {
  double value = 0.0;
  double abs_error_est = 0.0;
  QuadStatus status = QuadStatus::converged;

  bool converged() const { return status != QuadStatus::diverged; }
};

enum class CurveKind { moment_b, ccdf, rate_integrand };
enum class CurveSource { analytic, empirical };

struct MetaCurve {
  std::vector<double> thresholds;  // linear, strictly increasing
  std::vector<double> values;
  std::vector<double> abs_errors;
  std::vector<QuadStatus> statuses;
  CurveKind kind = CurveKind::moment_b;
  CurveSource source = CurveSource::analytic;
};

/// CSV export: beta_db,value,abs_error,status.
inline void write_csv(std::ostream& os, const MetaCurve& c) {
  os << "beta_db,value,abs_error,status\n";
  os << std::setprecision(12);
  for (std::size_t i = 0; i < c.thresholds.size(); ++i)
    os << linear_to_db(c.thresholds[i]) << "," << c.values[i] << "," << c.abs_errors[i] << ","
       << to_string(c.statuses[i]) << "\n";
}

/// Power-control fractions, the decision variables of the optimizer.
struct PowerControl {
  double eps_m = 0.0;
  double eps_t = 0.0;
  auto operator<=>(const PowerControl&) const = default;
};

namespace detail {

/// Clamped distance.
inline double clampd(double d, double rmin) { return d < rmin ? rmin : d; }

/// 1 - (1 + x)^{-b}, accurate for small x.
inline double one_minus_pow(double x, double b) { return -std::expm1(-b * std::log1p(x)); }

/// Model of one interferer population (IoT or mobile) as seen from the
/// typical BS.
struct InterfererModel {
  double lambda_b = 0.0;
  double pcf_coef = 0.0;  // g(u) = 1 - exp(-pcf_coef u^2)
  double c = 0.0;         // Rayleigh scale of link distances
  double alpha = 4.0;
  double eps = 0.0;
  double rho = 1.0;
  double trunc = std::numeric_limits<double>::infinity();  // L for mobiles
  double rmin = 0.0;
};

inline InterfererModel iot_interferers(const SystemParams& p, double eps_t) {
  return {p.lambda_b, 2.0 * kPi * inverse_pv_area(p.lambda_b), rayleigh_scale(p), p.alpha,
          eps_t,      p.rho_t,
          std::numeric_limits<double>::infinity(), p.min_distance};
}

inline InterfererModel mobile_interferers(const SystemParams& p, double eps_m, double inv_jm_area) {
  return {p.lambda_b, 2.0 * kPi * inv_jm_area, rayleigh_scale(p), p.alpha,
          eps_m,      p.rho_m,                   p.L,               p.min_distance};
}

/// E[1 - (1 + s rho r^{alpha eps} u^{-alpha})^{-b}] over the interferer's
/// link distance r given its distance u to the typical BS.
inline double inner_expectation(const InterfererModel& m, double u, double s, double b) {
  const double T = std::min(u, m.trunc);
  if (T <= 0.0) return 0.0;
  const TruncatedRayleigh law(m.c, T);
  const double a = s * m.rho * std::pow(clampd(u, m.rmin), -m.alpha);
  const double ae = m.alpha * m.eps;
  auto h = [&](double r) {
    return one_minus_pow(a * std::pow(clampd(r, m.rmin), ae), b) * law.pdf(r);
  };
  const double sg = law.sigma();
  const double hi = law.effective_upper();
  return gauss_legendre_panels(h, 0.0, hi,
                               {m.rmin, 0.25 * sg, 0.5 * sg, sg, 1.5 * sg, 2.0 * sg, 3.0 * sg,
                                4.0 * sg, 5.0 * sg});
}

/// Integral over [lo, inf) of a function decaying like u^{1-alpha}, after the
/// map u = lo * v^{-1/(alpha-2)} that makes such a tail bounded on (0, 1].
template <class F>
QuadResult integrate_power_tail(F&& f, double lo, double alpha, double tol) {
  const double p = 1.0 / (alpha - 2.0);
  auto g = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double u = lo * std::pow(v, -p);
    const double du = p * u / v;
    return f(u) * du;
  };
  return integrate(g, 0.0, 1.0, tol);
}

/// G(s) = 2 pi int lambda_b g(u) E[1 - (...)^{-b} | u] u du, so that the
/// kernel equals exp(-G).
inline QuadResult kernel_exponent(const InterfererModel& m, double s, double b,
                                  double tol = 1e-9) {
  if (s <= 0.0) return {};
  auto f = [&](double u) {
    const double g = -std::expm1(-m.pcf_coef * u * u);
    return 2.0 * kPi * m.lambda_b * g * inner_expectation(m, u, s, b) * u;
  };
  const double sg = 1.0 / std::sqrt(m.c);
  const double split = std::max(std::isfinite(m.trunc) ? m.trunc : 0.0, 6.0 * sg);
  std::vector<double> breaks = {0.0};
  if (m.rmin > 0.0 && m.rmin < split) breaks.push_back(m.rmin);
  if (std::isfinite(m.trunc) && m.trunc > breaks.back() && m.trunc < split) breaks.push_back(m.trunc);
  for (double x : {sg, 3.0 * sg})
    if (x > breaks.back() && x < split) breaks.push_back(x);
  breaks.push_back(split);
  QuadResult total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const auto r = integrate(f, breaks[i], breaks[i + 1], tol);
    total.value += r.value;
    total.abs_error += r.abs_error;
    total.status = combine(total.status, r.status);
  }
  const auto tail = integrate_power_tail(f, split, m.alpha, tol);
  total.value += tail.value;
  total.abs_error += tail.abs_error;
  total.status = combine(total.status, tail.status);
  return total;
}

/// Own-IoT interference term: I1 = E_{R_t}[(1 + s rho_t R_t^{alpha (eps_t - 1)})^{-b}].
/// Returns ln I1, computed from 1 - I1 while that is small and from I1
/// directly otherwise, so neither regime loses precision.
inline QuadResult own_iot_log_term(const SystemParams& p, double eps_t, double s, double b,
                                   double tol = 1e-10) {
  if (s <= 0.0) return {};
  const double e = p.alpha * (eps_t - 1.0);
  if (eps_t == 1.0) return {-b * std::log1p(s * p.rho_t), 0.0, QuadStatus::converged};
  const TruncatedRayleigh law(rayleigh_scale(p));
  auto complement = [&](double r) {
    return one_minus_pow(s * p.rho_t * std::pow(clampd(r, p.min_distance), e), b) * law.pdf(r);
  };
  auto direct = [&](double r) {
    return std::exp(-b * std::log1p(s * p.rho_t * std::pow(clampd(r, p.min_distance), e))) *
           law.pdf(r);
  };
  const double sg = law.sigma();
  std::vector<double> breaks = {0.0};
  if (p.min_distance > 0.0 && p.min_distance < sg) breaks.push_back(p.min_distance);
  for (double x : {0.1 * sg, sg, 2.0 * sg, 3.0 * sg})
    if (x > breaks.back()) breaks.push_back(x);
  breaks.push_back(std::max(law.effective_upper(), breaks.back() * 1.5));
  auto run = [&](auto&& f) {
    QuadResult total;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const auto r = integrate(f, breaks[i], breaks[i + 1], tol);
      total.value += r.value;
      total.abs_error += r.abs_error;
      total.status = combine(total.status, r.status);
    }
    return total;
  };
  const QuadResult q = run(complement);
  if (q.value < 0.5) {
    return {std::log1p(-q.value), q.abs_error / (1.0 - q.value), q.status};
  }
  const QuadResult d = run(direct);
  return {std::log(d.value), d.abs_error / d.value, d.status};
}

}  // namespace detail

/// I1(s): own IoT device's intra-cell interference factor.
inline QuadResult kernel_I1(double s, double b, const SystemParams& p) {
  const auto q = detail::own_iot_log_term(p, p.eps_t, s, b);
  const double k = std::exp(q.value);
  return {k, k * q.abs_error, q.status};
}

/// I2(s): inter-cell IoT interferers.
inline QuadResult kernel_I2(double s, double b, const SystemParams& p) {
  const auto g = detail::kernel_exponent(detail::iot_interferers(p, p.eps_t), s, b);
  const double k = std::exp(-g.value);
  return {k, k * g.abs_error, g.status};
}

/// M(s): inter-cell mobile interferers; inv_jm_area = E[1/|JM cell|].
inline QuadResult kernel_M(double s, double b, const SystemParams& p, double inv_jm_area) {
  const auto g = detail::kernel_exponent(detail::mobile_interferers(p, p.eps_m, inv_jm_area), s, b);
  const double k = std::exp(-g.value);
  return {k, k * g.abs_error, g.status};
}

/// Tabulated ln K(s) for one kernel.
class LogKernelTable {
 public:
  static constexpr double kLogSMin = -27.631021115928547;  // ln 1e-12
  static constexpr double kLogSMax = 55.262042231857095;   // ln 1e24
  static constexpr int kPointsPerDecade = 12;
  static constexpr double kUnderflowExponent = 800.0;

  /// `exponent(s)` returns G(s) with K = exp(-G). For a PGFL kernel at b = -1
  /// the exponent is linear in s and a single evaluation fixes the table.
  template <class Exponent>
  LogKernelTable(Exponent&& exponent, double b, bool pgfl = true) {
    const QuadResult probe = exponent(1.0);
    status_ = probe.status;
    if (b == 0.0 || probe.value == 0.0) {
      max_rel_err_ = probe.abs_error;
      identity_ = probe.value == 0.0;
      if (identity_) return;
    }
    sign_ = probe.value > 0.0 ? 1.0 : -1.0;
    if (b == -1.0 && pgfl) {
      linear_ = true;
      log_coef_ = std::log(std::abs(probe.value));
      max_rel_err_ = probe.abs_error / std::abs(probe.value);
      return;
    }
    const int decades = static_cast<int>(std::lround((kLogSMax - kLogSMin) / std::log(10.0)));
    const int n = decades * kPointsPerDecade + 1;
    dx_ = (kLogSMax - kLogSMin) / (n - 1);
    std::vector<double> y(static_cast<std::size_t>(n));
    // Beyond G ~ 800 the kernel underflows; the rest of the grid continues
    // along the last slope instead of running quadrature there.
    int last = n;
    for (int i = 0; i < n; ++i) {
      const double s = std::exp(kLogSMin + i * dx_);
      const QuadResult g = exponent(s);
      status_ = combine(status_, g.status);
      const double mag = std::abs(g.value);
      max_rel_err_ = std::max(max_rel_err_, mag > 0.0 ? g.abs_error / mag : 0.0);
      y[i] = std::log(std::max(mag, std::numeric_limits<double>::min()));
      if (sign_ > 0.0 && mag > kUnderflowExponent && i >= 2) {
        last = i + 1;
        break;
      }
    }
    for (int i = last; i < n; ++i) y[i] = y[i - 1] + (y[last - 1] - y[last - 2]);
    lo_slope_ = (y[1] - y[0]) / dx_;
    hi_slope_ = (y[n - 1] - y[n - 2]) / dx_;
    y_lo_ = y.front();
    y_hi_ = y.back();
    spline_ = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        y.begin(), y.end(), kLogSMin, dx_);
  }

  /// ln K(s).
  double log_value(double s) const {
    if (identity_ || s <= 0.0) return 0.0;
    const double x = std::log(s);
    double y;
    if (linear_) {
      y = log_coef_ + x;
    } else if (x < kLogSMin) {
      y = y_lo_ + lo_slope_ * (x - kLogSMin);
    } else if (x > kLogSMax) {
      y = y_hi_ + hi_slope_ * (x - kLogSMax);
    } else {
      y = (*spline_)(x);
    }
    return -sign_ * std::exp(y);
  }

  double value(double s) const { return std::exp(log_value(s)); }
  QuadStatus status() const { return status_; }
  /// Largest relative quadrature error estimate among the tabulated G(s).
  double max_rel_error() const { return max_rel_err_; }

 private:
  bool identity_ = false;
  bool linear_ = false;
  double sign_ = 1.0;
  double log_coef_ = 0.0;
  double dx_ = 1.0;
  double lo_slope_ = 1.0, hi_slope_ = 0.0, y_lo_ = 0.0, y_hi_ = 0.0;
  double max_rel_err_ = 0.0;
  QuadStatus status_ = QuadStatus::converged;
  std::shared_ptr<const boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

struct RateResult {
  double value = 0.0;       // bits/s/Hz
  double abs_error = 0.0;
  double gamma_max = 0.0;   // truncation point of the SIR integral
  double tail_bound = 0.0;  // bound on the neglected tail, bits/s/Hz
  QuadStatus status = QuadStatus::converged;
};

inline constexpr double kCcdfTruncation = 1e-6;
inline constexpr double kMomentTol = 1e-9;
inline constexpr double kRateTol = 1e-8;

/// Evaluates moments, CCDFs, rates and delays for one base parameter set
/// while the power-control fractions vary. Kernel tables and moments are
/// memoized per (kernel, eps, b) and (device, scheme, b, beta, eps_m, eps_t).
/// Safe to share across threads.
class AnalyticEngine {
 public:
  AnalyticEngine(const SystemParams& params, double inv_jm_area)
      : p_(params), inv_jm_area_(inv_jm_area) {}

  const SystemParams& params() const { return p_; }
  double inv_jm_area() const { return inv_jm_area_; }

  /// b-th moment of the conditional success probability.
  MomentResult moment(Device d, Scheme sc, double b, double beta, PowerControl pc) const {
    const auto key = std::make_tuple(static_cast<int>(d), static_cast<int>(sc), b, beta, pc.eps_m,
                                     pc.eps_t);
    {
      std::lock_guard lock(mu_);
      if (auto it = moments_.find(key); it != moments_.end()) return it->second;
    }
    const MomentResult r = d == Device::mobile ? mobile_moment(sc, b, beta, pc)
                                               : iot_moment(sc, b, beta, pc);
    std::lock_guard lock(mu_);
    moments_.emplace(key, r);
    return r;
  }

  /// CCDF of SIR_m at threshold beta (the b = 1 mobile moment).
  MomentResult ccdf_mobile(double beta, Scheme sc, PowerControl pc) const {
    return moment(Device::mobile, sc, 1.0, beta, pc);
  }

  /// Ergodic rate of the typical mobile user, (1/ln 2) int F(g)/(1+g) dg,
  /// scaled by eta under OMA. The integral runs in t = ln(1 + g) up to the
  /// first power of two where the CCDF drops below 1e-6.
  RateResult ergodic_rate(Scheme sc, PowerControl pc, double eta) const {
    RateResult r = unit_rate(sc, pc);
    if (sc == Scheme::oma) {
      r.value *= eta;
      r.abs_error *= eta;
      r.tail_bound *= eta;
    }
    return r;
  }

  /// Mean local delay of the typical IoT device: M_{-1} under NOMA and
  /// M_{-1}/(1 - eta) under OMA. Divergence yields +inf.
  MomentResult mean_local_delay(Scheme sc, double beta_t, PowerControl pc, double eta) const {
    MomentResult m = moment(Device::iot, sc, -1.0, beta_t, pc);
    if (sc == Scheme::oma) {
      if (!(eta < 1.0)) throw ParamError("OMA delay requires eta < 1");
      m.value /= (1.0 - eta);
      m.abs_error_est /= (1.0 - eta);
    }
    if (!m.converged()) m.value = std::numeric_limits<double>::infinity();
    return m;
  }

  /// Kernel tables, exposed for tests.
  const LogKernelTable& table_I1(double eps_t, double b) const { return table(0, eps_t, b); }
  const LogKernelTable& table_I2(double eps_t, double b) const { return table(1, eps_t, b); }
  const LogKernelTable& table_M(double eps_m, double b) const { return table(2, eps_m, b); }

 private:
  const LogKernelTable& table(int kind, double eps, double b) const {
    const auto key = std::make_tuple(kind, eps, b);
    {
      std::lock_guard lock(mu_);
      if (auto it = tables_.find(key); it != tables_.end()) return *it->second;
    }
    std::unique_ptr<LogKernelTable> t;
    if (kind == 0) {
      t = std::make_unique<LogKernelTable>(
          [&](double s) {
            const auto q = detail::own_iot_log_term(p_, eps, s, b);
            return QuadResult{-q.value, q.abs_error, q.status};
          },
          b, false);
    } else {
      const auto model = kind == 1 ? detail::iot_interferers(p_, eps)
                                   : detail::mobile_interferers(p_, eps, inv_jm_area_);
      t = std::make_unique<LogKernelTable>(
          [&](double s) { return detail::kernel_exponent(model, s, b); }, b);
    }
    std::lock_guard lock(mu_);
    auto [it, inserted] = tables_.emplace(key, std::move(t));
    return *it->second;
  }

  MomentResult mobile_moment(Scheme sc, double b, double beta, PowerControl pc) const {
    const LogKernelTable& m = table_M(pc.eps_m, b);
    const LogKernelTable* i1 = sc == Scheme::noma ? &table_I1(pc.eps_t, b) : nullptr;
    const LogKernelTable* i2 = sc == Scheme::noma ? &table_I2(pc.eps_t, b) : nullptr;
    const TruncatedRayleigh law(rayleigh_scale(p_), p_.L);
    const double k = p_.alpha * (1.0 - pc.eps_m);
    auto f = [&](double r) {
      const double s = beta / p_.rho_m * std::pow(detail::clampd(r, p_.min_distance), k);
      double lg = m.log_value(s);
      if (i1) lg += i1->log_value(s) + i2->log_value(s);
      return std::exp(lg) * law.pdf(r);
    };
    // Extra breaks around the radius where s = 1, where the kernels turn over.
    std::vector<double> breaks = {p_.min_distance, 0.5 * p_.L};
    if (k > 0.0) {
      const double r1 = std::pow(p_.rho_m / beta, 1.0 / k);
      for (double x : {0.1, 0.3, 1.0, 3.0})
        if (x * r1 > p_.min_distance && x * r1 < p_.L) breaks.push_back(x * r1);
    }
    breaks.push_back(p_.L);
    std::sort(breaks.begin(), breaks.end());
    QuadResult q;
    double lo = 0.0;
    for (double x : breaks) {
      if (x <= lo || x > p_.L) continue;
      const auto part = integrate(f, lo, x, kMomentTol);
      q.value += part.value;
      q.abs_error += part.abs_error;
      q.status = combine(q.status, part.status);
      lo = x;
    }
    double rel = m.max_rel_error();
    QuadStatus st = combine(q.status, m.status());
    if (i1) {
      rel += i1->max_rel_error() + i2->max_rel_error();
      st = combine(st, combine(i1->status(), i2->status()));
    }
    return {q.value, q.abs_error + q.value * rel, st};
  }

  /// Outer R_t expectation. For b < 0 the integrand may outgrow the Rayleigh
  /// tail: G grows like s^{|b|}, s like R^{alpha (1 - eps_t)}.
  MomentResult iot_moment(Scheme sc, double b, double beta, PowerControl pc) const {
    const LogKernelTable& i2 = table_I2(pc.eps_t, b);
    const LogKernelTable* m = sc == Scheme::noma ? &table_M(pc.eps_m, b) : nullptr;
    const double c = rayleigh_scale(p_);
    const double k = p_.alpha * (1.0 - pc.eps_t);
    const double inf = std::numeric_limits<double>::infinity();
    if (b < 0.0 && k > 0.0) {
      const double growth = k * -b;
      if (growth > 2.0 + 1e-12) return {inf, inf, QuadStatus::diverged};
      if (growth > 2.0 - 1e-12) {
        // Quadratic growth: compare the coefficient of R^2 with c.
        const double s_big = 1e12;
        double lk = i2.log_value(s_big);
        if (m) lk += m->log_value(s_big);
        const double coef = lk / std::pow(s_big, -b) * std::pow(beta / p_.rho_t, -b);
        if (coef >= c) return {inf, inf, QuadStatus::diverged};
      }
    }
    const TruncatedRayleigh law(c);
    auto f = [&](double r) {
      const double s = beta / p_.rho_t * std::pow(detail::clampd(r, p_.min_distance), k);
      double lg = i2.log_value(s);
      if (m) lg += m->log_value(s);
      // Combine in the log domain so that large kernels at b < 0 do not
      // overflow before meeting the Rayleigh tail.
      if (r <= 0.0) return 0.0;
      return std::exp(lg + std::log(2.0 * c * r) - c * r * r);
    };
    const double sg = law.sigma();
    QuadResult q;
    double lo = 0.0;
    for (double x : {p_.min_distance, 0.5 * sg, sg, 2.0 * sg, 4.0 * sg}) {
      if (x <= lo) continue;
      const auto part = integrate(f, lo, x, kMomentTol);
      q.value += part.value;
      q.abs_error += part.abs_error;
      q.status = combine(q.status, part.status);
      lo = x;
    }
    const auto tail = integrate_semi_infinite(f, lo, kMomentTol);
    q.value += tail.value;
    q.abs_error += tail.abs_error;
    q.status = combine(q.status, tail.status);
    double rel = i2.max_rel_error();
    QuadStatus st = combine(q.status, i2.status());
    if (m) {
      rel += m->max_rel_error();
      st = combine(st, m->status());
    }
    if (!std::isfinite(q.value)) return {inf, inf, QuadStatus::diverged};
    return {q.value, q.abs_error + q.value * rel, st};
  }

  RateResult unit_rate(Scheme sc, PowerControl pc) const {
    const auto key = std::make_tuple(static_cast<int>(sc), pc.eps_m, pc.eps_t);
    {
      std::lock_guard lock(mu_);
      if (auto it = rates_.find(key); it != rates_.end()) return it->second;
    }
    RateResult r;
    auto ccdf = [&](double g) { return ccdf_mobile(g, sc, pc); };
    double gmax = 1.0;
    MomentResult at = ccdf(gmax);
    while (at.value >= kCcdfTruncation && gmax < 1e15) {
      gmax *= 2.0;
      at = ccdf(gmax);
    }
    if (at.value >= kCcdfTruncation) r.status = QuadStatus::truncated_tail_warning;
    QuadStatus inner = QuadStatus::converged;
    auto f = [&](double t) {
      const MomentResult m = ccdf_unmemoized(std::expm1(t), sc, pc);
      inner = combine(inner, m.status);
      return m.value;
    };
    const auto q = integrate(f, 0.0, std::log1p(gmax), kRateTol);
    r.value = q.value / std::log(2.0);
    r.abs_error = q.abs_error / std::log(2.0);
    r.gamma_max = gmax;
    // F nonincreasing and decaying at least like 1/g beyond gmax.
    r.tail_bound = at.value * gmax * std::log1p(1.0 / gmax) / std::log(2.0);
    r.status = combine(r.status, combine(q.status, inner));
    std::lock_guard lock(mu_);
    rates_.emplace(key, r);
    return r;
  }

  MomentResult ccdf_unmemoized(double beta, Scheme sc, PowerControl pc) const {
    if (beta <= 0.0) return {1.0, 0.0, QuadStatus::converged};
    return mobile_moment(sc, 1.0, beta, pc);
  }

  SystemParams p_;
  double inv_jm_area_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<int, double, double>, std::unique_ptr<LogKernelTable>> tables_;
  mutable std::map<std::tuple<int, int, double, double, double, double>, MomentResult> moments_;
  mutable std::map<std::tuple<int, double, double>, RateResult> rates_;
};

// Free-function forms. Each builds a temporary engine from the parameters;
// prefer AnalyticEngine when evaluating many points.

inline MomentResult moment_mobile_noma(double b, double beta_m, const SystemParams& p,
                                       double inv_jm_area) {
  return AnalyticEngine(p, inv_jm_area)
      .moment(Device::mobile, Scheme::noma, b, beta_m, {p.eps_m, p.eps_t});
}
inline MomentResult moment_mobile_oma(double b, double beta_m, const SystemParams& p,
                                      double inv_jm_area) {
  return AnalyticEngine(p, inv_jm_area)
      .moment(Device::mobile, Scheme::oma, b, beta_m, {p.eps_m, p.eps_t});
}
inline MomentResult moment_iot_noma(double b, double beta_t, const SystemParams& p,
                                    double inv_jm_area) {
  return AnalyticEngine(p, inv_jm_area)
      .moment(Device::iot, Scheme::noma, b, beta_t, {p.eps_m, p.eps_t});
}
inline MomentResult moment_iot_oma(double b, double beta_t, const SystemParams& p,
                                   double inv_jm_area) {
  return AnalyticEngine(p, inv_jm_area)
      .moment(Device::iot, Scheme::oma, b, beta_t, {p.eps_m, p.eps_t});
}
inline MomentResult ccdf_sir_mobile(double beta_m, const SystemParams& p, Scheme sc,
                                    double inv_jm_area) {
  return AnalyticEngine(p, inv_jm_area).ccdf_mobile(beta_m, sc, {p.eps_m, p.eps_t});
}
inline RateResult ergodic_rate(const SystemParams& p, Scheme sc, double inv_jm_area) {
  return AnalyticEngine(p, inv_jm_area).ergodic_rate(sc, {p.eps_m, p.eps_t}, p.eta);
}
inline MomentResult mean_local_delay(const SystemParams& p, Scheme sc, double inv_jm_area) {
  return AnalyticEngine(p, inv_jm_area).mean_local_delay(sc, p.beta_t, {p.eps_m, p.eps_t}, p.eta);
}

/// Moment curve over a threshold grid.
inline MetaCurve moment_curve(const AnalyticEngine& e, Device d, Scheme sc, double b,
                              const std::vector<double>& betas, PowerControl pc) {
  MetaCurve c;
  c.kind = b == 1.0 ? CurveKind::ccdf : CurveKind::moment_b;
  c.source = CurveSource::analytic;
  for (double beta : betas) {
    const auto m = e.moment(d, sc, b, beta, pc);
    c.thresholds.push_back(beta);
    c.values.push_back(m.value);
    c.abs_errors.push_back(m.abs_error_est);
    c.statuses.push_back(m.status);
  }
  return c;
}

}  // namespace anoma

#endif  // ANOMA_ANALYTIC_HPP

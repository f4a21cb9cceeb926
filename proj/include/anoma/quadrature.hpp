#ifndef ANOMA_QUADRATURE_HPP
#define ANOMA_QUADRATURE_HPP

// Thin quadrature layer over Boost.Math: adaptive Gauss-Kronrod for finite and
// semi-infinite ranges, fixed Gauss-Legendre for smooth finite-support inner
// integrals. Results carry an error estimate and a status.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>

namespace anoma {

enum class QuadStatus { converged, diverged, truncated_tail_warning };

inline const char* to_string(QuadStatus s) {
  switch (s) {
    case QuadStatus::converged: return "converged";
    case QuadStatus::diverged: return "diverged";
    case QuadStatus::truncated_tail_warning: return "truncated-tail-warning";
  }
  return "unknown";
}

/// Worst of two statuses; diverged dominates.
inline QuadStatus combine(QuadStatus a, QuadStatus b) {
  if (a == QuadStatus::diverged || b == QuadStatus::diverged) return QuadStatus::diverged;
  if (a == QuadStatus::truncated_tail_warning || b == QuadStatus::truncated_tail_warning)
    return QuadStatus::truncated_tail_warning;
  return QuadStatus::converged;
}

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  QuadStatus status = QuadStatus::converged;
};

inline constexpr double kDefaultRelTol = 1e-6;
inline constexpr unsigned kMaxDepth = 18;

namespace detail {

inline QuadResult classify(double value, double err, double l1, double tol) {
  QuadResult r{value, err, QuadStatus::converged};
  if (!std::isfinite(value) || !std::isfinite(err)) {
    r.status = QuadStatus::diverged;
    return r;
  }
  // Boost terminates on err <= tol * L1; anything well beyond that means the
  // subdivision budget ran out.
  const double scale = std::max(std::abs(value), l1);
  if (err > 100.0 * tol * scale && err > 1e-300) r.status = QuadStatus::diverged;
  return r;
}

}  // namespace detail

/// Adaptive G7K15 on [a, b].
template <class F>
QuadResult integrate(F&& f, double a, double b, double tol = kDefaultRelTol,
                     unsigned max_depth = kMaxDepth) {
  if (a == b) return {};
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, max_depth, tol, &err, &l1);
  return detail::classify(v, err, l1, tol);
}

/// Adaptive quadrature on [lo, inf) after the map x = lo + t/(1-t).
template <class F>
QuadResult integrate_semi_infinite(F&& f, double lo, double tol = kDefaultRelTol,
                                   unsigned max_depth = kMaxDepth) {
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, lo, std::numeric_limits<double>::infinity(), max_depth, tol, &err, &l1);
  return detail::classify(v, err, l1, tol);
}

/// Fixed 20-point Gauss-Legendre on [a, b].
template <class F>
double gauss_legendre(F&& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

/// Composite Gauss-Legendre over consecutive breakpoints. Breakpoints outside
/// [a, b] are ignored.
template <class F>
double gauss_legendre_panels(F&& f, double a, double b, std::initializer_list<double> breaks) {
  double sum = 0.0;
  double lo = a;
  for (double x : breaks) {
    if (x <= lo) continue;
    if (x >= b) break;
    sum += gauss_legendre(f, lo, x);
    lo = x;
  }
  sum += gauss_legendre(f, lo, b);
  return sum;
}

}  // namespace anoma

#endif  // ANOMA_QUADRATURE_HPP

#ifndef ANOMA_DISTRIBUTIONS_HPP
#define ANOMA_DISTRIBUTIONS_HPP

// Link-distance pdfs, pair correlation functions and the non-homogeneous
// interferer densities used by the analytic engine.
//
// All link-distance laws share the Rayleigh form 2 c r exp(-c r^2) with
// c = pi * rho_area * lambda_b, possibly truncated to [0, T].

#include <cmath>
#include <functional>
#include <limits>

#include "anoma/config.hpp"
#include "anoma/rng.hpp"

namespace anoma {

/// A function of radius with its support.
struct RadialDensity {
  std::function<double(double)> evaluate;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  double operator()(double r) const {
    if (r < lo || r > hi) return 0.0;
    return evaluate(r);
  }
};

/// Rayleigh law 2 c r exp(-c r^2) restricted to [0, upper] and renormalized.
class TruncatedRayleigh {
 public:
  TruncatedRayleigh(double c, double upper = std::numeric_limits<double>::infinity())
      : c_(c), upper_(upper), mass_(std::isinf(upper) ? 1.0 : -std::expm1(-c * upper * upper)) {}

  double scale() const { return c_; }
  double upper() const { return upper_; }
  /// Untruncated probability of [0, upper].
  double mass() const { return mass_; }

  double pdf(double r) const {
    if (r < 0.0 || r > upper_) return 0.0;
    return 2.0 * c_ * r * std::exp(-c_ * r * r) / mass_;
  }

  double cdf(double r) const {
    if (r <= 0.0) return 0.0;
    if (r >= upper_) return 1.0;
    return -std::expm1(-c_ * r * r) / mass_;
  }

  double quantile(double u) const { return std::sqrt(-std::log1p(-u * mass_) / c_); }

  double sample(Rng& rng) const { return quantile(uniform01(rng)); }

  /// Radius beyond which the untruncated tail mass is below 1e-17.
  double effective_upper() const { return std::min(upper_, std::sqrt(39.0 / c_)); }

  /// Breakpoints in multiples of the natural scale for panel quadrature.
  double sigma() const { return 1.0 / std::sqrt(c_); }

 private:
  double c_;
  double upper_;
  double mass_;
};

inline double rayleigh_scale(const SystemParams& p) { return kPi * p.rho_area * p.lambda_b; }

/// pdf of the serving distance R_t of the IoT device in a PV cell.
inline double pdf_serving_iot(double r, const SystemParams& p) {
  return TruncatedRayleigh(rayleigh_scale(p)).pdf(r);
}

/// pdf of the serving distance R_m of the mobile user in a JM cell.
inline double pdf_serving_mobile(double r, const SystemParams& p) {
  return TruncatedRayleigh(rayleigh_scale(p), p.L).pdf(r);
}

/// pdf of an interfering mobile user's link distance given its distance d to
/// the typical BS; supported on [0, min(L, d)].
inline double pdf_interferer_mobile(double r, double d, const SystemParams& p) {
  return TruncatedRayleigh(rayleigh_scale(p), std::min(p.L, d)).pdf(r);
}

/// pdf of an interfering IoT device's link distance given its distance d to
/// the typical BS; supported on [0, d].
inline double pdf_interferer_iot(double r, double d, const SystemParams& p) {
  return TruncatedRayleigh(rayleigh_scale(p), d).pdf(r);
}

/// E[|V_o|^{-1}] of the PV cell, the L -> infinity limit of the JM value.
inline double inverse_pv_area(double lambda_b) { return 1.4 * lambda_b; }

/// Pair correlation function of the IoT interferers seen from the typical BS.
inline double pcf_iot(double r, const SystemParams& p) {
  return -std::expm1(-2.0 * kPi * inverse_pv_area(p.lambda_b) * r * r);
}

/// Pair correlation function of the mobile interferers; inv_jm_area is
/// E[|JM cell|^{-1}].
inline double pcf_mobile(double r, double inv_jm_area) {
  return -std::expm1(-2.0 * kPi * inv_jm_area * r * r);
}

inline double interferer_density_iot(double r, const SystemParams& p) {
  return p.lambda_b * pcf_iot(r, p);
}

inline double interferer_density_mobile(double r, double inv_jm_area, const SystemParams& p) {
  return p.lambda_b * pcf_mobile(r, inv_jm_area);
}

inline RadialDensity iot_interferer_density(const SystemParams& p) {
  return {[p](double r) { return interferer_density_iot(r, p); }};
}

inline RadialDensity mobile_interferer_density(const SystemParams& p, double inv_jm_area) {
  return {[p, inv_jm_area](double r) { return interferer_density_mobile(r, inv_jm_area, p); }};
}

}  // namespace anoma

#endif  // ANOMA_DISTRIBUTIONS_HPP

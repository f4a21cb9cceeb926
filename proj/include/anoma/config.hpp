#ifndef ANOMA_CONFIG_HPP
#define ANOMA_CONFIG_HPP

// Model parameters for the adaptive-rate NOMA uplink model, their validation,
// and the flat key=value configuration file format.
//
// Thresholds are linear inside SystemParams. External interfaces accept them
// in dB through the `beta_m_db` / `beta_t_db` keys.

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace anoma {

inline constexpr double kPi = 3.14159265358979323846;

/// Area-scaling constant of the serving link-distance pdf.
inline constexpr double kDefaultRhoArea = 9.0 / 7.0;

/// Distances below this are clamped in every path-loss and power-control factor.
inline constexpr double kDefaultMinDistance = 0.1;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Fraction of mobile users eligible for pairing, 1 - exp(-pi lambda_b L^2).
inline double pairing_fraction(double L, double lambda_b) {
  return -std::expm1(-kPi * lambda_b * L * L);
}

struct ParamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inverse of pairing_fraction.
inline double pairing_radius_from_fraction(double A_L, double lambda_b) {
  if (!(lambda_b > 0.0) || !std::isfinite(lambda_b))
    throw ParamError("lambda_b must be positive, got " + std::to_string(lambda_b));
  if (!(A_L > 0.0 && A_L < 1.0))
    throw ParamError("A_L must lie in (0,1), got " + std::to_string(A_L));
  return std::sqrt(-std::log1p(-A_L) / (kPi * lambda_b));
}

struct SystemParams {
  double lambda_b = 1e-4;                 // BS density [1/m^2]
  double alpha = 4.0;                     // path-loss exponent
  double eps_m = 0.5;                     // mobile power-control fraction
  double eps_t = 1.0;                     // IoT power-control fraction
  double rho_m = 1.0;                     // mobile baseline power [W]
  double rho_t = 1.0;                     // IoT baseline power [W]
  double beta_m = 1.0;                    // mobile SIR threshold (linear)
  double beta_t = 0.31622776601683794;    // IoT SIR threshold (linear), -5 dB
  double L = 30.261;                      // pairing radius [m]
  double A_L = 0.25;                      // pairing fraction
  double eta = 0.5;                       // OMA mobile time share
  double tau = 2.0;                       // mean local delay cap [slots]
  double rho_area = kDefaultRhoArea;
  double min_distance = kDefaultMinDistance;  // [m]
  /// E[1/|JM cell|] in 1/m^2; unset means "estimate by Monte Carlo".
  std::optional<double> inv_jm_area;
  /// User/device densities: documented only, the model is saturated.
  std::optional<double> lambda_m;
  std::optional<double> lambda_t;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Parameter set as supplied by a user; any subset of fields may be present.
struct RawParams {
  std::optional<double> lambda_b, alpha, eps_m, eps_t, rho_m, rho_t;
  std::optional<double> beta_m, beta_t, beta_m_db, beta_t_db;
  std::optional<double> L, A_L, eta, tau, rho_area, min_distance;
  std::optional<double> inv_jm_area, lambda_m, lambda_t;
};

struct FieldIssue {
  std::string field;
  std::string message;
};

class ValidationError : public ParamError {
 public:
  explicit ValidationError(std::vector<FieldIssue> issues)
      : ParamError(format(issues)), issues_(std::move(issues)) {}
  const std::vector<FieldIssue>& issues() const { return issues_; }

 private:
  static std::string format(const std::vector<FieldIssue>& issues) {
    std::string out = "invalid parameters:";
    for (const auto& i : issues) out += " [" + i.field + ": " + i.message + "]";
    return out;
  }
  std::vector<FieldIssue> issues_;
};

/// Reference scenario: lambda_b=1e-4, A_L=0.25, alpha=4,
/// beta_t=-5 dB, rho_m=rho_t=1.
inline RawParams default_raw_params() {
  RawParams r;
  r.lambda_b = 1e-4;
  r.A_L = 0.25;
  r.alpha = 4.0;
  r.beta_t_db = -5.0;
  r.beta_m_db = 0.0;
  r.rho_m = 1.0;
  r.rho_t = 1.0;
  return r;
}

inline RawParams to_raw(const SystemParams& p) {
  RawParams r;
  r.lambda_b = p.lambda_b;
  r.alpha = p.alpha;
  r.eps_m = p.eps_m;
  r.eps_t = p.eps_t;
  r.rho_m = p.rho_m;
  r.rho_t = p.rho_t;
  r.beta_m = p.beta_m;
  r.beta_t = p.beta_t;
  r.L = p.L;
  r.A_L = p.A_L;
  r.eta = p.eta;
  r.tau = p.tau;
  r.rho_area = p.rho_area;
  r.min_distance = p.min_distance;
  r.inv_jm_area = p.inv_jm_area;
  r.lambda_m = p.lambda_m;
  r.lambda_t = p.lambda_t;
  return r;
}

/// Checks every invariant, fills the missing member of {L, A_L}, and converts
/// dB thresholds. All violations are collected before throwing.
inline SystemParams validate(const RawParams& raw) {
  std::vector<FieldIssue> issues;
  SystemParams p;
  auto bad = [&](const char* f, std::string m) { issues.push_back({f, std::move(m)}); };
  auto take = [](const std::optional<double>& v, double& dst) {
    if (v) dst = *v;
  };

  take(raw.lambda_b, p.lambda_b);
  take(raw.alpha, p.alpha);
  take(raw.eps_m, p.eps_m);
  take(raw.eps_t, p.eps_t);
  take(raw.rho_m, p.rho_m);
  take(raw.rho_t, p.rho_t);
  take(raw.eta, p.eta);
  take(raw.tau, p.tau);
  take(raw.rho_area, p.rho_area);
  take(raw.min_distance, p.min_distance);
  p.inv_jm_area = raw.inv_jm_area;
  p.lambda_m = raw.lambda_m;
  p.lambda_t = raw.lambda_t;

  auto threshold = [&](const char* lin_name, const char* db_name,
                       const std::optional<double>& lin,
                       const std::optional<double>& db, double& dst) {
    if (lin && db) {
      if (std::abs(linear_to_db(*lin) - *db) > 1e-9)
        bad(db_name, std::string("conflicts with ") + lin_name);
      dst = *lin;
    } else if (lin) {
      dst = *lin;
    } else if (db) {
      dst = db_to_linear(*db);
    }
  };
  threshold("beta_m", "beta_m_db", raw.beta_m, raw.beta_m_db, p.beta_m);
  threshold("beta_t", "beta_t_db", raw.beta_t, raw.beta_t_db, p.beta_t);

  auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!finite_pos(p.lambda_b)) bad("lambda_b", "must be > 0");
  if (!(std::isfinite(p.alpha) && p.alpha > 2.0))
    bad("alpha", "must be > 2 (interference integrals diverge otherwise)");
  if (!(p.eps_m >= 0.0 && p.eps_m <= 1.0)) bad("eps_m", "must lie in [0,1]");
  if (!(p.eps_t >= 0.0 && p.eps_t <= 1.0)) bad("eps_t", "must lie in [0,1]");
  if (!finite_pos(p.rho_m)) bad("rho_m", "must be > 0");
  if (!finite_pos(p.rho_t)) bad("rho_t", "must be > 0");
  if (!finite_pos(p.beta_m)) bad("beta_m", "must be > 0 (linear)");
  if (!finite_pos(p.beta_t)) bad("beta_t", "must be > 0 (linear)");
  if (!(p.eta > 0.0 && p.eta < 1.0)) bad("eta", "must lie in (0,1)");
  if (!(std::isfinite(p.tau) && p.tau >= 1.0)) bad("tau", "must be >= 1");
  if (!finite_pos(p.rho_area)) bad("rho_area", "must be > 0");
  if (!(std::isfinite(p.min_distance) && p.min_distance >= 0.0))
    bad("min_distance", "must be >= 0");
  if (p.inv_jm_area && !finite_pos(*p.inv_jm_area)) bad("inv_jm_area", "must be > 0");
  if (p.lambda_m && !finite_pos(*p.lambda_m)) bad("lambda_m", "must be > 0");
  if (p.lambda_t && !finite_pos(*p.lambda_t)) bad("lambda_t", "must be > 0");

  const bool density_ok = finite_pos(p.lambda_b);
  if (raw.L && !finite_pos(*raw.L)) bad("L", "must be > 0");
  if (raw.A_L && !(*raw.A_L > 0.0 && *raw.A_L < 1.0)) bad("A_L", "must lie in (0,1)");
  if (!raw.L && !raw.A_L) bad("L", "one of L or A_L is required");

  if (issues.empty() && density_ok) {
    if (raw.L && raw.A_L) {
      p.L = *raw.L;
      p.A_L = *raw.A_L;
      if (std::abs(pairing_fraction(p.L, p.lambda_b) - p.A_L) > 1e-9)
        bad("A_L", "inconsistent with L: expected " +
                       std::to_string(pairing_fraction(p.L, p.lambda_b)));
    } else if (raw.L) {
      p.L = *raw.L;
      p.A_L = pairing_fraction(p.L, p.lambda_b);
    } else {
      p.A_L = *raw.A_L;
      p.L = pairing_radius_from_fraction(p.A_L, p.lambda_b);
    }
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));
  return p;
}

inline SystemParams validate(const SystemParams& p) { return validate(to_raw(p)); }

/// Reference scenario, validated.
inline SystemParams default_params() { return validate(default_raw_params()); }

struct ConfigParseError : ParamError {
  ConfigParseError(int line, const std::string& msg)
      : ParamError("line " + std::to_string(line) + ": " + msg), line(line) {}
  int line;
};

/// Parses flat `key = value` text. '#' starts a comment. Keys are the
/// SystemParams field names; thresholds may use the `_db` suffix.
inline RawParams parse_config(std::istream& in, RawParams base = {}) {
  static const std::map<std::string, std::optional<double> RawParams::*> keys = {
      {"lambda_b", &RawParams::lambda_b},   {"alpha", &RawParams::alpha},
      {"eps_m", &RawParams::eps_m},         {"eps_t", &RawParams::eps_t},
      {"rho_m", &RawParams::rho_m},         {"rho_t", &RawParams::rho_t},
      {"beta_m", &RawParams::beta_m},       {"beta_t", &RawParams::beta_t},
      {"beta_m_db", &RawParams::beta_m_db}, {"beta_t_db", &RawParams::beta_t_db},
      {"L", &RawParams::L},                 {"A_L", &RawParams::A_L},
      {"eta", &RawParams::eta},             {"tau", &RawParams::tau},
      {"rho_area", &RawParams::rho_area},   {"min_distance", &RawParams::min_distance},
      {"inv_jm_area", &RawParams::inv_jm_area},
      {"lambda_m", &RawParams::lambda_m},   {"lambda_t", &RawParams::lambda_t},
  };
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigParseError(lineno, "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigParseError(lineno, "unknown key '" + key + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != val.size())
      throw ConfigParseError(lineno, "value for '" + key + "' is not a number: '" + val + "'");
    // A later threshold key overrides the earlier unit variant.
    if (key == "beta_m") base.beta_m_db.reset();
    if (key == "beta_m_db") base.beta_m.reset();
    if (key == "beta_t") base.beta_t_db.reset();
    if (key == "beta_t_db") base.beta_t.reset();
    if (key == "L") base.A_L.reset();
    if (key == "A_L") base.L.reset();
    base.*(it->second) = v;
  }
  return base;
}

inline RawParams load_config(const std::string& path, RawParams base = {}) {
  std::ifstream in(path);
  if (!in) throw ParamError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

/// Serializes validated parameters in the config file format.
inline std::string to_config_text(const SystemParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda_b = " << p.lambda_b << "\n"
     << "alpha = " << p.alpha << "\n"
     << "eps_m = " << p.eps_m << "\n"
     << "eps_t = " << p.eps_t << "\n"
     << "rho_m = " << p.rho_m << "\n"
     << "rho_t = " << p.rho_t << "\n"
     << "beta_m = " << p.beta_m << "\n"
     << "beta_t = " << p.beta_t << "\n"
     << "L = " << p.L << "\n"
     << "eta = " << p.eta << "\n"
     << "tau = " << p.tau << "\n"
     << "rho_area = " << p.rho_area << "\n"
     << "min_distance = " << p.min_distance << "\n";
  if (p.inv_jm_area) os << "inv_jm_area = " << *p.inv_jm_area << "\n";
  if (p.lambda_m) os << "lambda_m = " << *p.lambda_m << "\n";
  if (p.lambda_t) os << "lambda_t = " << *p.lambda_t << "\n";
  return os.str();
}

}  // namespace anoma

#endif  // ANOMA_CONFIG_HPP

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "anoma/analytic.hpp"

using namespace anoma;

namespace {

// Inverse JM-cell area for the default parameters (shipped cache value).
constexpr double kV = 4.2030167248503485e-4;

SystemParams params(double eps_m, double eps_t) {
  SystemParams p = default_params();
  p.eps_m = eps_m;
  p.eps_t = eps_t;
  return p;
}

const std::vector<double> kBetasDb = {-10.0, -5.0, 0.0, 5.0, 10.0};

}  // namespace

TEST(Kernels, IdentityAtZeroOrder) {
  const SystemParams p = params(0.5, 0.5);
  for (double s : {1e-3, 1.0, 1e3}) {
    EXPECT_NEAR(kernel_I1(s, 0.0, p).value, 1.0, 1e-14);
    EXPECT_NEAR(kernel_I2(s, 0.0, p).value, 1.0, 1e-14);
    EXPECT_NEAR(kernel_M(s, 0.0, p, kV).value, 1.0, 1e-14);
  }
}

TEST(Kernels, IdentityAtZeroScale) {
  const SystemParams p = params(0.3, 0.7);
  EXPECT_EQ(kernel_I1(0.0, 2.0, p).value, 1.0);
  EXPECT_EQ(kernel_I2(0.0, 2.0, p).value, 1.0);
  EXPECT_EQ(kernel_M(0.0, 2.0, p, kV).value, 1.0);
}

TEST(Kernels, I1ClosedFormAtFullInversion) {
  const SystemParams p = params(0.5, 1.0);
  for (double s : {0.01, 0.5, 3.0, 100.0})
    for (double b : {-1.0, 1.0, 2.0, 0.5})
      EXPECT_NEAR(kernel_I1(s, b, p).value, std::pow(1.0 + s, -b), 1e-14 * std::pow(1.0 + s, -b));
}

TEST(Kernels, I1MatchesDirectQuadrature) {
  const SystemParams p = params(0.5, 0.4);
  const TruncatedRayleigh law(rayleigh_scale(p));
  const double e = p.alpha * (p.eps_t - 1.0);
  for (double s : {1e-2, 1.0, 1e2}) {
    const double b = 1.0;
    auto f = [&](double r) {
      return std::pow(1.0 + s * std::pow(std::max(r, p.min_distance), e), -b) * law.pdf(r);
    };
    double ref = 0.0;
    double lo = 0.0;
    for (double x : {0.1, 1.0, 10.0, 50.0, 100.0, 200.0, 400.0}) {
      ref += integrate(f, lo, x, 1e-12).value;
      lo = x;
    }
    EXPECT_NEAR(kernel_I1(s, b, p).value, ref, 1e-8);
  }
}

TEST(Kernels, MobileEqualsIotInLargeRadiusLimit) {
  // With L beyond any link distance, V = 1.4 lambda and equal eps and rho,
  // the two interferer populations share one law.
  SystemParams p = params(0.6, 0.6);
  p.L = 500.0;
  const double V = inverse_pv_area(p.lambda_b);
  for (double s : {1e-3, 0.1, 10.0})
    for (double b : {1.0, 2.0})
      EXPECT_NEAR(kernel_M(s, b, p, V).value, kernel_I2(s, b, p).value, 1e-8);
}

TEST(Kernels, MonotoneInScaleAndOrder) {
  const SystemParams p = params(0.5, 0.5);
  double prev = 1.0;
  for (double s = 1e-3; s < 1e4; s *= 3.0) {
    const double k = kernel_I2(s, 1.0, p).value;
    EXPECT_LE(k, prev + 1e-12);
    EXPECT_LE(kernel_I2(s, 2.0, p).value, k + 1e-12);
    EXPECT_GE(kernel_I2(s, -1.0, p).value, 1.0);
    prev = k;
  }
}

TEST(KernelTable, MatchesDirectEvaluation) {
  const SystemParams p = params(0.5, 0.5);
  const AnalyticEngine e(p, kV);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ls(std::log(1e-6), std::log(1e6));
  for (int i = 0; i < 12; ++i) {
    const double s = std::exp(ls(rng));
    for (double b : {1.0, 2.0}) {
      const double i2 = kernel_I2(s, b, p).value;
      const double m = kernel_M(s, b, p, kV).value;
      const double i1 = kernel_I1(s, b, p).value;
      EXPECT_NEAR(e.table_I2(0.5, b).value(s), i2, 1e-6 * i2) << "s=" << s;
      EXPECT_NEAR(e.table_M(0.5, b).value(s), m, 1e-6 * m) << "s=" << s;
      EXPECT_NEAR(e.table_I1(0.5, b).value(s), i1, 1e-6 * i1) << "s=" << s;
    }
  }
}

TEST(KernelTable, NegativeOrderIsLinearInScale) {
  const AnalyticEngine e(params(0.5, 0.5), kV);
  const auto& t = e.table_I2(0.5, -1.0);
  for (double s : {1e-4, 0.3, 7.0, 1e5}) EXPECT_NEAR(t.log_value(2.0 * s), 2.0 * t.log_value(s),
                                                      1e-12 * std::abs(t.log_value(s)));
  EXPECT_NEAR(t.value(0.7), kernel_I2(0.7, -1.0, params(0.5, 0.5)).value, 1e-8);
}

class MomentFamilies : public ::testing::TestWithParam<std::pair<double, double>> {};

TEST_P(MomentFamilies, ZeroOrderIsOne) {
  const auto [em, et] = GetParam();
  const AnalyticEngine e(params(em, et), kV);
  for (Device d : {Device::mobile, Device::iot})
    for (Scheme sc : {Scheme::noma, Scheme::oma})
      for (double db : kBetasDb)
        EXPECT_NEAR(e.moment(d, sc, 0.0, db_to_linear(db), {em, et}).value, 1.0, 1e-8);
}

TEST_P(MomentFamilies, Inequalities) {
  const auto [em, et] = GetParam();
  const AnalyticEngine e(params(em, et), kV);
  for (Device d : {Device::mobile, Device::iot})
    for (Scheme sc : {Scheme::noma, Scheme::oma})
      for (double db : kBetasDb) {
        const double beta = db_to_linear(db);
        const double m1 = e.moment(d, sc, 1.0, beta, {em, et}).value;
        const double m2 = e.moment(d, sc, 2.0, beta, {em, et}).value;
        EXPECT_LE(m1, 1.0 + 1e-9);
        EXPECT_LE(m2, m1 + 1e-9);
        EXPECT_GE(m2, m1 * m1 - 1e-9);
        const MomentResult mm = e.moment(d, sc, -1.0, beta, {em, et});
        if (mm.converged()) {
          EXPECT_GE(mm.value, 1.0 / m1 - 1e-9 * mm.value);
        }
      }
}

TEST_P(MomentFamilies, OmaDominatesNoma) {
  const auto [em, et] = GetParam();
  const AnalyticEngine e(params(em, et), kV);
  for (Device d : {Device::mobile, Device::iot})
    for (double db : kBetasDb) {
      const double beta = db_to_linear(db);
      EXPECT_GE(e.moment(d, Scheme::oma, 1.0, beta, {em, et}).value,
                e.moment(d, Scheme::noma, 1.0, beta, {em, et}).value - 1e-12);
    }
}

TEST_P(MomentFamilies, SuccessDecreasesWithThreshold) {
  const auto [em, et] = GetParam();
  const AnalyticEngine e(params(em, et), kV);
  for (Device d : {Device::mobile, Device::iot}) {
    double prev = 1.0;
    for (double db = -20.0; db <= 20.0; db += 2.5) {
      const double v = e.moment(d, Scheme::noma, 1.0, db_to_linear(db), {em, et}).value;
      EXPECT_LE(v, prev + 1e-9) << db;
      prev = v;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(PowerControl, MomentFamilies,
                         ::testing::Values(std::make_pair(0.0, 0.0), std::make_pair(0.5, 0.5),
                                           std::make_pair(1.0, 1.0), std::make_pair(0.5, 1.0)));

TEST(Moments, FullInversionReducesToKernels) {
  // eps = 1 removes the serving distance from the scale, so the outer
  // expectation is trivial.
  const SystemParams p = params(1.0, 1.0);
  const AnalyticEngine e(p, kV);
  // Tolerance: spline interpolation of the kernel tables.
  const double tol = 1e-6;
  for (double beta : {0.1, 1.0, 5.0})
    for (double b : {-1.0, 1.0, 2.0}) {
      const double i2 = kernel_I2(beta, b, p).value;
      const double m = kernel_M(beta, b, p, kV).value;
      EXPECT_NEAR(e.moment(Device::iot, Scheme::oma, b, beta, {1.0, 1.0}).value, i2, tol * i2);
      EXPECT_NEAR(e.moment(Device::iot, Scheme::noma, b, beta, {1.0, 1.0}).value, i2 * m,
                  tol * i2 * m);
      EXPECT_NEAR(e.moment(Device::mobile, Scheme::oma, b, beta, {1.0, 1.0}).value, m, tol * m);
      const double full = m * i2 * std::pow(1.0 + beta, -b);
      EXPECT_NEAR(e.moment(Device::mobile, Scheme::noma, b, beta, {1.0, 1.0}).value, full,
                  tol * full)
          << "b=" << b << " beta=" << beta;
    }
}

TEST(Moments, VanishingThresholdGivesCertainSuccess) {
  const AnalyticEngine e(params(0.5, 0.5), kV);
  EXPECT_NEAR(e.ccdf_mobile(1e-9, Scheme::noma, {0.5, 0.5}).value, 1.0, 1e-6);
  EXPECT_NEAR(e.moment(Device::iot, Scheme::noma, 1.0, 1e-9, {0.5, 0.5}).value, 1.0, 1e-6);
}

TEST(Moments, FreeFunctionsMatchEngine) {
  SystemParams p = params(0.25, 0.75);
  const AnalyticEngine e(p, kV);
  EXPECT_EQ(moment_iot_noma(1.0, 0.5, p, kV).value,
            e.moment(Device::iot, Scheme::noma, 1.0, 0.5, {0.25, 0.75}).value);
  EXPECT_EQ(ccdf_sir_mobile(2.0, p, Scheme::oma, kV).value,
            e.ccdf_mobile(2.0, Scheme::oma, {0.25, 0.75}).value);
}

TEST(Delay, DivergesWhenGrowthOutrunsRayleighTail) {
  // alpha (1 - eps_t) > 2 makes the -1st moment infinite.
  const AnalyticEngine e(params(0.5, 0.25), kV);
  const MomentResult d = e.mean_local_delay(Scheme::noma, 0.5, {0.5, 0.25}, 0.0);
  EXPECT_FALSE(d.converged());
  EXPECT_TRUE(std::isinf(d.value));
}

TEST(Delay, OmaIsScaledNegativeMoment) {
  const AnalyticEngine e(params(0.5, 1.0), kV);
  const double beta_t = db_to_linear(-5.0);
  const double m = e.moment(Device::iot, Scheme::oma, -1.0, beta_t, {0.5, 1.0}).value;
  for (double eta : {0.1, 0.5, 0.9})
    EXPECT_NEAR(e.mean_local_delay(Scheme::oma, beta_t, {0.5, 1.0}, eta).value, m / (1.0 - eta),
                1e-12 * m / (1.0 - eta));
  EXPECT_THROW(e.mean_local_delay(Scheme::oma, beta_t, {0.5, 1.0}, 1.0), ParamError);
}

TEST(Delay, AtLeastOneSlot) {
  const AnalyticEngine e(params(0.5, 0.75), kV);
  for (double db : kBetasDb) {
    const auto d = e.mean_local_delay(Scheme::noma, db_to_linear(db), {0.5, 0.75}, 0.0);
    if (d.converged()) {
      EXPECT_GE(d.value, 1.0);
    }
  }
}

TEST(Rate, MatchesIndependentIntegration) {
  const SystemParams p = params(0.5, 0.5);
  const AnalyticEngine e(p, kV);
  const RateResult r = e.ergodic_rate(Scheme::noma, {0.5, 0.5}, 1.0);
  EXPECT_EQ(r.status, QuadStatus::converged);
  // Simpson in t = ln(1 + g) over the same truncation.
  const double T = std::log1p(r.gamma_max);
  const int n = 400;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = T * i / n;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * (t == 0.0 ? 1.0 : e.ccdf_mobile(std::expm1(t), Scheme::noma, {0.5, 0.5}).value);
  }
  const double ref = acc * T / (3.0 * n) / std::log(2.0);
  EXPECT_NEAR(r.value, ref, 1e-4 * ref);
  EXPECT_LT(r.tail_bound, 1e-3);
}

TEST(Rate, OmaScalesWithTimeShareAndBeatsNomaPerSlot) {
  const AnalyticEngine e(params(0.5, 0.5), kV);
  const double unit = e.ergodic_rate(Scheme::oma, {0.5, 0.5}, 1.0).value;
  EXPECT_NEAR(e.ergodic_rate(Scheme::oma, {0.5, 0.5}, 0.3).value, 0.3 * unit, 1e-14 * unit);
  EXPECT_GE(unit, e.ergodic_rate(Scheme::noma, {0.5, 0.5}, 1.0).value);
}

TEST(Curves, CsvHasOneRowPerThreshold) {
  const AnalyticEngine e(params(0.5, 0.5), kV);
  std::vector<double> betas;
  for (double db : kBetasDb) betas.push_back(db_to_linear(db));
  const MetaCurve c = moment_curve(e, Device::mobile, Scheme::noma, 1.0, betas, {0.5, 0.5});
  EXPECT_EQ(c.kind, CurveKind::ccdf);
  std::ostringstream os;
  write_csv(os, c);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("beta_db,value,abs_error,status\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 6);
}

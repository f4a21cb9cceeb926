#include <gtest/gtest.h>

#include <cmath>

#include "anoma/distributions.hpp"
#include "anoma/quadrature.hpp"

using namespace anoma;

namespace {

const SystemParams kP = default_params();

}  // namespace

TEST(Distributions, ServingIotMode) {
  // Mode of 2 c r exp(-c r^2) is 1/sqrt(2c).
  const double mode = 1.0 / std::sqrt(2.0 * rayleigh_scale(kP));
  EXPECT_NEAR(mode, 35.18, 0.01);
  EXPECT_GT(pdf_serving_iot(mode, kP), pdf_serving_iot(mode - 0.5, kP));
  EXPECT_GT(pdf_serving_iot(mode, kP), pdf_serving_iot(mode + 0.5, kP));
}

TEST(Distributions, ServingIotMean) {
  const auto m = integrate([](double r) { return r * pdf_serving_iot(r, kP); }, 0.0, 1000.0, 1e-10);
  EXPECT_NEAR(m.value, 0.5 * std::sqrt(kPi / rayleigh_scale(kP)), 1e-6);
  EXPECT_NEAR(m.value, 44.10, 0.02 * 44.10);
}

TEST(Distributions, PdfsNormalize) {
  auto mass = [](auto&& f, double hi) { return integrate(f, 0.0, hi, 1e-10).value; };
  EXPECT_NEAR(mass([](double r) { return pdf_serving_iot(r, kP); }, 1000.0), 1.0, 1e-9);
  EXPECT_NEAR(mass([](double r) { return pdf_serving_mobile(r, kP); }, kP.L), 1.0, 1e-9);
  for (double d : {5.0, 20.0, 60.0}) {
    EXPECT_NEAR(mass([d](double r) { return pdf_interferer_iot(r, d, kP); }, d), 1.0, 1e-9);
    const double T = std::min(d, kP.L);
    EXPECT_NEAR(mass([d](double r) { return pdf_interferer_mobile(r, d, kP); }, T), 1.0, 1e-9);
  }
}

TEST(Distributions, SupportTruncation) {
  EXPECT_EQ(pdf_serving_mobile(kP.L + 1e-9, kP), 0.0);
  EXPECT_EQ(pdf_interferer_iot(10.0 + 1e-9, 10.0, kP), 0.0);
  EXPECT_EQ(pdf_interferer_mobile(kP.L + 1.0, 100.0, kP), 0.0);
  EXPECT_EQ(pdf_serving_iot(-1.0, kP), 0.0);
}

TEST(Distributions, TruncatedRayleighQuantileInvertsCdf) {
  const TruncatedRayleigh law(rayleigh_scale(kP), kP.L);
  for (double u : {0.01, 0.25, 0.5, 0.9, 0.999}) EXPECT_NEAR(law.cdf(law.quantile(u)), u, 1e-12);
  EXPECT_LE(law.quantile(1.0), kP.L * (1.0 + 1e-12));
}

TEST(Distributions, PcfLimits) {
  EXPECT_EQ(pcf_iot(0.0, kP), 0.0);
  EXPECT_NEAR(pcf_iot(1e4, kP), 1.0, 1e-15);
  // Half point of g_t: 2.8 pi lambda r^2 = ln 2.
  const double half = std::sqrt(5.0 * std::log(2.0) / (14.0 * kPi * kP.lambda_b));
  EXPECT_NEAR(pcf_iot(half, kP), 0.5, 1e-12);
  EXPECT_NEAR(pcf_mobile(half, inverse_pv_area(kP.lambda_b)), 0.5, 1e-12);
}

TEST(Distributions, PcfMonotone) {
  double prev = -1.0;
  for (double r = 0.0; r < 300.0; r += 1.0) {
    const double g = pcf_mobile(r, 4.2e-4);
    EXPECT_GE(g, prev);
    EXPECT_LE(g, 1.0);
    prev = g;
  }
}

TEST(Distributions, InterfererDensityApproachesLambda) {
  EXPECT_NEAR(iot_interferer_density(kP)(1e4), kP.lambda_b, 1e-18);
  EXPECT_NEAR(mobile_interferer_density(kP, 4.2e-4)(1e4), kP.lambda_b, 1e-18);
  EXPECT_LT(iot_interferer_density(kP)(1.0), 1e-3 * kP.lambda_b);
}

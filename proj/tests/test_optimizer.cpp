#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "anoma/optimizer.hpp"

using namespace anoma;

namespace {

constexpr double kV = 4.2030167248503485e-4;

const AnalyticEngine& engine() {
  static const AnalyticEngine e(default_params(), kV);
  return e;
}

}  // namespace

TEST(Optimizer, UnitGrid) {
  const auto g = detail::unit_grid(0.25);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(detail::unit_grid(0.05).size(), 21u);
}

TEST(Optimizer, ResolutionBounds) {
  EXPECT_THROW(optimize_noma(engine(), 2.0, 0.005), ParamError);
  EXPECT_THROW(optimize_oma(engine(), 2.0, 0.3), ParamError);
}

TEST(Optimizer, EtaBisectionMatchesLinearScan) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dd(0.5, 20.0), tt(1.0, 30.0);
  for (int i = 0; i < 2000; ++i) {
    const double d = dd(rng), tau = tt(rng);
    const double res = 0.05;
    const int n = 19;
    int expect = -1;
    for (int k = 0; k < n; ++k)
      if (d / (1.0 - (k + 1) * res) <= tau + kDelaySlack) expect = k;
    std::vector<int> probed;
    EXPECT_EQ(largest_feasible_eta_index(d, tau, n, res, &probed), expect);
    EXPECT_LE(probed.size(), 6u);
  }
  EXPECT_EQ(largest_feasible_eta_index(std::numeric_limits<double>::infinity(), 5.0, 19, 0.05),
            -1);
}

TEST(Optimizer, MaxFeasibleBetaBisection) {
  // delay = 1 + beta: tau = 4 allows beta = 3.
  auto delay = [](double beta) { return 1.0 + beta; };
  EXPECT_NEAR(max_feasible_beta_db(delay, 4.0), linear_to_db(3.0), 1e-3);
  EXPECT_EQ(max_feasible_beta_db(delay, 1.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(max_feasible_beta_db(delay, 1e6), 30.0);
}

TEST(Optimizer, TieBreakTowardSmallerFractions) {
  TracePoint a{0.2, 0.5, 0.0, 1.0, 1.0, true};
  TracePoint b{0.3, 0.1, 0.0, 1.0, 1.0, true};
  EXPECT_TRUE(detail::better(a, b));
  EXPECT_FALSE(detail::better(b, a));
  TracePoint infeasible{0.0, 0.0, 0.0, 9.0, 9.0, false};
  EXPECT_FALSE(detail::better(infeasible, b));
}

TEST(Optimizer, DelayCapBelowOneIsInfeasible) {
  // Every mean local delay is at least one slot.
  const auto r = optimize_noma(engine(), 0.9, 0.25);
  EXPECT_FALSE(r.feasible);
  EXPECT_GE(r.delay_at_opt, 1.0);
  EXPECT_FALSE(optimize_oma(engine(), 0.9, 0.25).feasible);
}

TEST(Optimizer, NomaSelfConsistent) {
  std::vector<TracePoint> trace;
  const auto r = optimize_noma(engine(), 2.0, 0.25, 1, &trace);
  ASSERT_TRUE(r.feasible);
  const PowerControl pc{r.eps_m, r.eps_t};
  EXPECT_EQ(r.rate_at_opt, engine().ergodic_rate(Scheme::noma, pc, 1.0).value);
  EXPECT_EQ(r.delay_at_opt,
            engine().mean_local_delay(Scheme::noma, engine().params().beta_t, pc, 0.0).value);
  EXPECT_LE(r.delay_at_opt, 2.0 + kDelaySlack);
  EXPECT_EQ(r.evaluations, static_cast<long>(trace.size()));
  for (const auto& t : trace) {
    if (t.feasible) {
      EXPECT_LE(t.rate, r.rate_at_opt);
    } else {
      EXPECT_TRUE(std::isnan(t.rate));
    }
  }
}

TEST(Optimizer, LooseCapRecoversUnconstrainedOptimum) {
  std::vector<TracePoint> trace;
  const auto r = optimize_noma(engine(), 1e12, 0.25, 1, &trace);
  double best = 0.0;
  for (double em : detail::unit_grid(0.25))
    for (double et : detail::unit_grid(0.25)) {
      const auto d = engine().mean_local_delay(Scheme::noma, engine().params().beta_t, {em, et}, 0.0);
      if (d.converged()) best = std::max(best, engine().ergodic_rate(Scheme::noma, {em, et}, 1.0).value);
    }
  EXPECT_GE(r.rate_at_opt, best);
}

TEST(Optimizer, OmaSelfConsistent) {
  std::vector<TracePoint> trace;
  const auto r = optimize_oma(engine(), 2.0, 0.25, 1, &trace);
  ASSERT_TRUE(r.feasible);
  const PowerControl pc{r.eps_m, r.eps_t};
  EXPECT_NEAR(r.rate_at_opt, r.eta * engine().ergodic_rate(Scheme::oma, pc, 1.0).value, 1e-14);
  EXPECT_NEAR(r.delay_at_opt,
              engine().mean_local_delay(Scheme::oma, engine().params().beta_t, pc, r.eta).value,
              1e-12 * r.delay_at_opt);
  EXPECT_LE(r.delay_at_opt, 2.0 + kDelaySlack);
  // The next eta up on the grid must break the cap.
  if (r.eta + 0.25 < 1.0 - 1e-12) {
    EXPECT_GT(engine().mean_local_delay(Scheme::oma, engine().params().beta_t, pc, r.eta + 0.25)
                  .value,
              2.0);
  }
}

TEST(Optimizer, TraceCsv) {
  std::ostringstream os;
  write_csv(os, {TracePoint{0.5, 0.25, 0.3, 1.5, 2.0, true}});
  EXPECT_EQ(os.str(), "eps_m,eps_t,eta,rate,delay,feasible\n0.5,0.25,0.3,1.5,2,1\n");
}

#include <cmath>
#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "bermudan/error.hpp"
#include "bermudan/gbm.hpp"
#include "bermudan/parallel.hpp"

namespace {

using namespace bermudan;

GbmModel put_model(std::size_t dim, double sigma = 0.2) {
  GbmModel m;
  m.payoff = PayoffKind::basket_put;
  m.rate = 0.05;
  m.dividend = 0.0;
  m.volatility = sigma;
  m.strike = 100.0;
  m.spot.assign(dim, 100.0);
  return m;
}

TEST(TimeGrid, StepsCoverMaturity) {
  for (std::size_t j : {1u, 3u, 6u, 9u}) {
    const TimeGrid g = TimeGrid::with_max_step(3.0, j, 0.01);
    EXPECT_LE(g.dt(), 0.01 + 1e-15);
    EXPECT_NEAR(g.dt() * static_cast<double>(g.total_steps()), 3.0,
                3.0 * std::numeric_limits<double>::epsilon() * 4);
    EXPECT_EQ(g.time(g.total_steps()), 3.0);
    for (std::size_t i = 0; i < j; ++i)
      EXPECT_LT(g.fine_index(i), g.fine_index(i + 1));
  }
  EXPECT_EQ(TimeGrid::with_max_step(3.0, 3, 0.01).substeps(), 100u);
  EXPECT_EQ(TimeGrid::with_max_step(3.0, 9, 0.01).substeps(), 34u);
}

TEST(TimeGrid, RejectsDegenerateInput) {
  EXPECT_THROW(TimeGrid(3.0, 0, 10), ValidationError);
  EXPECT_THROW(TimeGrid(3.0, 3, 0), ValidationError);
  EXPECT_THROW(TimeGrid(-1.0, 3, 10), ValidationError);
}

TEST(GbmModel, Validation) {
  GbmModel m = put_model(2);
  EXPECT_NO_THROW(m.validate());
  m.volatility = 0.0;
  EXPECT_THROW(m.validate(), ValidationError);
  m = put_model(2);
  m.spot[1] = -1.0;
  EXPECT_THROW(m.validate(), ValidationError);
  m = put_model(0);
  EXPECT_THROW(m.validate(), ValidationError);
  m = put_model(1);
  m.strike = 0.0;
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(GbmModel, Payoffs) {
  GbmModel m = put_model(2);
  std::vector<double> x{90.0, 100.0};
  EXPECT_DOUBLE_EQ(m.intrinsic(x), 5.0);
  m.payoff = PayoffKind::max_call;
  x = {120.0, 105.0};
  EXPECT_DOUBLE_EQ(m.intrinsic(x), 20.0);
  EXPECT_DOUBLE_EQ(m.discounted_payoff(1.0, x), 20.0 * std::exp(-0.05));
  EXPECT_EQ(parse_payoff_kind("max_call"), PayoffKind::max_call);
  EXPECT_THROW(parse_payoff_kind("digital"), ValidationError);
}

TEST(Simulation, EmptyBatchRefused) {
  const GbmModel m = put_model(1);
  EXPECT_THROW(simulate_gbm(m, TimeGrid(1.0, 1, 4), 0, make_stream(1, 0)), ValidationError);
}

TEST(Simulation, InvariantsAndIncrementConsistency) {
  GbmModel m = put_model(3);
  m.dividend = 0.1;
  m.spot = {90.0, 100.0, 110.0};
  const TimeGrid g(1.0, 2, 5);
  const PathBatch b = simulate_gbm(m, g, 50, make_stream(5, 2));
  const double drift = (m.rate - m.dividend - 0.5 * m.volatility * m.volatility) * g.dt();
  for (std::size_t p = 0; p < b.size(); ++p) {
    for (std::size_t d = 0; d < 3; ++d) EXPECT_EQ(b.state(p, 0)[d], m.spot[d]);
    for (std::size_t s = 0; s < g.total_steps(); ++s)
      for (std::size_t d = 0; d < 3; ++d) {
        const double x = b.state(p, s + 1)[d];
        ASSERT_GT(x, 0.0);
        const double implied = std::log(x / b.state(p, s)[d]);
        EXPECT_NEAR(implied, drift + m.volatility * b.increment(p, s)[d], 1e-13);
      }
  }
}

TEST(Simulation, DeterministicLimit) {
  GbmModel m = put_model(2, 1e-12);
  m.dividend = 0.02;
  const TimeGrid g(3.0, 3, 100);
  const PathBatch b = simulate_gbm(m, g, 100, make_stream(1, 1));
  const double expected = 100.0 * std::exp((m.rate - m.dividend) * 3.0);
  for (std::size_t p = 0; p < b.size(); ++p)
    for (double x : b.state(p, g.total_steps())) EXPECT_LT(std::abs(x / expected - 1.0), 1e-6);
}

TEST(Simulation, Reproducible) {
  const GbmModel m = put_model(2);
  const TimeGrid g(1.0, 2, 10);
  const PathBatch a = simulate_gbm(m, g, 20, make_stream(9, 4));
  const PathBatch b = simulate_gbm(m, g, 20, make_stream(9, 4));
  for (std::size_t p = 0; p < 20; ++p)
    for (std::size_t s = 0; s <= g.total_steps(); ++s)
      for (std::size_t d = 0; d < 2; ++d) EXPECT_EQ(a.state(p, s)[d], b.state(p, s)[d]);
}

TEST(Simulation, BlockSplitMatchesSingleBatch) {
  const GbmModel m = put_model(2);
  const TimeGrid g(1.0, 2, 10);
  const auto stream = make_stream(9, 4);
  const PathBatch whole = simulate_gbm(m, g, 30, stream);
  const PathBatch tail = simulate_gbm(m, g, 12, stream, 18);
  for (std::size_t p = 0; p < 12; ++p)
    for (std::size_t s = 0; s < g.total_steps(); ++s)
      for (std::size_t d = 0; d < 2; ++d)
        EXPECT_EQ(tail.increment(p, s)[d], whole.increment(p + 18, s)[d]);
}

TEST(Simulation, WorkerCountDoesNotChangePaths) {
  const GbmModel m = put_model(2);
  const TimeGrid g(1.0, 1, 8);
  setenv("BERMUDAN_WORKERS", "1", 1);
  const PathBatch a = simulate_gbm(m, g, 1000, make_stream(3, 3));
  setenv("BERMUDAN_WORKERS", "4", 1);
  const PathBatch b = simulate_gbm(m, g, 1000, make_stream(3, 3));
  unsetenv("BERMUDAN_WORKERS");
  for (std::size_t p = 0; p < 1000; ++p)
    EXPECT_EQ(a.state(p, g.total_steps())[1], b.state(p, g.total_steps())[1]);
}

TEST(Simulation, LognormalMomentsAtMaturity) {
  const GbmModel m = put_model(1);
  const TimeGrid g(3.0, 1, 30);
  const std::size_t n = 100000;
  const PathBatch b = simulate_gbm(m, g, n, make_stream(20240901, 17));
  double s = 0.0, s2 = 0.0, l = 0.0, l2 = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double x = b.state(p, g.total_steps())[0];
    s += x;
    s2 += x * x;
    const double y = std::log(x / 100.0);
    l += y;
    l2 += y * y;
  }
  const double dn = static_cast<double>(n);
  const double mean = s / dn;
  const double se = std::sqrt((s2 / dn - mean * mean) / (dn - 1.0));
  EXPECT_LT(std::abs(mean - 100.0 * std::exp(0.15)), 3.0 * se);
  const double log_var = (l2 - l * l / dn) / (dn - 1.0);
  EXPECT_LT(std::abs(log_var / (0.04 * 3.0) - 1.0), 0.02);
}

TEST(Simulation, DiscountedDriftlessAtEveryExerciseDate) {
  GbmModel m = put_model(2);
  m.dividend = 0.1;
  const TimeGrid g(3.0, 3, 20);
  const std::size_t n = 20000;
  const PathBatch b = simulate_gbm(m, g, n, make_stream(4, 4));
  for (std::size_t j = 1; j <= 3; ++j) {
    const double t = g.exercise_time(j);
    for (std::size_t d = 0; d < 2; ++d) {
      double s = 0.0, s2 = 0.0;
      for (std::size_t p = 0; p < n; ++p) {
        const double v = std::exp(-(m.rate - m.dividend) * t) * b.state(p, g.fine_index(j))[d] / 100.0;
        s += v;
        s2 += v * v;
      }
      const double mean = s / n;
      const double se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
      EXPECT_LT(std::abs(mean - 1.0), 4.0 * se) << "date " << j << " dim " << d;
    }
  }
}

}  // namespace

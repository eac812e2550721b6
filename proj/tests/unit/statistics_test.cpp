#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bermudan/error.hpp"
#include "bermudan/statistics.hpp"
#include "oracles.hpp"

namespace {

using namespace bermudan;

TEST(EmpiricalVariance, TwoPointAndConstant) {
  const std::vector<double> two{1.0, 3.0};
  EXPECT_DOUBLE_EQ(empirical_variance(two).mean, 2.0);
  EXPECT_DOUBLE_EQ(empirical_variance(two).variance, 2.0);
  const std::vector<double> flat(7, 4.5);
  EXPECT_EQ(empirical_variance(flat).variance, 0.0);
  EXPECT_THROW(empirical_variance(std::vector<double>{1.0}), ValidationError);
}

TEST(EmpiricalVariance, UnbiasedOnSmallSamples) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  const int reps = 10000;
  double sum = 0.0, sum2 = 0.0;
  std::vector<double> sample(5);
  for (int r = 0; r < reps; ++r) {
    for (double& x : sample) x = normal(rng);
    const double v = empirical_variance(sample).variance;
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / (reps - 1));
  EXPECT_LT(std::abs(mean - 1.0), 3.0 * se);
}

TEST(WeightedMoments, ProbabilityWeights) {
  const std::vector<double> x{1.0, 3.0, 10.0};
  const std::vector<double> w{0.25, 0.5, 0.25};
  const auto m = weighted_moments(x, w);
  EXPECT_DOUBLE_EQ(m.mean, 0.25 + 1.5 + 2.5);
  const double var = 0.25 * std::pow(1 - 4.25, 2) + 0.5 * std::pow(3 - 4.25, 2) + 0.25 * std::pow(10 - 4.25, 2);
  EXPECT_DOUBLE_EQ(m.variance, var);
  EXPECT_THROW(weighted_moments(x, std::vector<double>{1.0}), ValidationError);
}

TEST(SampleSize, AlgebraicExample) {
  EXPECT_EQ(sample_size_heuristic(0.5, 1.0, 1.0), 10u);
  EXPECT_EQ(sample_size_heuristic(0.5, 4.0, 0.5), 10u);
}

TEST(SampleSize, SmallKappaLimit) {
  // As kappa -> 0 only q / sqrt(n) < 1 remains: n > q^2.
  EXPECT_EQ(sample_size_heuristic(1e-9, 9.0, 1.0), 10u);
  EXPECT_EQ(sample_size_heuristic(1e-9, 2.0, 1.5), 5u);
}

TEST(SampleSize, MatchesDirectScan) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> kappa(0.02, 0.95), c(0.05, 30.0), ca(0.2, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double k = kappa(rng), cc = c(rng), a = ca(rng);
    EXPECT_EQ(sample_size_heuristic(k, cc, a), oracle::sample_size_scan(k, cc, a)) << k << " " << cc << " " << a;
  }
}

TEST(SampleSize, MonotoneInKappa) {
  for (double c : {0.5, 1.0, 7.0}) {
    std::size_t previous = 0;
    for (double k = 0.05; k < 0.99; k += 0.05) {
      const std::size_t n = sample_size_heuristic(k, c, 1.96);
      EXPECT_GE(n, previous);
      previous = n;
    }
    EXPECT_LE(sample_size_heuristic(0.3, c, 1.0), sample_size_heuristic(0.6, c, 1.0));
  }
}

TEST(SampleSize, DomainErrors) {
  EXPECT_THROW(sample_size_heuristic(1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(sample_size_heuristic(0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(sample_size_heuristic(0.5, -1.0, 1.0), DomainError);
  EXPECT_THROW(sample_size_heuristic(0.5, 1.0, 0.0), DomainError);
}

}  // namespace

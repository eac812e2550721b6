#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bermudan/error.hpp"
#include "bermudan/european.hpp"
#include "oracles.hpp"

namespace {

using namespace bermudan;

const QuadratureSpec kTight{1e-12, 1e-14, 400, -8.0};

TEST(NormalCdf, MatchesReference) {
  for (double x : {-37.0, -8.0, -3.0, -1.0, 0.0, 0.5, 2.0, 8.0}) {
    const double ref = oracle::normal_cdf(x);
    EXPECT_LE(std::abs(normal_cdf(x) - ref), 1e-15 * ref) << x;
  }
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
}

TEST(BlackScholes, AgainstIndependentFormula) {
  for (double s : {80.0, 100.0, 125.0})
    for (double tau : {0.1, 1.0, 3.0}) {
      EXPECT_NEAR(bs_put(s, 100, 0.05, 0.2, tau).price, oracle::bs_put(s, 100, 0.05, 0.0, 0.2, tau), 1e-12);
      EXPECT_NEAR(bs_call(s, 100, 0.05, 0.3, tau, 0.1).price, oracle::bs_call(s, 100, 0.05, 0.1, 0.3, tau),
                  1e-12);
    }
}

TEST(BlackScholes, DeterministicLimit) {
  EXPECT_NEAR(bs_put(100, 100, 0.05, 1e-12, 3.0).price, 0.0, 1e-12);
}

TEST(BlackScholes, ExpiryGivesIntrinsicWithSubgradient) {
  const auto itm = bs_put(90, 100, 0.05, 0.2, 0.0);
  EXPECT_EQ(itm.price, 10.0);
  EXPECT_EQ(itm.deltas[0], -1.0);
  const auto kink = bs_put(100, 100, 0.05, 0.2, 0.0);
  EXPECT_EQ(kink.price, 0.0);
  EXPECT_EQ(kink.deltas[0], 0.0);
  EXPECT_EQ(bs_call(120, 100, 0.05, 0.2, 0.0).deltas[0], 1.0);
}

TEST(BlackScholes, DeltaMatchesFiniteDifference) {
  for (double s : {70.0, 100.0, 140.0}) {
    const double h = 1e-4 * s;
    const double fd = (bs_put(s + h, 100, 0.05, 0.2, 2.0).price - bs_put(s - h, 100, 0.05, 0.2, 2.0).price) / (2 * h);
    EXPECT_NEAR(bs_put(s, 100, 0.05, 0.2, 2.0).deltas[0], fd, 1e-6);
    EXPECT_LE(bs_put(s, 100, 0.05, 0.2, 2.0).deltas[0], 0.0);
  }
}

TEST(BlackScholes, RejectsBadInput) {
  EXPECT_THROW(bs_put(-1, 100, 0.05, 0.2, 1.0), DomainError);
  EXPECT_THROW(bs_put(100, 100, 0.05, 0.2, -1.0), DomainError);
}

TEST(MaxCall, SingleAssetIsBlackScholesCall) {
  for (double s : {80.0, 100.0, 120.0}) {
    const std::vector<double> x{s};
    const double c = max_call_price(x, 100, 0.05, 0.1, 0.2, 3.0, kTight);
    EXPECT_NEAR(c, oracle::bs_call(s, 100, 0.05, 0.1, 0.2, 3.0), 1e-8) << s;
  }
}

TEST(MaxCall, PutCallParityThroughSingleAssetFormula) {
  for (double s : {85.0, 100.0, 115.0}) {
    const std::vector<double> x{s};
    const double call = max_call_price(x, 100, 0.05, 0.0, 0.2, 3.0, kTight);
    const double put = bs_put(s, 100, 0.05, 0.2, 3.0).price;
    EXPECT_NEAR(call - put, s - 100 * std::exp(-0.15), 1e-8);
  }
}

TEST(MaxCall, MonteCarloAgreement) {
  const std::vector<std::vector<double>> cases{{100}, {100, 100}, {90, 100, 110, 95, 105}};
  std::uint64_t seed = 11;
  for (const auto& x : cases) {
    const double c = max_call_price(x, 100, 0.05, 0.1, 0.2, 3.0);
    const auto mc = oracle::mc_max_call(x, 100, 0.05, 0.1, 0.2, 3.0, 1'000'000, seed++);
    EXPECT_LT(std::abs(c - mc.mean), 4 * mc.se) << "D=" << x.size() << " formula " << c << " mc " << mc.mean;
  }
}

TEST(MaxCall, HomogeneousOfDegreeOne) {
  const std::vector<double> x{95, 105};
  const std::vector<double> x2{190, 210};
  const double c = max_call_price(x, 100, 0.05, 0.1, 0.2, 3.0, kTight);
  EXPECT_NEAR(max_call_price(x2, 200, 0.05, 0.1, 0.2, 3.0, kTight), 2 * c, 1e-8);
}

TEST(MaxCall, EulerIdentityOnGrid) {
  for (double s : {90.0, 100.0, 110.0})
    for (double k : {90.0, 100.0, 110.0}) {
      const std::vector<double> x{s, s * 1.05, s * 0.97, s * 1.1, s * 0.9};
      const auto q = max_call_quote(x, k, 0.05, 0.1, 0.2, 3.0, kTight);
      const double h = 1e-4 * k;
      const double dk = (max_call_price(x, k + h, 0.05, 0.1, 0.2, 3.0, kTight) -
                         max_call_price(x, k - h, 0.05, 0.1, 0.2, 3.0, kTight)) / (2 * h);
      double euler = k * dk;
      for (std::size_t l = 0; l < x.size(); ++l) euler += x[l] * q.deltas[l];
      EXPECT_LT(std::abs(euler - q.price), 1e-5 * q.price) << s << " " << k;
    }
}

TEST(MaxCall, DeltasMatchFiniteDifferences) {
  for (const std::vector<double>& x : {std::vector<double>{100, 100}, std::vector<double>{85, 120, 100, 93, 107}}) {
    const auto q = max_call_quote(x, 100, 0.05, 0.1, 0.2, 1.5, kTight);
    for (std::size_t l = 0; l < x.size(); ++l) {
      auto up = x, down = x;
      const double h = 1e-4 * x[l];
      up[l] += h;
      down[l] -= h;
      const double fd = (max_call_price(up, 100, 0.05, 0.1, 0.2, 1.5, kTight) -
                         max_call_price(down, 100, 0.05, 0.1, 0.2, 1.5, kTight)) / (2 * h);
      EXPECT_NEAR(q.deltas[l], fd, 1e-5) << l;
      EXPECT_GE(q.deltas[l], 0.0);
      EXPECT_LE(q.deltas[l], std::exp(-0.1 * 1.5));
    }
  }
}

TEST(MaxCall, SymmetricSpotsGiveEqualDeltas) {
  const std::vector<double> x(5, 100.0);
  const auto d = max_call_deltas(x, 100, 0.05, 0.1, 0.2, 3.0);
  for (double v : d) EXPECT_NEAR(v, d[0], 1e-8);
}

TEST(MaxCall, LowerBoundByIntrinsicForward) {
  const std::vector<double> x{130, 90, 110};
  const double c = max_call_price(x, 100, 0.05, 0.1, 0.2, 0.5);
  EXPECT_GE(c, 130 * std::exp(-0.05) - 100 * std::exp(-0.025) - 1e-9);
}

TEST(MaxCall, TruncationInsensitive) {
  QuadratureSpec deeper = kTight;
  deeper.lower_truncation = -10.0;
  for (double s : {90.0, 100.0, 110.0}) {
    const std::vector<double> x{s, s, s, s, s};
    const double a = max_call_price(x, 100, 0.05, 0.1, 0.2, 3.0, kTight);
    const double b = max_call_price(x, 100, 0.05, 0.1, 0.2, 3.0, deeper);
    EXPECT_LT(std::abs(a - b), 1e-9 * a);
  }
}

TEST(MaxCall, MonotoneInEachSpot) {
  std::vector<double> x{95, 100, 105};
  for (std::size_t l = 0; l < 3; ++l) {
    double prev = -1.0;
    for (double s = 60.0; s <= 160.0; s += 5.0) {
      auto y = x;
      y[l] = s;
      const double c = max_call_price(y, 100, 0.05, 0.1, 0.2, 3.0);
      EXPECT_GE(c, prev - 1e-9);
      prev = c;
    }
  }
}

TEST(MaxCall, ExpiryIsIntrinsic) {
  const std::vector<double> x{90, 120};
  const auto q = max_call_quote(x, 100, 0.05, 0.1, 0.2, 0.0);
  EXPECT_EQ(q.price, 20.0);
  EXPECT_EQ(q.deltas[0], 0.0);
  EXPECT_EQ(q.deltas[1], 1.0);
}

TEST(BasketMoments, MatchDoubleSumOracle) {
  const std::vector<double> x{90, 100, 110, 95, 105};
  const auto m = basket_moments(x, 0.05, 0.2, 3.0, 0.02);
  const auto [first, second] = oracle::basket_moments(x, 0.05, 0.02, 0.2, 3.0);
  EXPECT_NEAR(m.first, first, 1e-10 * first);
  EXPECT_NEAR(m.second, second, 1e-10 * second);
}

TEST(MomentMatch, MatchedLognormalReproducesBasketMoments) {
  for (const std::vector<double>& x : {std::vector<double>(5, 100.0), std::vector<double>{90, 100, 110, 95, 105}}) {
    const auto matched = match_basket(x, 0.2, 3.0);
    const auto basket = basket_moments(x, 0.05, 0.2, 3.0);
    const auto logn = lognormal_moments(matched.g0, 0.05, matched.sigma, 3.0);
    EXPECT_NEAR(logn.first, basket.first, 1e-10 * basket.first);
    EXPECT_NEAR(logn.second, basket.second, 1e-10 * basket.second);
  }
}

TEST(MomentMatch, SingleAssetIsExact) {
  const std::vector<double> x{97};
  const auto q = basket_put_moment_match(x, 100, 0.05, 0.2, 2.0);
  EXPECT_NEAR(match_basket(x, 0.2, 2.0).sigma, 0.2, 1e-12);
  EXPECT_NEAR(q.price, bs_put(97, 100, 0.05, 0.2, 2.0).price, 1e-12);
}

TEST(MomentMatch, DeltasAreEqualChainRule) {
  const std::vector<double> x{90, 100, 110, 95, 105};
  const auto q = basket_put_moment_match(x, 100, 0.05, 0.2, 3.0);
  const auto m = match_basket(x, 0.2, 3.0);
  const double expected = bs_put(m.g0, 100, 0.05, m.sigma, 3.0).deltas[0] / 5.0;
  for (double d : q.deltas) {
    EXPECT_DOUBLE_EQ(d, expected);
    EXPECT_LE(d, 0.0);
  }
}

TEST(MomentMatch, CloseToMonteCarloBasketPut) {
  const std::vector<double> x(5, 100.0);
  const auto q = basket_put_moment_match(x, 100, 0.05, 0.2, 3.0);
  const auto mc = oracle::mc_basket_put(x, 100, 0.05, 0.0, 0.2, 3.0, 1'000'000, 2024);
  EXPECT_LT(std::abs(q.price - mc.mean), 4 * mc.se) << q.price << " vs " << mc.mean << " se " << mc.se;
}

TEST(MomentMatch, MonotoneInEachSpotAndExpiry) {
  std::vector<double> x{95, 100, 105};
  for (std::size_t l = 0; l < 3; ++l) {
    double prev = 1e300;
    for (double s = 60.0; s <= 160.0; s += 5.0) {
      auto y = x;
      y[l] = s;
      const double p = basket_put_moment_match(y, 100, 0.05, 0.2, 3.0).price;
      EXPECT_LE(p, prev + 1e-12);
      prev = p;
    }
  }
  const std::vector<double> low{80, 90};
  const auto q = basket_put_moment_match(low, 100, 0.05, 0.2, 0.0);
  EXPECT_EQ(q.price, 15.0);
}

}  // namespace

#pragma once

// European prices and deltas under independent GBMs with common volatility.
// All prices are values at the valuation date (not discounted to time 0),
// `tau` is the time to maturity.

#include <span>
#include <vector>

#include "bermudan/quadrature.hpp"

namespace bermudan {

struct EuropeanQuote {
  double price = 0.0;
  std::vector<double> deltas;  // d price / d spot_l
  double time_to_maturity = 0.0;
};

double normal_cdf(double x);
double normal_pdf(double x);

// Black-Scholes with continuous dividend yield. tau = 0 gives the intrinsic
// value with delta -1 / 0 (put) or 1 / 0 (call), 0 at the kink.
EuropeanQuote bs_put(double spot, double strike, double rate, double sigma, double tau,
                     double dividend = 0.0);
EuropeanQuote bs_call(double spot, double strike, double rate, double sigma, double tau,
                      double dividend = 0.0);

struct BasketMoments {
  double first = 0.0;   // E[S_T]
  double second = 0.0;  // E[S_T^2]
};

// Exact first two moments of the arithmetic average S_T of independent GBMs.
BasketMoments basket_moments(std::span<const double> spots, double rate, double sigma, double tau,
                             double dividend = 0.0);
// Moments of a single lognormal G_T started at g0 with volatility sigma.
BasketMoments lognormal_moments(double g0, double rate, double sigma, double tau,
                                double dividend = 0.0);

struct MatchedLognormal {
  double g0 = 0.0;     // average of the spots
  double sigma = 0.0;  // volatility matching E[S_T^2]
};

MatchedLognormal match_basket(std::span<const double> spots, double sigma, double tau);

// Basket put approximated by a Black-Scholes put on the matched lognormal.
// Every delta is the chain-rule approximation dBS/dG0 / D.
EuropeanQuote basket_put_moment_match(std::span<const double> spots, double strike, double rate,
                                      double sigma, double tau, double dividend = 0.0);

// Allocation-free variant: writes D deltas and returns the price.
double basket_put_moment_match(std::span<const double> spots, double strike, double rate,
                               double sigma, double tau, double dividend, std::span<double> deltas);

// Call on the maximum of D assets, one Gaussian integral per asset.
double max_call_price(std::span<const double> spots, double strike, double rate, double dividend,
                      double sigma, double tau, const QuadratureSpec& quad = {});
std::vector<double> max_call_deltas(std::span<const double> spots, double strike, double rate,
                                    double dividend, double sigma, double tau,
                                    const QuadratureSpec& quad = {});
EuropeanQuote max_call_quote(std::span<const double> spots, double strike, double rate,
                             double dividend, double sigma, double tau,
                             const QuadratureSpec& quad = {});

// Allocation-free variant: writes D deltas and returns the price.
double max_call_quote(std::span<const double> spots, double strike, double rate, double dividend,
                      double sigma, double tau, const QuadratureSpec& quad,
                      std::span<double> deltas);

}  // namespace bermudan

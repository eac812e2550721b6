#include "bermudan/european.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bermudan/error.hpp"

namespace bermudan {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr std::size_t kMaxAssets = 64;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw DomainError(std::string("european: ") + what + " must be positive");
}

}  // namespace

// erfc at the rounded argument a, corrected to first order by the rounding
// residual of -x / sqrt(2); keeps the relative error near 1 ulp in the tails.
double normal_cdf(double x) {
  constexpr double kInvSqrt2Low = -4.833646656726457e-17;
  const double a = -x * kInvSqrt2;
  const double residual = std::fma(-x, kInvSqrt2, -a) - x * kInvSqrt2Low;
  const double slope = 2.0 * std::numbers::inv_sqrtpi * std::exp(-a * a);
  return 0.5 * (std::erfc(a) - slope * residual);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

EuropeanQuote bs_put(double spot, double strike, double rate, double sigma, double tau,
                     double dividend) {
  require_positive(spot, "spot");
  require_positive(strike, "strike");
  require_positive(sigma, "volatility");
  if (tau < 0.0) throw DomainError("european: negative time to maturity");
  if (tau == 0.0) return {std::max(strike - spot, 0.0), {spot < strike ? -1.0 : 0.0}, 0.0};
  const double vol = sigma * std::sqrt(tau);
  const double d1 = (std::log(spot / strike) + (rate - dividend + 0.5 * sigma * sigma) * tau) / vol;
  const double d2 = d1 - vol;
  const double df = std::exp(-rate * tau);
  const double dq = std::exp(-dividend * tau);
  const double price = strike * df * normal_cdf(-d2) - spot * dq * normal_cdf(-d1);
  return {price, {-dq * normal_cdf(-d1)}, tau};
}

EuropeanQuote bs_call(double spot, double strike, double rate, double sigma, double tau,
                      double dividend) {
  require_positive(spot, "spot");
  require_positive(strike, "strike");
  require_positive(sigma, "volatility");
  if (tau < 0.0) throw DomainError("european: negative time to maturity");
  if (tau == 0.0) return {std::max(spot - strike, 0.0), {spot > strike ? 1.0 : 0.0}, 0.0};
  const double vol = sigma * std::sqrt(tau);
  const double d1 = (std::log(spot / strike) + (rate - dividend + 0.5 * sigma * sigma) * tau) / vol;
  const double d2 = d1 - vol;
  const double dq = std::exp(-dividend * tau);
  const double price = spot * dq * normal_cdf(d1) - strike * std::exp(-rate * tau) * normal_cdf(d2);
  return {price, {dq * normal_cdf(d1)}, tau};
}

BasketMoments basket_moments(std::span<const double> spots, double rate, double sigma, double tau,
                             double dividend) {
  const double d = static_cast<double>(spots.size());
  const double growth = std::exp((rate - dividend) * tau);
  double sum = 0.0;
  double cross = 0.0;
  for (std::size_t i = 0; i < spots.size(); ++i) {
    sum += spots[i];
    for (std::size_t j = 0; j < spots.size(); ++j)
      cross += spots[i] * spots[j] * (i == j ? std::exp(sigma * sigma * tau) : 1.0);
  }
  return {sum / d * growth, cross / (d * d) * growth * growth};
}

BasketMoments lognormal_moments(double g0, double rate, double sigma, double tau, double dividend) {
  const double growth = std::exp((rate - dividend) * tau);
  return {g0 * growth, g0 * g0 * growth * growth * std::exp(sigma * sigma * tau)};
}

MatchedLognormal match_basket(std::span<const double> spots, double sigma, double tau) {
  if (spots.empty()) throw DomainError("european: empty basket");
  for (double x : spots) require_positive(x, "spot");
  require_positive(tau, "time to maturity");
  double sum = 0.0;
  double squares = 0.0;
  for (double x : spots) {
    sum += x;
    squares += x * x;
  }
  // sum_ij x_i x_j e^{1{i=j} sigma^2 tau} / (sum x)^2 = 1 + sum x_i^2 (e^{sigma^2 tau} - 1) / (sum x)^2
  const double ratio = squares * std::expm1(sigma * sigma * tau) / (sum * sum);
  return {sum / static_cast<double>(spots.size()), std::sqrt(std::log1p(ratio) / tau)};
}

double basket_put_moment_match(std::span<const double> spots, double strike, double rate,
                               double sigma, double tau, double dividend, std::span<double> deltas) {
  const double d = static_cast<double>(spots.size());
  if (deltas.size() != spots.size()) throw DomainError("european: delta buffer size mismatch");
  if (tau == 0.0) {
    const double average = std::accumulate(spots.begin(), spots.end(), 0.0) / d;
    std::fill(deltas.begin(), deltas.end(), average < strike ? -1.0 / d : 0.0);
    return std::max(strike - average, 0.0);
  }
  const MatchedLognormal matched = match_basket(spots, sigma, tau);
  const EuropeanQuote put = bs_put(matched.g0, strike, rate, matched.sigma, tau, dividend);
  std::fill(deltas.begin(), deltas.end(), put.deltas[0] / d);
  return put.price;
}

EuropeanQuote basket_put_moment_match(std::span<const double> spots, double strike, double rate,
                                      double sigma, double tau, double dividend) {
  EuropeanQuote quote;
  quote.deltas.resize(spots.size());
  quote.price = basket_put_moment_match(spots, strike, rate, sigma, tau, dividend, quote.deltas);
  quote.time_to_maturity = tau;
  return quote;
}

double max_call_quote(std::span<const double> spots, double strike, double rate, double dividend,
                      double sigma, double tau, const QuadratureSpec& quad,
                      std::span<double> deltas) {
  const std::size_t dim = spots.size();
  if (dim == 0 || dim > kMaxAssets) throw DomainError("european: max-call needs 1..64 assets");
  if (deltas.size() != dim) throw DomainError("european: delta buffer size mismatch");
  for (double x : spots) require_positive(x, "spot");
  require_positive(strike, "strike");
  require_positive(sigma, "volatility");
  if (tau < 0.0) throw DomainError("european: negative time to maturity");

  if (tau == 0.0) {
    const auto best = std::max_element(spots.begin(), spots.end());
    std::fill(deltas.begin(), deltas.end(), 0.0);
    if (*best > strike) deltas[static_cast<std::size_t>(best - spots.begin())] = 1.0;
    return std::max(*best - strike, 0.0);
  }

  const double vol = sigma * std::sqrt(tau);
  const double carry = std::exp(-dividend * tau);
  const double discount = std::exp(-rate * tau);
  const double lower = quad.lower_truncation;

  double price = 0.0;
  double all_below = 1.0;  // prod_l (1 - N(d-_l))
  std::array<double, kMaxAssets> shift{};
  for (std::size_t l = 0; l < dim; ++l) {
    const double d_minus =
        (std::log(spots[l] / strike) + (rate - dividend - 0.5 * sigma * sigma) * tau) / vol;
    const double d_plus = d_minus + vol;
    all_below *= normal_cdf(-d_minus);

    // N(shift_k - z) for each competitor k; beyond min shift + 8.5 the product vanishes.
    std::size_t n_shift = 0;
    double upper = d_plus;
    for (std::size_t k = 0; k < dim; ++k) {
      if (k == l) continue;
      shift[n_shift] = std::log(spots[l] / spots[k]) / vol + vol;
      upper = std::min(upper, shift[n_shift] + 8.5);
      ++n_shift;
    }
    double integral = 0.0;
    if (upper > lower) {
      auto integrand = [&](double z) {
        double value = normal_pdf(z);
        for (std::size_t k = 0; k < n_shift; ++k) value *= normal_cdf(shift[k] - z);
        return value;
      };
      integral = gauss_kronrod(integrand, lower, upper, quad).value;
    }
    deltas[l] = carry * integral;
    price += spots[l] * deltas[l];
  }
  return price - strike * discount * (1.0 - all_below);
}

EuropeanQuote max_call_quote(std::span<const double> spots, double strike, double rate,
                             double dividend, double sigma, double tau, const QuadratureSpec& quad) {
  EuropeanQuote quote;
  quote.deltas.resize(spots.size());
  quote.price = max_call_quote(spots, strike, rate, dividend, sigma, tau, quad, quote.deltas);
  quote.time_to_maturity = tau;
  return quote;
}

double max_call_price(std::span<const double> spots, double strike, double rate, double dividend,
                      double sigma, double tau, const QuadratureSpec& quad) {
  return max_call_quote(spots, strike, rate, dividend, sigma, tau, quad).price;
}

std::vector<double> max_call_deltas(std::span<const double> spots, double strike, double rate,
                                    double dividend, double sigma, double tau,
                                    const QuadratureSpec& quad) {
  return max_call_quote(spots, strike, rate, dividend, sigma, tau, quad).deltas;
}

}  // namespace bermudan

#include "bermudan/statistics.hpp"

#include <cmath>
#include <limits>

#include "bermudan/error.hpp"

namespace bermudan {

SampleMoments empirical_variance(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw ValidationError("empirical_variance: need at least two samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(n - 1)};
}

SampleMoments weighted_moments(std::span<const double> samples, std::span<const double> weights) {
  if (samples.size() != weights.size())
    throw ValidationError("weighted_moments: sample and weight counts differ");
  double total = 0.0;
  double mean = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    total += weights[k];
    mean += weights[k] * samples[k];
  }
  if (!(total > 0.0)) throw ValidationError("weighted_moments: weights sum to zero");
  mean /= total;
  double var = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k)
    var += weights[k] * (samples[k] - mean) * (samples[k] - mean);
  return {mean, var / total};
}

std::size_t sample_size_heuristic(double kappa, double c, double c_alpha) {
  if (!(kappa > 0.0) || !(kappa < 1.0))
    throw DomainError("sample_size_heuristic: kappa must lie in (0, 1)");
  if (!(c > 0.0) || !(c_alpha > 0.0) || !std::isfinite(c) || !std::isfinite(c_alpha))
    throw DomainError("sample_size_heuristic: C and c_alpha must be positive");
  // kappa (1 + u) / (1 - u) < 1  <=>  u < (1 - kappa) / (1 + kappa), u = q / sqrt(n)
  const double q = c_alpha * std::sqrt(c);
  const double bound = (1.0 - kappa) / (1.0 + kappa);
  const double root = q / bound;
  const double guess = std::floor(root * root);
  if (guess >= static_cast<double>(std::numeric_limits<std::size_t>::max() / 2))
    throw DomainError("sample_size_heuristic: required sample size overflows");
  // Squared form of u < bound, so exact ties such as n = 9 for kappa = 1/2, q = 1 stay strict.
  const double lhs = c_alpha * c_alpha * c * (1.0 + kappa) * (1.0 + kappa);
  const double scale = (1.0 - kappa) * (1.0 - kappa);
  auto satisfied = [&](std::size_t n) { return lhs < static_cast<double>(n) * scale; };
  // Floating-point guard around the algebraic solution.
  std::size_t n = static_cast<std::size_t>(guess);
  n = n > 2 ? n - 2 : 1;
  while (!satisfied(n)) ++n;
  return n;
}

}  // namespace bermudan

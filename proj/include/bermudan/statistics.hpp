#pragma once

#include <cstddef>
#include <span>

namespace bermudan {

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // divisor N - 1
};

// Throws ValidationError for fewer than two samples.
SampleMoments empirical_variance(std::span<const double> samples);

// Probability-weighted mean and variance (weights need not sum to one).
SampleMoments weighted_moments(std::span<const double> samples, std::span<const double> weights);

// Smallest n with kappa (1 + q/sqrt(n)) / (1 - q/sqrt(n)) < 1 and q/sqrt(n) < 1,
// where q = c_alpha sqrt(C). Requires 0 < kappa < 1, C > 0, c_alpha > 0.
std::size_t sample_size_heuristic(double kappa, double c, double c_alpha);

}  // namespace bermudan

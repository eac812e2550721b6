#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bermudan/error.hpp"

namespace bermudan {

struct QuadratureSpec {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-12;
  std::size_t max_subdivisions = 200;
  // Lower limit standing in for -infinity in Gaussian integrals.
  double lower_truncation = -8.0;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
};

namespace detail {

// 31-point Kronrod rule with its embedded 15-point Gauss rule on [-1, 1].
// kronrod_nodes[0] = 0; the Gauss nodes are the even indices.
struct KronrodRule {
  std::array<double, 16> nodes;
  std::array<double, 16> kronrod_weights;
  std::array<double, 8> gauss_weights;
};

const KronrodRule& kronrod31();

template <class F>
QuadratureResult kronrod_panel(F& f, double a, double b) {
  const KronrodRule& rule = kronrod31();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(center);
  double kronrod = f0 * rule.kronrod_weights[0];
  double gauss = f0 * rule.gauss_weights[0];
  for (std::size_t i = 1; i < 16; ++i) {
    const double dx = half * rule.nodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += pair * rule.kronrod_weights[i];
    if (i % 2 == 0) gauss += pair * rule.gauss_weights[i / 2];
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half), 1};
}

}  // namespace detail

// Adaptive 15/31-point Gauss-Kronrod quadrature. The panel with the largest
// error estimate is bisected until the summed estimate is below
// max(absolute_tolerance, relative_tolerance * |value|). Throws NumericalError
// when max_subdivisions panels do not suffice.
template <class F>
QuadratureResult gauss_kronrod(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  if (a == b) return {0.0, 0.0, 0};
  struct Panel {
    double a, b, value, error;
  };
  std::vector<Panel> panels;
  const auto first = detail::kronrod_panel(f, a, b);
  double value = first.value;
  double error = first.error_estimate;
  if (error <= std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(value)))
    return first;
  panels.push_back({a, b, value, error});
  while (error > std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(value))) {
    if (panels.size() >= spec.max_subdivisions)
      throw NumericalError("gauss_kronrod: no convergence within " +
                           std::to_string(spec.max_subdivisions) +
                           " panels, achieved error estimate " + std::to_string(error));
    auto worst = std::max_element(panels.begin(), panels.end(),
                                  [](const Panel& x, const Panel& y) { return x.error < y.error; });
    const Panel split = *worst;
    const double mid = 0.5 * (split.a + split.b);
    const auto left = detail::kronrod_panel(f, split.a, mid);
    const auto right = detail::kronrod_panel(f, mid, split.b);
    *worst = {split.a, mid, left.value, left.error_estimate};
    panels.push_back({mid, split.b, right.value, right.error_estimate});
    value = 0.0;
    error = 0.0;
    for (const Panel& p : panels) {
      value += p.value;
      error += p.error;
    }
  }
  return {value, error, panels.size()};
}

}  // namespace bermudan

#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "bermudan/basis.hpp"

namespace bermudan {

struct LeastSquaresOptions {
  // Penalty ridge * (|beta|^2 + |gamma|^2) in the reported coordinates.
  double ridge = 0.0;
  // Rescale columns to unit RMS before factorizing; the reported
  // coefficients are in the original units.
  bool standardize = true;
  // Pivots below rank_threshold * |largest pivot| count as zero.
  double rank_threshold = 1e-11;
};

struct RegressionFit {
  Eigen::VectorXd beta;   // martingale-feature coefficients
  Eigen::VectorXd gamma;  // continuation-feature coefficients
  double rss = 0.0;       // weighted residual sum of squares (no penalty)
  std::size_t rank = 0;
  double ridge = 0.0;
};

// Minimizes sum_n w_n (y_n - m_n beta - psi_n gamma)^2 + ridge (|beta|^2 + |gamma|^2)
// by a complete orthogonal decomposition; rank-deficient problems without a
// ridge get the minimal-norm solution (in standardized coordinates when
// standardize is on).
RegressionFit solve_least_squares(const DesignBlock& block, const LeastSquaresOptions& options = {});
RegressionFit solve_least_squares(const DesignBlock& block, double ridge);

// Residual y - m beta - psi gamma.
Eigen::VectorXd fit_residuals(const DesignBlock& block, const RegressionFit& fit);

}  // namespace bermudan

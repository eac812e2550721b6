#include "bermudan/least_squares.hpp"

#include <cmath>
#include <string>

#include "bermudan/error.hpp"

namespace bermudan {

RegressionFit solve_least_squares(const DesignBlock& block, const LeastSquaresOptions& options) {
  block.validate();
  if (!(options.ridge >= 0.0) || !std::isfinite(options.ridge))
    throw ValidationError("least squares: ridge must be a finite nonnegative number");
  const Eigen::Index n = block.response.size();
  if (n < 1) throw ValidationError("least squares: need at least one observation");
  const Eigen::Index k = block.m.cols();
  const Eigen::Index k1 = block.psi.cols();
  const Eigen::Index cols = k + k1;

  Eigen::MatrixXd x(n, cols);
  x << block.m, block.psi;
  Eigen::VectorXd y = block.response;
  if (block.weights.size() != 0) {
    const Eigen::VectorXd root = block.weights.cwiseSqrt();
    x = root.asDiagonal() * x;
    y = root.cwiseProduct(y);
  }

  Eigen::VectorXd scale = Eigen::VectorXd::Ones(cols);
  if (options.standardize) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double rms = x.col(c).norm() / std::sqrt(static_cast<double>(n));
      if (rms > 0.0 && std::isfinite(rms)) scale[c] = rms;
    }
    x = x * scale.cwiseInverse().asDiagonal();
  }

  Eigen::MatrixXd a = x;
  Eigen::VectorXd b = y;
  if (options.ridge > 0.0) {
    // Penalty on original coefficients c_k = c'_k / scale_k.
    a.resize(n + cols, cols);
    a.topRows(n) = x;
    a.bottomRows(cols) = (std::sqrt(options.ridge) * scale.cwiseInverse()).asDiagonal();
    b = Eigen::VectorXd::Zero(n + cols);
    b.head(n) = y;
  }

  RegressionFit fit;
  fit.ridge = options.ridge;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(cols);
  if (cols > 0 && a.cwiseAbs().maxCoeff() > 0.0) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(options.rank_threshold);
    cod.compute(a);
    fit.rank = static_cast<std::size_t>(cod.rank());
    if (fit.rank > 0) coef = cod.solve(b);
  }
  coef = coef.cwiseQuotient(scale);
  if (!coef.allFinite()) throw NumericalError("least squares: non-finite coefficients");
  fit.beta = coef.head(k);
  fit.gamma = coef.tail(k1);

  const Eigen::VectorXd residual = fit_residuals(block, fit);
  fit.rss = block.weights.size() != 0 ? block.weights.dot(residual.cwiseAbs2())
                                      : residual.squaredNorm();
  return fit;
}

RegressionFit solve_least_squares(const DesignBlock& block, double ridge) {
  LeastSquaresOptions options;
  options.ridge = ridge;
  return solve_least_squares(block, options);
}

Eigen::VectorXd fit_residuals(const DesignBlock& block, const RegressionFit& fit) {
  Eigen::VectorXd r = block.response;
  if (fit.beta.size() != 0) r.noalias() -= block.m * fit.beta;
  if (fit.gamma.size() != 0) r.noalias() -= block.psi * fit.gamma;
  return r;
}

}  // namespace bermudan

#pragma once

// Backward regression for near surely optimal dual martingales.
//
// On training paths, theta_J = Z_J and for i = J-1..0
//   (beta, gamma) = argmin sum (theta_{i+1} - m_{i+1} beta - psi_i gamma)^2,
//   xi = m_{i+1} beta,  theta_i = Z_i + (theta_{i+1} - xi - Z_i)^+.
// The martingale M_i = sum_{j<i} m_{j+1} beta^(j) gives the upper bound
// E max_i (Z_i - M_i) on fresh paths; psi_i gamma^(i) is the continuation
// estimate behind the lower-bound stopping rule. All values are discounted.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bermudan/basis.hpp"
#include "bermudan/gbm.hpp"
#include "bermudan/least_squares.hpp"

namespace bermudan {

// A set of weighted paths with payoffs and regression features per date.
class PathProblem {
 public:
  virtual ~PathProblem() = default;

  virtual std::size_t exercise_count() const = 0;
  virtual std::size_t path_count() const = 0;
  // Features of the interval [T_i, T_{i+1}) and of the date T_i, i < J.
  virtual std::size_t martingale_count(std::size_t i) const = 0;
  virtual std::size_t psi_count(std::size_t i) const = 0;
  // Discounted payoff Z_i on a path, i = 0..J.
  virtual double payoff(std::size_t path, std::size_t i) const = 0;
  virtual void martingale_features(std::size_t path, std::size_t i, std::span<double> out) const = 0;
  virtual void psi(std::size_t path, std::size_t i, std::span<double> out) const = 0;
  // Probability weights; unweighted problems return 1 and weighted() = false.
  virtual bool weighted() const { return false; }
  virtual double weight(std::size_t) const { return 1.0; }
};

// Paths of a simulated batch with a GBM basis.
class GbmPathProblem final : public PathProblem {
 public:
  GbmPathProblem(const PathBatch& batch, const BasisSet& basis);

  std::size_t exercise_count() const override { return basis_.grid().exercise_count(); }
  std::size_t path_count() const override { return batch_.size(); }
  std::size_t martingale_count(std::size_t i) const override { return basis_.martingale_count(i); }
  std::size_t psi_count(std::size_t i) const override { return basis_.psi_count(i); }
  double payoff(std::size_t path, std::size_t i) const override;
  void martingale_features(std::size_t path, std::size_t i, std::span<double> out) const override;
  void psi(std::size_t path, std::size_t i, std::span<double> out) const override;

 private:
  const PathBatch& batch_;
  const BasisSet& basis_;
};

struct DateCoefficients {
  std::vector<double> beta;
  std::vector<double> gamma;
  double rss = 0.0;
  std::size_t rank = 0;
};

struct DualCoefficients {
  std::vector<DateCoefficients> dates;  // exercise dates 0..J-1
  std::uint64_t basis_hash = 0;
  std::size_t train_paths = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  double ridge = 0.0;

  std::size_t exercise_count() const { return dates.size(); }
};

struct DateDiagnostics {
  std::size_t date = 0;
  double var_before = 0.0;  // Var theta_{i+1}
  double var_after = 0.0;   // residual variance of the fit
  double var_theta = 0.0;   // Var theta_i after the update
  double xi_mean = 0.0;     // training mean of the fitted increment
  double xi_se = 0.0;
  bool xi_mean_zero = true;  // |xi_mean| <= mean_zero_sigmas * xi_se
  std::size_t rank = 0;
};

struct VarianceDiagnostics {
  std::vector<DateDiagnostics> dates;  // ordered by date
  double theta0_mean = 0.0;
  double theta0_variance = 0.0;
  std::optional<std::size_t> suggested_sample_size;
  std::vector<std::string> warnings;
};

struct SampleSizeInputs {
  double kappa = 0.5;
  double c = 1.0;
  double c_alpha = 1.0;
};

struct EngineOptions {
  LeastSquaresOptions least_squares;
  double mean_zero_sigmas = 5.0;
  std::optional<SampleSizeInputs> sample_size;
};

struct TrainingResult {
  DualCoefficients coefficients;
  VarianceDiagnostics diagnostics;
  std::vector<double> theta0;  // per training path
};

// theta_i = Z_i + (theta_{i+1} - xi - Z_i)^+ elementwise.
std::vector<double> theta_recursion_step(std::span<const double> z_now,
                                         std::span<const double> theta_next,
                                         std::span<const double> xi_hat);

// Backward pass on any path problem. The result's provenance fields
// (basis hash, seed, stream) are left for the caller to fill in.
TrainingResult backward_regression(const PathProblem& problem, const EngineOptions& options = {});

// Backward pass on a simulated training batch.
TrainingResult backward_pass(const PathBatch& batch, const BasisSet& basis,
                             const EngineOptions& options = {});

enum class BoundKind { upper, lower };
std::string_view to_string(BoundKind kind);

struct BoundEstimate {
  BoundKind kind = BoundKind::upper;
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  double seconds = 0.0;
};

// Per-path values max_i (Z_i - M_i) and Z_tau.
std::vector<double> upper_bound_values(const DualCoefficients& coeffs, const PathProblem& problem);
std::vector<double> lower_bound_values(const DualCoefficients& coeffs, const PathProblem& problem);

// Estimates on an explicit problem (weighted problems give weighted means).
BoundEstimate upper_bound(const DualCoefficients& coeffs, const PathProblem& problem);
BoundEstimate lower_bound(const DualCoefficients& coeffs, const PathProblem& problem);

// Estimates on an explicit fresh batch. Refuses the training stream.
BoundEstimate upper_bound(const DualCoefficients& coeffs, const BasisSet& basis,
                          const PathBatch& fresh);
BoundEstimate lower_bound(const DualCoefficients& coeffs, const BasisSet& basis,
                          const PathBatch& fresh);

struct FreshSample {
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::size_t block_size = 1000;
};

// Simulates the fresh paths block by block (path p always uses lane p), so
// the estimate does not depend on block size or worker count.
BoundEstimate upper_bound(const DualCoefficients& coeffs, const BasisSet& basis,
                          const FreshSample& fresh);
BoundEstimate lower_bound(const DualCoefficients& coeffs, const BasisSet& basis,
                          const FreshSample& fresh);

}  // namespace bermudan

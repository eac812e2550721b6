#include "bermudan/dual_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "bermudan/error.hpp"
#include "bermudan/parallel.hpp"
#include "bermudan/statistics.hpp"

namespace bermudan {
namespace {

constexpr std::size_t kChunk = 64;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SampleMoments moments(std::span<const double> values, const PathProblem& problem) {
  if (!problem.weighted()) return empirical_variance(values);
  std::vector<double> w(values.size());
  for (std::size_t p = 0; p < w.size(); ++p) w[p] = problem.weight(p);
  return weighted_moments(values, w);
}

DesignBlock design_block(const PathProblem& problem, std::size_t i,
                         std::span<const double> theta_next) {
  const std::size_t n = problem.path_count();
  const std::size_t k = problem.martingale_count(i);
  const std::size_t k1 = problem.psi_count(i);
  DesignBlock block;
  block.m.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  block.psi.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k1));
  block.response = Eigen::Map<const Eigen::VectorXd>(theta_next.data(), static_cast<Eigen::Index>(n));
  if (problem.weighted()) {
    block.weights.resize(static_cast<Eigen::Index>(n));
    for (std::size_t p = 0; p < n; ++p) block.weights[static_cast<Eigen::Index>(p)] = problem.weight(p);
  }
  parallel_for((n + kChunk - 1) / kChunk, [&](std::size_t chunk) {
    std::vector<double> mrow(k), prow(k1);
    for (std::size_t p = chunk * kChunk; p < std::min(n, (chunk + 1) * kChunk); ++p) {
      problem.martingale_features(p, i, mrow);
      problem.psi(p, i, prow);
      const auto row = static_cast<Eigen::Index>(p);
      for (std::size_t c = 0; c < k; ++c) block.m(row, static_cast<Eigen::Index>(c)) = mrow[c];
      for (std::size_t c = 0; c < k1; ++c) block.psi(row, static_cast<Eigen::Index>(c)) = prow[c];
    }
  });
  return block;
}

void check_shapes(const DualCoefficients& coeffs, const PathProblem& problem) {
  if (coeffs.exercise_count() != problem.exercise_count())
    throw ValidationError("coefficients cover " + std::to_string(coeffs.exercise_count()) +
                          " dates but the problem has " + std::to_string(problem.exercise_count()));
  for (std::size_t i = 0; i < coeffs.exercise_count(); ++i) {
    if (coeffs.dates[i].beta.size() != problem.martingale_count(i) ||
        coeffs.dates[i].gamma.size() != problem.psi_count(i))
      throw ValidationError("coefficients at date " + std::to_string(i) +
                            " do not match the basis dimensions");
  }
}

void check_fresh(const DualCoefficients& coeffs, const BasisSet& basis, std::uint64_t seed,
                 std::uint64_t stream_id) {
  if (seed == coeffs.seed && stream_id == coeffs.stream_id)
    throw ValidationError("fresh paths use the training stream (seed " + std::to_string(seed) +
                          ", stream " + std::to_string(stream_id) + "); bounds need independent paths");
  if (coeffs.basis_hash != basis.hash())
    throw ValidationError("coefficients were trained for a different model or basis");
}

BoundEstimate summarize(BoundKind kind, std::span<const double> values, const PathProblem* problem) {
  BoundEstimate est;
  est.kind = kind;
  est.samples = values.size();
  if (values.size() == 1) {
    est.estimate = values[0];
    return est;
  }
  const SampleMoments m = problem ? moments(values, *problem) : empirical_variance(values);
  est.estimate = m.mean;
  est.standard_error = std::sqrt(std::max(m.variance, 0.0) / static_cast<double>(values.size()));
  return est;
}

double upper_value(const DualCoefficients& coeffs, const PathProblem& problem, std::size_t p,
                   std::vector<double>& scratch) {
  const std::size_t J = problem.exercise_count();
  double best = problem.payoff(p, 0);
  double martingale = 0.0;
  for (std::size_t i = 0; i < J; ++i) {
    const auto& beta = coeffs.dates[i].beta;
    scratch.resize(beta.size());
    problem.martingale_features(p, i, scratch);
    for (std::size_t k = 0; k < beta.size(); ++k) martingale += beta[k] * scratch[k];
    best = std::max(best, problem.payoff(p, i + 1) - martingale);
  }
  return best;
}

double lower_value(const DualCoefficients& coeffs, const PathProblem& problem, std::size_t p,
                   std::vector<double>& scratch) {
  const std::size_t J = problem.exercise_count();
  for (std::size_t i = 0; i < J; ++i) {
    const auto& gamma = coeffs.dates[i].gamma;
    scratch.resize(gamma.size());
    problem.psi(p, i, scratch);
    double continuation = 0.0;
    for (std::size_t k = 0; k < gamma.size(); ++k) continuation += gamma[k] * scratch[k];
    const double z = problem.payoff(p, i);
    if (z >= continuation) return z;
  }
  return problem.payoff(p, J);
}

template <class F>
std::vector<double> per_path(const PathProblem& problem, F value) {
  const std::size_t n = problem.path_count();
  std::vector<double> out(n);
  parallel_for((n + kChunk - 1) / kChunk, [&](std::size_t chunk) {
    std::vector<double> scratch;
    for (std::size_t p = chunk * kChunk; p < std::min(n, (chunk + 1) * kChunk); ++p)
      out[p] = value(p, scratch);
  });
  return out;
}

template <class F>
BoundEstimate streamed(BoundKind kind, const DualCoefficients& coeffs, const BasisSet& basis,
                       const FreshSample& fresh, F value) {
  const auto start = Clock::now();
  check_fresh(coeffs, basis, fresh.seed, fresh.stream_id);
  if (fresh.paths == 0) throw ValidationError("bound estimation needs at least one fresh path");
  if (fresh.block_size == 0) throw ValidationError("fresh block size must be positive");
  const RngStream stream(fresh.seed, fresh.stream_id);
  const std::size_t blocks = (fresh.paths + fresh.block_size - 1) / fresh.block_size;
  std::vector<double> values(fresh.paths);
  // Blocks run one per worker; paths inside a block are evaluated serially.
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t first = b * fresh.block_size;
    const std::size_t count = std::min(fresh.block_size, fresh.paths - first);
    const PathBatch batch = simulate_gbm(basis.model(), basis.grid(), count, stream, first);
    const GbmPathProblem problem(batch, basis);
    if (b == 0) check_shapes(coeffs, problem);
    std::vector<double> scratch;
    for (std::size_t p = 0; p < count; ++p) values[first + p] = value(coeffs, problem, p, scratch);
  });
  BoundEstimate est = summarize(kind, values, nullptr);
  est.seed = fresh.seed;
  est.stream_id = fresh.stream_id;
  est.seconds = seconds_since(start);
  return est;
}

}  // namespace

GbmPathProblem::GbmPathProblem(const PathBatch& batch, const BasisSet& basis)
    : batch_(batch), basis_(basis) {
  if (batch.dimension() != basis.dimension())
    throw ValidationError("path problem: batch dimension does not match the model");
  if (batch.grid().exercise_count() != basis.grid().exercise_count() ||
      batch.grid().substeps() != basis.grid().substeps() ||
      batch.grid().maturity() != basis.grid().maturity())
    throw ValidationError("path problem: batch grid does not match the basis grid");
}

double GbmPathProblem::payoff(std::size_t path, std::size_t i) const {
  const TimeGrid& grid = basis_.grid();
  return basis_.model().discounted_payoff(grid.exercise_time(i), batch_.state(path, grid.fine_index(i)));
}

void GbmPathProblem::martingale_features(std::size_t path, std::size_t i, std::span<double> out) const {
  basis_.martingale_features(batch_, path, i, out);
}

void GbmPathProblem::psi(std::size_t path, std::size_t i, std::span<double> out) const {
  basis_.psi(i, batch_.state(path, basis_.grid().fine_index(i)), out);
}

std::vector<double> theta_recursion_step(std::span<const double> z_now,
                                         std::span<const double> theta_next,
                                         std::span<const double> xi_hat) {
  if (z_now.size() != theta_next.size() || z_now.size() != xi_hat.size())
    throw ValidationError("theta_recursion_step: length mismatch (" + std::to_string(z_now.size()) +
                          ", " + std::to_string(theta_next.size()) + ", " +
                          std::to_string(xi_hat.size()) + ")");
  std::vector<double> theta(z_now.size());
  for (std::size_t p = 0; p < theta.size(); ++p)
    theta[p] = z_now[p] + std::max(theta_next[p] - xi_hat[p] - z_now[p], 0.0);
  return theta;
}

TrainingResult backward_regression(const PathProblem& problem, const EngineOptions& options) {
  const std::size_t J = problem.exercise_count();
  const std::size_t n = problem.path_count();
  if (n < (problem.weighted() ? 1u : 2u))
    throw ValidationError(problem.weighted() ? "backward pass: need at least one path"
                                             : "backward pass: need at least two training paths");
  if (J == 0) throw ValidationError("backward pass: need at least one exercise date");

  TrainingResult result;
  auto& coeffs = result.coefficients;
  auto& diag = result.diagnostics;
  coeffs.dates.resize(J);
  coeffs.train_paths = n;
  coeffs.ridge = options.least_squares.ridge;
  diag.dates.resize(J);

  std::vector<double> theta(n), z(n);
  for (std::size_t p = 0; p < n; ++p) theta[p] = problem.payoff(p, J);

  for (std::size_t i = J; i-- > 0;) {
    const DesignBlock block = design_block(problem, i, theta);
    RegressionFit fit;
    try {
      fit = solve_least_squares(block, options.least_squares);
    } catch (const std::exception& e) {
      throw NumericalError("backward pass: regression failed at date " + std::to_string(i) + ": " +
                           e.what());
    }
    const Eigen::VectorXd xi_vec = block.m * fit.beta;
    const std::vector<double> xi(xi_vec.data(), xi_vec.data() + xi_vec.size());
    for (std::size_t p = 0; p < n; ++p) z[p] = problem.payoff(p, i);
    std::vector<double> next = theta_recursion_step(z, theta, xi);

    DateDiagnostics& d = diag.dates[i];
    d.date = i;
    d.rank = fit.rank;
    d.var_before = moments(theta, problem).variance;
    const double denom = problem.weighted() ? block.weights.sum() : static_cast<double>(n - 1);
    d.var_after = fit.rss / denom;
    d.var_theta = moments(next, problem).variance;
    const SampleMoments xm = moments(xi, problem);
    d.xi_mean = xm.mean;
    d.xi_se = std::sqrt(std::max(xm.variance, 0.0) / static_cast<double>(n));
    d.xi_mean_zero = std::abs(d.xi_mean) <= options.mean_zero_sigmas * d.xi_se;
    if (!d.xi_mean_zero)
      diag.warnings.push_back("date " + std::to_string(i) + ": fitted martingale increment has mean " +
                              std::to_string(d.xi_mean) + ", more than " +
                              std::to_string(options.mean_zero_sigmas) + " standard errors (" +
                              std::to_string(d.xi_se) + ") from zero");

    DateCoefficients& c = coeffs.dates[i];
    c.beta.assign(fit.beta.data(), fit.beta.data() + fit.beta.size());
    c.gamma.assign(fit.gamma.data(), fit.gamma.data() + fit.gamma.size());
    c.rss = fit.rss;
    c.rank = fit.rank;
    theta = std::move(next);
  }

  const SampleMoments t0 = moments(theta, problem);
  diag.theta0_mean = t0.mean;
  diag.theta0_variance = t0.variance;
  if (options.sample_size) {
    const auto& s = *options.sample_size;
    diag.suggested_sample_size = sample_size_heuristic(s.kappa, s.c, s.c_alpha);
  }
  result.theta0 = std::move(theta);
  return result;
}

TrainingResult backward_pass(const PathBatch& batch, const BasisSet& basis,
                             const EngineOptions& options) {
  const GbmPathProblem problem(batch, basis);
  TrainingResult result = backward_regression(problem, options);
  result.coefficients.basis_hash = basis.hash();
  result.coefficients.seed = batch.seed();
  result.coefficients.stream_id = batch.stream_id();
  return result;
}

std::string_view to_string(BoundKind kind) { return kind == BoundKind::upper ? "upper" : "lower"; }

std::vector<double> upper_bound_values(const DualCoefficients& coeffs, const PathProblem& problem) {
  check_shapes(coeffs, problem);
  return per_path(problem, [&](std::size_t p, std::vector<double>& s) { return upper_value(coeffs, problem, p, s); });
}

std::vector<double> lower_bound_values(const DualCoefficients& coeffs, const PathProblem& problem) {
  check_shapes(coeffs, problem);
  return per_path(problem, [&](std::size_t p, std::vector<double>& s) { return lower_value(coeffs, problem, p, s); });
}

BoundEstimate upper_bound(const DualCoefficients& coeffs, const PathProblem& problem) {
  const auto start = Clock::now();
  BoundEstimate est = summarize(BoundKind::upper, upper_bound_values(coeffs, problem), &problem);
  est.seconds = seconds_since(start);
  return est;
}

BoundEstimate lower_bound(const DualCoefficients& coeffs, const PathProblem& problem) {
  const auto start = Clock::now();
  BoundEstimate est = summarize(BoundKind::lower, lower_bound_values(coeffs, problem), &problem);
  est.seconds = seconds_since(start);
  return est;
}

BoundEstimate upper_bound(const DualCoefficients& coeffs, const BasisSet& basis,
                          const PathBatch& fresh) {
  check_fresh(coeffs, basis, fresh.seed(), fresh.stream_id());
  BoundEstimate est = upper_bound(coeffs, GbmPathProblem(fresh, basis));
  est.seed = fresh.seed();
  est.stream_id = fresh.stream_id();
  return est;
}

BoundEstimate lower_bound(const DualCoefficients& coeffs, const BasisSet& basis,
                          const PathBatch& fresh) {
  check_fresh(coeffs, basis, fresh.seed(), fresh.stream_id());
  BoundEstimate est = lower_bound(coeffs, GbmPathProblem(fresh, basis));
  est.seed = fresh.seed();
  est.stream_id = fresh.stream_id();
  return est;
}

BoundEstimate upper_bound(const DualCoefficients& coeffs, const BasisSet& basis,
                          const FreshSample& fresh) {
  return streamed(BoundKind::upper, coeffs, basis, fresh, upper_value);
}

BoundEstimate lower_bound(const DualCoefficients& coeffs, const BasisSet& basis,
                          const FreshSample& fresh) {
  return streamed(BoundKind::lower, coeffs, basis, fresh, lower_value);
}

}  // namespace bermudan

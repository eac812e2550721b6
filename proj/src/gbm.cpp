#include "bermudan/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bermudan/error.hpp"
#include "bermudan/parallel.hpp"

namespace bermudan {

TimeGrid::TimeGrid(double maturity, std::size_t exercise_count, std::size_t substeps)
    : maturity_(maturity), exercise_count_(exercise_count), substeps_(substeps) {
  if (!(maturity > 0.0) || !std::isfinite(maturity))
    throw ValidationError("time grid: maturity must be positive");
  if (exercise_count == 0) throw ValidationError("time grid: need at least one exercise date");
  if (substeps == 0) throw ValidationError("time grid: need at least one substep per interval");
  dt_ = maturity_ / static_cast<double>(total_steps());
}

TimeGrid TimeGrid::with_max_step(double maturity, std::size_t exercise_count, double max_step) {
  if (!(max_step > 0.0)) throw ValidationError("time grid: time step must be positive");
  if (exercise_count == 0) throw ValidationError("time grid: need at least one exercise date");
  const double interval = maturity / static_cast<double>(exercise_count);
  const double ratio = interval / max_step;
  auto substeps = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  return TimeGrid(maturity, exercise_count, std::max<std::size_t>(substeps, 1));
}

double TimeGrid::exercise_time(std::size_t exercise_index) const {
  if (exercise_index == exercise_count_) return maturity_;
  return maturity_ * static_cast<double>(exercise_index) / static_cast<double>(exercise_count_);
}

double TimeGrid::time(std::size_t fine_index) const {
  if (fine_index == total_steps()) return maturity_;
  return maturity_ * static_cast<double>(fine_index) / static_cast<double>(total_steps());
}

std::string_view to_string(PayoffKind kind) {
  switch (kind) {
    case PayoffKind::basket_put:
      return "basket_put";
    case PayoffKind::max_call:
      return "max_call";
  }
  return "unknown";
}

PayoffKind parse_payoff_kind(std::string_view name) {
  if (name == "basket_put") return PayoffKind::basket_put;
  if (name == "max_call") return PayoffKind::max_call;
  throw ValidationError("unknown payoff kind '" + std::string(name) + "'");
}

void GbmModel::validate() const {
  if (spot.empty()) throw ValidationError("model: dimension must be at least 1");
  if (!(volatility > 0.0) || !std::isfinite(volatility))
    throw ValidationError("model: volatility must be positive");
  if (!(strike > 0.0) || !std::isfinite(strike))
    throw ValidationError("model: strike must be positive");
  if (!std::isfinite(rate) || !std::isfinite(dividend))
    throw ValidationError("model: rate and dividend must be finite");
  for (double x : spot)
    if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("model: spots must be positive");
}

double GbmModel::intrinsic(std::span<const double> state) const {
  switch (payoff) {
    case PayoffKind::basket_put: {
      double sum = 0.0;
      for (double x : state) sum += x;
      return std::max(strike - sum / static_cast<double>(state.size()), 0.0);
    }
    case PayoffKind::max_call:
      return std::max(*std::max_element(state.begin(), state.end()) - strike, 0.0);
  }
  return 0.0;
}

double GbmModel::discounted_payoff(double t, std::span<const double> state) const {
  return std::exp(-rate * t) * intrinsic(state);
}

PathBatch::PathBatch(TimeGrid grid, std::size_t dimension, std::size_t n_paths, std::uint64_t seed,
                     std::uint64_t stream_id, std::uint64_t first_lane)
    : grid_(grid),
      dimension_(dimension),
      n_paths_(n_paths),
      seed_(seed),
      stream_id_(stream_id),
      first_lane_(first_lane),
      states_(n_paths * (grid.total_steps() + 1) * dimension),
      increments_(n_paths * grid.total_steps() * dimension) {}

PathBatch simulate_gbm(const GbmModel& model, const TimeGrid& grid, std::size_t n_paths,
                       const RngStream& stream, std::uint64_t first_lane) {
  model.validate();
  if (n_paths == 0) throw ValidationError("simulate_gbm: empty batch requested");

  const std::size_t dim = model.dimension();
  const std::size_t steps = grid.total_steps();
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  const double sigma = model.volatility;
  const double drift = (model.rate - model.dividend - 0.5 * sigma * sigma) * dt;

  PathBatch batch(grid, dim, n_paths, stream.seed(), stream.stream_id(), first_lane);
  constexpr std::size_t kChunk = 256;
  parallel_for((n_paths + kChunk - 1) / kChunk, [&](std::size_t chunk) {
    const std::size_t end = std::min(n_paths, (chunk + 1) * kChunk);
    for (std::size_t p = chunk * kChunk; p < end; ++p) {
      RngStream rng = stream.with_lane(first_lane + p);
      auto x0 = batch.mutable_state(p, 0);
      std::copy(model.spot.begin(), model.spot.end(), x0.begin());
      for (std::size_t s = 0; s < steps; ++s) {
        auto prev = batch.state(p, s);
        auto next = batch.mutable_state(p, s + 1);
        auto dw = batch.mutable_increment(p, s);
        for (std::size_t d = 0; d < dim; ++d) {
          dw[d] = sqrt_dt * rng.normal();
          next[d] = prev[d] * std::exp(drift + sigma * dw[d]);
        }
      }
    }
  });
  return batch;
}

}  // namespace bermudan

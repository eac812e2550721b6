#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bermudan/rng.hpp"

namespace bermudan {

// Exercise dates T_j = j*T/J, each interval split into L equal substeps.
class TimeGrid {
 public:
  TimeGrid(double maturity, std::size_t exercise_count, std::size_t substeps);

  // Picks the smallest substep count whose step does not exceed `max_step`.
  static TimeGrid with_max_step(double maturity, std::size_t exercise_count, double max_step);

  double maturity() const { return maturity_; }
  std::size_t exercise_count() const { return exercise_count_; }
  std::size_t substeps() const { return substeps_; }
  std::size_t total_steps() const { return exercise_count_ * substeps_; }
  double dt() const { return dt_; }

  std::size_t fine_index(std::size_t exercise_index) const { return exercise_index * substeps_; }
  double exercise_time(std::size_t exercise_index) const;
  double time(std::size_t fine_index) const;

 private:
  double maturity_;
  std::size_t exercise_count_;
  std::size_t substeps_;
  double dt_;
};

enum class PayoffKind { basket_put, max_call };

std::string_view to_string(PayoffKind kind);
PayoffKind parse_payoff_kind(std::string_view name);

// Independent geometric Brownian motions dX = (r - delta) X dt + sigma X dW
// with a common volatility, plus the Bermudan payoff written on them.
struct GbmModel {
  PayoffKind payoff = PayoffKind::basket_put;
  double rate = 0.05;
  double dividend = 0.0;
  double volatility = 0.2;
  double strike = 100.0;
  std::vector<double> spot;

  std::size_t dimension() const { return spot.size(); }
  void validate() const;

  // Undiscounted exercise value at a state.
  double intrinsic(std::span<const double> state) const;
  // Discounted exercise value e^{-rt} * intrinsic.
  double discounted_payoff(double t, std::span<const double> state) const;
};

// Simulated trajectories on the fine grid, with the Brownian increments
// that produced them. Layout is path-major, then step, then dimension.
class PathBatch {
 public:
  PathBatch(TimeGrid grid, std::size_t dimension, std::size_t n_paths, std::uint64_t seed,
            std::uint64_t stream_id, std::uint64_t first_lane);

  const TimeGrid& grid() const { return grid_; }
  std::size_t size() const { return n_paths_; }
  std::size_t dimension() const { return dimension_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t first_lane() const { return first_lane_; }

  // State X at fine step `step` (0..N), length D.
  std::span<const double> state(std::size_t path, std::size_t step) const {
    return {states_.data() + (path * (grid_.total_steps() + 1) + step) * dimension_, dimension_};
  }
  // Increment W(t_{step+1}) - W(t_step), step in 0..N-1, length D.
  std::span<const double> increment(std::size_t path, std::size_t step) const {
    return {increments_.data() + (path * grid_.total_steps() + step) * dimension_, dimension_};
  }

  std::span<double> mutable_state(std::size_t path, std::size_t step) {
    return {states_.data() + (path * (grid_.total_steps() + 1) + step) * dimension_, dimension_};
  }
  std::span<double> mutable_increment(std::size_t path, std::size_t step) {
    return {increments_.data() + (path * grid_.total_steps() + step) * dimension_, dimension_};
  }

 private:
  TimeGrid grid_;
  std::size_t dimension_;
  std::size_t n_paths_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t first_lane_;
  std::vector<double> states_;
  std::vector<double> increments_;
};

// Exact log-Euler simulation. Path p consumes lane first_lane + p of the
// stream, so a batch split into blocks reproduces the unsplit batch.
PathBatch simulate_gbm(const GbmModel& model, const TimeGrid& grid, std::size_t n_paths,
                       const RngStream& stream, std::uint64_t first_lane = 0);

}  // namespace bermudan

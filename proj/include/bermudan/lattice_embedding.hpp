#pragma once

// A finite lattice seen as a weighted path sample: every complete path is one
// sample with its probability as weight. With the saturated bases below the
// regression reproduces conditional expectations exactly.
//   psi at date i: indicators of the time-i nodes (the constant at i = 0);
//   m for [T_i, T_{i+1}): 1{node_i = P} (1{node_{i+1} = c} - p_c) for each
//   time-i node P and child c.

#include <vector>

#include "bermudan/dual_engine.hpp"
#include "bermudan/lattice.hpp"

namespace bermudan {

class LatticePathProblem final : public PathProblem {
 public:
  explicit LatticePathProblem(const lattice::LatticeModel& lattice);

  std::size_t exercise_count() const override { return lattice_.horizon(); }
  std::size_t path_count() const override { return paths_.size(); }
  std::size_t martingale_count(std::size_t i) const override { return child_offset_[i].back(); }
  std::size_t psi_count(std::size_t i) const override { return lattice_.layer_size(i); }
  double payoff(std::size_t path, std::size_t i) const override;
  void martingale_features(std::size_t path, std::size_t i, std::span<double> out) const override;
  void psi(std::size_t path, std::size_t i, std::span<double> out) const override;
  bool weighted() const override { return true; }
  double weight(std::size_t path) const override { return paths_.probability[path]; }

  const lattice::PathTable& paths() const { return paths_; }

  // The martingale M_i = sum_{j<i} m_{j+1} beta^(j) as a node field.
  lattice::MartingaleField martingale(const DualCoefficients& coeffs) const;

 private:
  const lattice::LatticeModel& lattice_;
  lattice::PathTable paths_;
  // child_offset_[i][n]: first feature index for node n at time i; last entry = total.
  std::vector<std::vector<std::size_t>> child_offset_;
};

}  // namespace bermudan

#pragma once

// Exact optimal stopping on finite trees.
//
// A LatticeModel is a tree over discrete times 0..T: every node at time t > 0
// has a unique parent at t-1, the edge carries the transition probability,
// and the node carries the (discounted) payoff Z. F_t-measurable quantities
// are node functions at time t; conditional expectations are probability
// weighted sums over children. Everything here is computed by backward
// induction or exhaustive path enumeration, so the results serve as oracles.

#include <cstddef>
#include <span>
#include <vector>

namespace bermudan::lattice {

struct Node {
  std::size_t parent = 0;    // ignored at time 0
  double probability = 1.0;  // P(this node | parent)
  double payoff = 0.0;       // Z at this node
};

class LatticeModel {
 public:
  // Throws ValidationError unless: layer 0 has one node, every parent index
  // exists, probabilities are nonnegative with row sums 1 (to 1e-12), payoffs
  // are finite, and every non-terminal node has at least one child.
  explicit LatticeModel(std::vector<std::vector<Node>> layers);

  std::size_t horizon() const { return layers_.size() - 1; }
  std::size_t layer_size(std::size_t t) const { return layers_[t].size(); }
  const Node& node(std::size_t t, std::size_t n) const { return layers_[t][n]; }
  double payoff(std::size_t t, std::size_t n) const { return layers_[t][n].payoff; }
  std::span<const std::size_t> children(std::size_t t, std::size_t n) const {
    return children_[t][n];
  }
  const std::vector<std::vector<Node>>& layers() const { return layers_; }

  // Number of complete paths (terminal nodes).
  std::size_t path_count() const { return layers_.back().size(); }

 private:
  std::vector<std::vector<Node>> layers_;
  std::vector<std::vector<std::vector<std::size_t>>> children_;
};

// Per-node real values, value(t, n).
class ValueField {
 public:
  ValueField() = default;
  explicit ValueField(const LatticeModel& lattice, double fill = 0.0);

  double& operator()(std::size_t t, std::size_t n) { return values_[t][n]; }
  double operator()(std::size_t t, std::size_t n) const { return values_[t][n]; }
  std::size_t horizon() const { return values_.size() - 1; }
  std::size_t layer_size(std::size_t t) const { return values_[t].size(); }
  bool matches(const LatticeModel& lattice) const;

 private:
  std::vector<std::vector<double>> values_;
};

// A ValueField that is a martingale started at 0. Construction validates
// M(0, root) = 0 and sum_children p * M(t+1, child) = M(t, node) within `tolerance`.
class MartingaleField {
 public:
  MartingaleField(const LatticeModel& lattice, ValueField values, double tolerance = 1e-10);

  double operator()(std::size_t t, std::size_t n) const { return values_(t, n); }
  const ValueField& values() const { return values_; }

 private:
  ValueField values_;
};

// True if sum_children p * f(t+1, child) = f(t, node) everywhere within tolerance.
bool is_martingale(const LatticeModel& lattice, const ValueField& field, double tolerance = 1e-10);

// E_t f_{t+1} at node (t, n), t < T.
double expected_next(const LatticeModel& lattice, const ValueField& field, std::size_t t,
                     std::size_t n);

// Y*_T = Z_T, Y*_t = max(Z_t, E_t Y*_{t+1}).
ValueField snell_envelope(const LatticeModel& lattice);

// Exercise flags of the first optimal stopping family: stop at a node iff Z >= Y*.
struct StoppingRule {
  std::vector<std::vector<bool>> exercise;
};

StoppingRule first_optimal_stopping(const LatticeModel& lattice, const ValueField& snell);

// E_t Z_{tau_t} where tau_t is the first exercise time >= t under `rule`
// (forced exercise at T).
ValueField stopped_payoff_value(const LatticeModel& lattice, const StoppingRule& rule);

struct DoobDecomposition {
  MartingaleField martingale;  // M*
  ValueField compensator;      // A*, predictable and nondecreasing
};

// Y* = Y*_0 + M* - A*.
DoobDecomposition doob_decomposition(const LatticeModel& lattice, const ValueField& snell);

struct MultiplicativeDecomposition {
  ValueField martingale;  // N*, N*_0 = 1
  ValueField drift;       // B*, predictable and nonincreasing, B*_0 = 1
};

// Y* = Y*_0 N* B*. Throws DomainError unless Z > 0 everywhere.
MultiplicativeDecomposition multiplicative_doob(const LatticeModel& lattice,
                                                const ValueField& snell);

// Throws ValidationError unless zeta >= 0 and E_{t-1} zeta_t = 1 for t >= 1.
// zeta(0, root) is not inspected.
void validate_zeta(const LatticeModel& lattice, const ValueField& zeta, double tolerance = 1e-10);

// M_t = M*_t - A*_t + sum_{l<=t} (A*_l - A*_{l-1}) zeta_l.
MartingaleField martingale_from_zeta(const LatticeModel& lattice, const ValueField& snell,
                                     const ValueField& zeta);

// Inverse of martingale_from_zeta: zeta_t = (dM_t - dM*_t + dA*_t) / dA*_t where
// dA*_t > 0, and 1 elsewhere. Only meaningful for surely optimal M.
ValueField extract_zeta(const LatticeModel& lattice, const ValueField& snell,
                        const MartingaleField& martingale);

// zeta_t = 1 - alpha + alpha * Y*_t / E_{t-1} Y*_t; alpha = 0 gives M*.
// Throws DomainError for alpha outside [0, 1] or non-positive payoffs.
MartingaleField alpha_family(const LatticeModel& lattice, const ValueField& snell, double alpha);

// Paths are enumerated by terminal node. Enumeration refuses lattices with
// more than this many paths.
inline constexpr std::size_t kMaxEnumeratedPaths = 1'000'000;

struct PathTable {
  std::size_t horizon = 0;
  // ancestors[p * (horizon + 1) + t] = node index at time t on path p
  std::vector<std::size_t> ancestors;
  std::vector<double> probability;

  std::size_t size() const { return probability.size(); }
  std::size_t at(std::size_t path, std::size_t t) const { return ancestors[path * (horizon + 1) + t]; }
};

PathTable enumerate_paths(const LatticeModel& lattice);

// theta_i = max_{i<=j<=T} (Z_j - M_j + M_i) on every path (indexed as in PathTable).
std::vector<double> pathwise_dual_value(const LatticeModel& lattice,
                                        const MartingaleField& martingale, std::size_t i);

struct ConditionalMoments {
  std::vector<double> mean;      // E_i theta_i per time-i node
  std::vector<double> variance;  // Var_i theta_i per time-i node
};

ConditionalMoments dual_value_moments(const LatticeModel& lattice,
                                      const MartingaleField& martingale, std::size_t i);

std::vector<double> conditional_variance(const LatticeModel& lattice,
                                         const MartingaleField& martingale, std::size_t i);

// theta_i(M) = Y*_i on every path within tolerance.
bool is_surely_optimal(const LatticeModel& lattice, const ValueField& snell,
                       const MartingaleField& martingale, std::size_t i,
                       double tolerance = 1e-10);

// N_t = Y*_0 + M_t - Y*_t; nondecreasing along paths iff M is surely optimal at all t.
ValueField surplus_process(const LatticeModel& lattice, const ValueField& snell,
                           const MartingaleField& martingale);

struct UPlusMeasurability {
  std::size_t time = 0;               // i in 1..T
  bool positive_part_measurable = false;  // (U_i)^+ constant on sibling groups
  bool measurable = false;                // U_i itself constant on sibling groups
  double max_snell_gap = 0.0;         // max |(U_i)^+ - (Y*_{i-1} - Z_{i-1})|
};

// U_i = Y*_i - M_i + M_{i-1} - Z_{i-1}, checked for i = 1..T.
std::vector<UPlusMeasurability> u_plus_measurability_check(const LatticeModel& lattice,
                                                           const MartingaleField& martingale,
                                                           double tolerance = 1e-10);

}  // namespace bermudan::lattice

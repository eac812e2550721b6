#include "bermudan/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bermudan/error.hpp"

namespace bermudan::lattice {
namespace {

std::string at(std::size_t t, std::size_t n) {
  return "(" + std::to_string(t) + ", " + std::to_string(n) + ")";
}

}  // namespace

LatticeModel::LatticeModel(std::vector<std::vector<Node>> layers) : layers_(std::move(layers)) {
  if (layers_.empty() || layers_.front().size() != 1)
    throw ValidationError("lattice: time 0 must contain exactly one node");
  layers_[0][0].probability = 1.0;
  layers_[0][0].parent = 0;

  children_.resize(layers_.size());
  for (std::size_t t = 0; t < layers_.size(); ++t) {
    children_[t].resize(layers_[t].size());
    if (layers_[t].empty()) throw ValidationError("lattice: time " + std::to_string(t) + " is empty");
    for (std::size_t n = 0; n < layers_[t].size(); ++n) {
      const Node& node = layers_[t][n];
      if (!std::isfinite(node.payoff)) throw ValidationError("lattice: non-finite payoff at " + at(t, n));
      if (t == 0) continue;
      if (node.parent >= layers_[t - 1].size())
        throw ValidationError("lattice: unknown parent of node " + at(t, n));
      if (!(node.probability >= 0.0) || !std::isfinite(node.probability))
        throw ValidationError("lattice: negative probability at node " + at(t, n));
      children_[t - 1][node.parent].push_back(n);
    }
  }

  for (std::size_t t = 0; t + 1 < layers_.size(); ++t) {
    for (std::size_t n = 0; n < layers_[t].size(); ++n) {
      if (children_[t][n].empty())
        throw ValidationError("lattice: non-terminal node " + at(t, n) + " has no successor");
      double row = 0.0;
      for (std::size_t c : children_[t][n]) row += layers_[t + 1][c].probability;
      if (std::abs(row - 1.0) > 1e-12)
        throw ValidationError("lattice: transition probabilities out of node " + at(t, n) +
                              " sum to " + std::to_string(row));
    }
  }
}

ValueField::ValueField(const LatticeModel& lattice, double fill) {
  values_.resize(lattice.horizon() + 1);
  for (std::size_t t = 0; t <= lattice.horizon(); ++t) values_[t].assign(lattice.layer_size(t), fill);
}

bool ValueField::matches(const LatticeModel& lattice) const {
  if (values_.size() != lattice.horizon() + 1) return false;
  for (std::size_t t = 0; t < values_.size(); ++t)
    if (values_[t].size() != lattice.layer_size(t)) return false;
  return true;
}

double expected_next(const LatticeModel& lattice, const ValueField& field, std::size_t t,
                     std::size_t n) {
  double sum = 0.0;
  for (std::size_t c : lattice.children(t, n)) sum += lattice.node(t + 1, c).probability * field(t + 1, c);
  return sum;
}

bool is_martingale(const LatticeModel& lattice, const ValueField& field, double tolerance) {
  if (!field.matches(lattice)) return false;
  for (std::size_t t = 0; t < lattice.horizon(); ++t)
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
      if (std::abs(expected_next(lattice, field, t, n) - field(t, n)) > tolerance) return false;
  return true;
}

MartingaleField::MartingaleField(const LatticeModel& lattice, ValueField values, double tolerance)
    : values_(std::move(values)) {
  if (!values_.matches(lattice)) throw ValidationError("martingale field: shape does not match lattice");
  if (std::abs(values_(0, 0)) > tolerance) throw ValidationError("martingale field: M_0 must be 0");
  for (std::size_t t = 0; t < lattice.horizon(); ++t)
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
      if (std::abs(expected_next(lattice, values_, t, n) - values_(t, n)) > tolerance)
        throw ValidationError("martingale field: martingale property fails at node " + at(t, n));
}

ValueField snell_envelope(const LatticeModel& lattice) {
  const std::size_t T = lattice.horizon();
  ValueField snell(lattice);
  for (std::size_t n = 0; n < lattice.layer_size(T); ++n) snell(T, n) = lattice.payoff(T, n);
  for (std::size_t t = T; t-- > 0;)
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
      snell(t, n) = std::max(lattice.payoff(t, n), expected_next(lattice, snell, t, n));
  return snell;
}

StoppingRule first_optimal_stopping(const LatticeModel& lattice, const ValueField& snell) {
  StoppingRule rule;
  rule.exercise.resize(lattice.horizon() + 1);
  for (std::size_t t = 0; t <= lattice.horizon(); ++t) {
    rule.exercise[t].resize(lattice.layer_size(t));
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
      rule.exercise[t][n] = t == lattice.horizon() || lattice.payoff(t, n) >= snell(t, n);
  }
  return rule;
}

ValueField stopped_payoff_value(const LatticeModel& lattice, const StoppingRule& rule) {
  const std::size_t T = lattice.horizon();
  ValueField value(lattice);
  for (std::size_t n = 0; n < lattice.layer_size(T); ++n) value(T, n) = lattice.payoff(T, n);
  for (std::size_t t = T; t-- > 0;)
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
      value(t, n) = rule.exercise[t][n] ? lattice.payoff(t, n) : expected_next(lattice, value, t, n);
  return value;
}

DoobDecomposition doob_decomposition(const LatticeModel& lattice, const ValueField& snell) {
  ValueField martingale(lattice);
  ValueField compensator(lattice);
  for (std::size_t t = 0; t < lattice.horizon(); ++t) {
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n) {
      const double expected = expected_next(lattice, snell, t, n);
      for (std::size_t c : lattice.children(t, n)) {
        martingale(t + 1, c) = martingale(t, n) + snell(t + 1, c) - expected;
        compensator(t + 1, c) = compensator(t, n) + snell(t, n) - expected;
      }
    }
  }
  return {MartingaleField(lattice, std::move(martingale)), std::move(compensator)};
}

MultiplicativeDecomposition multiplicative_doob(const LatticeModel& lattice,
                                                const ValueField& snell) {
  for (std::size_t t = 0; t <= lattice.horizon(); ++t)
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
      if (!(lattice.payoff(t, n) > 0.0))
        throw DomainError("multiplicative Doob decomposition requires a positive payoff");

  ValueField martingale(lattice, 1.0);
  ValueField drift(lattice, 1.0);
  for (std::size_t t = 0; t < lattice.horizon(); ++t) {
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n) {
      const double expected = expected_next(lattice, snell, t, n);
      for (std::size_t c : lattice.children(t, n)) {
        martingale(t + 1, c) = martingale(t, n) * snell(t + 1, c) / expected;
        drift(t + 1, c) = drift(t, n) * expected / snell(t, n);
      }
    }
  }
  return {std::move(martingale), std::move(drift)};
}

void validate_zeta(const LatticeModel& lattice, const ValueField& zeta, double tolerance) {
  if (!zeta.matches(lattice)) throw ValidationError("zeta: shape does not match lattice");
  for (std::size_t t = 0; t < lattice.horizon(); ++t) {
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n) {
      for (std::size_t c : lattice.children(t, n))
        if (!(zeta(t + 1, c) >= -tolerance))
          throw ValidationError("zeta: negative value at node " + at(t + 1, c));
      if (std::abs(expected_next(lattice, zeta, t, n) - 1.0) > tolerance)
        throw ValidationError("zeta: conditional mean differs from 1 below node " + at(t, n));
    }
  }
}

MartingaleField martingale_from_zeta(const LatticeModel& lattice, const ValueField& snell,
                                     const ValueField& zeta) {
  validate_zeta(lattice, zeta);
  const auto doob = doob_decomposition(lattice, snell);
  const ValueField& a = doob.compensator;
  ValueField weighted(lattice);  // sum_{l<=t} (A*_l - A*_{l-1}) zeta_l
  ValueField values(lattice);
  for (std::size_t t = 0; t < lattice.horizon(); ++t) {
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n) {
      for (std::size_t c : lattice.children(t, n)) {
        weighted(t + 1, c) = weighted(t, n) + (a(t + 1, c) - a(t, n)) * zeta(t + 1, c);
        values(t + 1, c) = doob.martingale(t + 1, c) - a(t + 1, c) + weighted(t + 1, c);
      }
    }
  }
  return MartingaleField(lattice, std::move(values));
}

ValueField extract_zeta(const LatticeModel& lattice, const ValueField& snell,
                        const MartingaleField& martingale) {
  const auto doob = doob_decomposition(lattice, snell);
  ValueField zeta(lattice, 1.0);
  for (std::size_t t = 0; t < lattice.horizon(); ++t) {
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n) {
      for (std::size_t c : lattice.children(t, n)) {
        const double d_a = doob.compensator(t + 1, c) - doob.compensator(t, n);
        if (d_a <= 1e-14) continue;
        const double d_m = martingale(t + 1, c) - martingale(t, n);
        const double d_doob = doob.martingale(t + 1, c) - doob.martingale(t, n);
        zeta(t + 1, c) = (d_m - d_doob + d_a) / d_a;
      }
    }
  }
  return zeta;
}

MartingaleField alpha_family(const LatticeModel& lattice, const ValueField& snell, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha family: alpha must lie in [0, 1]");
  for (std::size_t t = 0; t <= lattice.horizon(); ++t)
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
      if (!(lattice.payoff(t, n) > 0.0))
        throw DomainError("alpha family requires a positive payoff");

  ValueField zeta(lattice, 1.0);
  for (std::size_t t = 0; t < lattice.horizon(); ++t) {
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n) {
      const double expected = expected_next(lattice, snell, t, n);
      for (std::size_t c : lattice.children(t, n))
        zeta(t + 1, c) = 1.0 - alpha + alpha * snell(t + 1, c) / expected;
    }
  }
  return martingale_from_zeta(lattice, snell, zeta);
}

PathTable enumerate_paths(const LatticeModel& lattice) {
  const std::size_t T = lattice.horizon();
  const std::size_t count = lattice.path_count();
  if (count > kMaxEnumeratedPaths)
    throw ValidationError("path enumeration guard exceeded: " + std::to_string(count) + " paths");

  PathTable table;
  table.horizon = T;
  table.ancestors.resize(count * (T + 1));
  table.probability.resize(count);
  for (std::size_t p = 0; p < count; ++p) {
    std::size_t node = p;
    double probability = 1.0;
    for (std::size_t t = T + 1; t-- > 0;) {
      table.ancestors[p * (T + 1) + t] = node;
      probability *= lattice.node(t, node).probability;
      node = lattice.node(t, node).parent;
    }
    table.probability[p] = probability;
  }
  return table;
}

namespace {

std::vector<double> dual_values(const LatticeModel& lattice, const PathTable& paths,
                                const MartingaleField& martingale, std::size_t i) {
  if (i > lattice.horizon()) throw ValidationError("dual value: time index beyond horizon");
  std::vector<double> theta(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const double m_i = martingale(i, paths.at(p, i));
    double best = -INFINITY;
    for (std::size_t j = i; j <= lattice.horizon(); ++j) {
      const std::size_t n = paths.at(p, j);
      best = std::max(best, lattice.payoff(j, n) - martingale(j, n) + m_i);
    }
    theta[p] = best;
  }
  return theta;
}

}  // namespace

std::vector<double> pathwise_dual_value(const LatticeModel& lattice,
                                        const MartingaleField& martingale, std::size_t i) {
  return dual_values(lattice, enumerate_paths(lattice), martingale, i);
}

ConditionalMoments dual_value_moments(const LatticeModel& lattice,
                                      const MartingaleField& martingale, std::size_t i) {
  const PathTable paths = enumerate_paths(lattice);
  const std::vector<double> theta = dual_values(lattice, paths, martingale, i);

  // Weight of a path given its time-i node: product of edge probabilities after i.
  std::vector<double> weight(paths.size(), 1.0);
  for (std::size_t p = 0; p < paths.size(); ++p)
    for (std::size_t t = i + 1; t <= lattice.horizon(); ++t)
      weight[p] *= lattice.node(t, paths.at(p, t)).probability;

  ConditionalMoments moments;
  moments.mean.assign(lattice.layer_size(i), 0.0);
  moments.variance.assign(lattice.layer_size(i), 0.0);
  for (std::size_t p = 0; p < paths.size(); ++p) moments.mean[paths.at(p, i)] += weight[p] * theta[p];
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const double centered = theta[p] - moments.mean[paths.at(p, i)];
    moments.variance[paths.at(p, i)] += weight[p] * centered * centered;
  }
  return moments;
}

std::vector<double> conditional_variance(const LatticeModel& lattice,
                                         const MartingaleField& martingale, std::size_t i) {
  return dual_value_moments(lattice, martingale, i).variance;
}

bool is_surely_optimal(const LatticeModel& lattice, const ValueField& snell,
                       const MartingaleField& martingale, std::size_t i, double tolerance) {
  const PathTable paths = enumerate_paths(lattice);
  const std::vector<double> theta = dual_values(lattice, paths, martingale, i);
  for (std::size_t p = 0; p < paths.size(); ++p)
    if (std::abs(theta[p] - snell(i, paths.at(p, i))) > tolerance) return false;
  return true;
}

ValueField surplus_process(const LatticeModel& lattice, const ValueField& snell,
                           const MartingaleField& martingale) {
  ValueField surplus(lattice);
  for (std::size_t t = 0; t <= lattice.horizon(); ++t)
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
      surplus(t, n) = snell(0, 0) + martingale(t, n) - snell(t, n);
  return surplus;
}

std::vector<UPlusMeasurability> u_plus_measurability_check(const LatticeModel& lattice,
                                                           const MartingaleField& martingale,
                                                           double tolerance) {
  const ValueField snell = snell_envelope(lattice);
  std::vector<UPlusMeasurability> result;
  for (std::size_t t = 1; t <= lattice.horizon(); ++t) {
    UPlusMeasurability check;
    check.time = t;
    check.positive_part_measurable = true;
    check.measurable = true;
    for (std::size_t n = 0; n < lattice.layer_size(t - 1); ++n) {
      const double gap = snell(t - 1, n) - lattice.payoff(t - 1, n);
      bool first = true;
      double u_ref = 0.0;
      for (std::size_t c : lattice.children(t - 1, n)) {
        const double u = snell(t, c) - martingale(t, c) + martingale(t - 1, n) - lattice.payoff(t - 1, n);
        if (first) {
          u_ref = u;
          first = false;
        }
        if (std::abs(u - u_ref) > tolerance) check.measurable = false;
        if (std::abs(std::max(u, 0.0) - std::max(u_ref, 0.0)) > tolerance)
          check.positive_part_measurable = false;
        check.max_snell_gap = std::max(check.max_snell_gap, std::abs(std::max(u, 0.0) - gap));
      }
    }
    result.push_back(check);
  }
  return result;
}

}  // namespace bermudan::lattice

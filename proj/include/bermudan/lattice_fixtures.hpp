#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bermudan/lattice.hpp"

namespace bermudan::lattice {

// A lattice together with the martingale its construction comes with (if any).
struct Fixture {
  std::string name;
  LatticeModel lattice;
  std::optional<MartingaleField> martingale;
};

// Named constructions:
//   "optimal_not_sure"            T=1, Z=(0, 2), M_1 = +-1 with probability 1/2
//   "sure_not_hereditary" T=2, Z=(4, 0, 2), M increments +-1 with probability 1/2
//   "counter1(n)"         T=1, Z=0, M_1 = -xi with xi = 1 w.p. (n-1)/n, 1-n w.p. 1/n
// Throws ValidationError for an unknown name.
Fixture build_fixture(std::string_view name);

std::vector<std::string> fixture_names();

struct RandomLatticeOptions {
  std::size_t branching = 2;
  double min_payoff = 0.5;  // payoffs drawn uniformly from [min, max)
  double max_payoff = 5.0;
};

// Tree with `branching` children per node and dyadic transition probabilities
// (each a multiple of 1/8, all positive), payoffs i.i.d. uniform.
LatticeModel random_lattice(std::size_t horizon, std::uint64_t seed,
                            const RandomLatticeOptions& options = {});

// A valid zeta: per parent, positive random weights normalised to
// conditional mean 1.
ValueField random_zeta(const LatticeModel& lattice, std::uint64_t seed);

}  // namespace bermudan::lattice

namespace bermudan::lattice {

// A martingale with M_0 = 0 whose increments below each node are i.i.d.
// uniform on [-scale, scale], recentred to conditional mean zero.
MartingaleField random_martingale(const LatticeModel& lattice, std::uint64_t seed,
                                  double scale = 1.0);

}  // namespace bermudan::lattice

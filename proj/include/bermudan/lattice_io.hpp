#pragma once

// Plain-text lattice definitions.
//
//   # comment
//   lattice v1
//   horizon 2
//   node <time> <index> <parent|-> <probability> <payoff> [martingale]
//
// Nodes may appear in any order, but the indices at each time must be
// exactly 0..k-1. The martingale column is optional; when present on one
// node it must be present on all of them.

#include <iosfwd>
#include <optional>
#include <string>

#include "bermudan/lattice.hpp"

namespace bermudan::lattice {

struct LatticeFile {
  LatticeModel lattice;
  std::optional<MartingaleField> martingale;
};

// Throws ValidationError with "<source>:<line>: ..." messages.
LatticeFile read_lattice(std::istream& in, const std::string& source = "<input>");
LatticeFile read_lattice_file(const std::string& path);

void write_lattice(std::ostream& out, const LatticeModel& lattice,
                   const MartingaleField* martingale = nullptr);

}  // namespace bermudan::lattice
